// Copyright (c) 2026 SUDA contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUDA_SYNTH_HPP_
#define SUDA_SYNTH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "suda/protocol.hpp"
#include "suda/wav.hpp"

namespace suda {

// Source-filter stand-in for a read-speech corpus: speakers differ in voice
// (F0, vocal-tract scale, spectral tilt), phrases differ in their vowel
// sequence, sessions differ in small pitch/gain perturbations and noise.

inline constexpr int kCorpusSampleRate = 16000;
inline constexpr int kSessionsPerPhrase = 9;

struct SpeakerSpec {
  std::string id;
  std::size_t index = 0;
  double f0_hz = 0.0;               // [90, 280]
  double formant_shift = 1.0;       // [0.85, 1.15]
  double tilt_db_per_octave = 0.0;  // [-12, -3]
};

struct VowelSegment {
  std::array<double, 3> formants_hz{};
  int duration_ms = 0;  // [120, 300]
};

// Short phrases are 1-2 s (command-like), long ones 3-4 s (sentence-like).
enum class PhraseLength { kShort, kLong };

struct PhraseSpec {
  std::string id;
  std::size_t index = 0;
  std::vector<VowelSegment> segments;
  int total_ms = 0;
};

SpeakerSpec MakeSpeaker(std::uint64_t seed, std::size_t index);
PhraseSpec MakePhrase(std::uint64_t seed, std::size_t index, PhraseLength length);

// Deterministic in (seed, speaker, phrase, session); total_ms * 16 samples.
Waveform Synthesize(const SpeakerSpec& speaker, const PhraseSpec& phrase,
                    int session, std::uint64_t seed);

struct CorpusConfig {
  std::size_t n_speakers = 16;
  std::size_t n_phrases = 4;
  std::uint64_t seed = 2020;
  double background_fraction = 0.5;
  double development_fraction = 0.25;
  PhraseLength phrase_length = PhraseLength::kShort;
};

struct SplitCounts {
  std::size_t background = 0;
  std::size_t development = 0;
  std::size_t evaluation = 0;
};

// Speakers are assigned to splits in index order.
SplitCounts SpeakerSplitCounts(const CorpusConfig& config);

// Writes <out_dir>/wav/<utt>.wav and <out_dir>/manifest.tsv; manifest paths
// are relative to out_dir. Returns the manifest.
Manifest GenerateCorpus(const CorpusConfig& config, const std::filesystem::path& out_dir);

// The manifest GenerateCorpus would write, without synthesizing audio.
Manifest CorpusManifest(const CorpusConfig& config);

}  // namespace suda

#endif  // SUDA_SYNTH_HPP_
