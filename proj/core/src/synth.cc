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

#include "suda/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>

#include "suda/error.hpp"

namespace suda {

namespace {

constexpr std::uint64_t kSpeakerStream = 1;
constexpr std::uint64_t kPhraseStream = 2;
constexpr std::uint64_t kSessionStream = 3;

// Peterson & Barney style (F1, F2, F3) averages.
constexpr std::array<std::array<double, 3>, 10> kVowels = {{
    {270, 2290, 3010},
    {390, 1990, 2550},
    {530, 1840, 2480},
    {660, 1720, 2410},
    {730, 1090, 2440},
    {570, 840, 2410},
    {440, 1020, 2240},
    {300, 870, 2240},
    {640, 1190, 2390},
    {490, 1350, 1690},
}};
constexpr std::array<double, 3> kBandwidthsHz = {80.0, 100.0, 150.0};
constexpr int kTiltSections = 3;
constexpr double kTargetRms = 0.1;
constexpr double kSnrDb = 30.0;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, kind, ...) so that no utterance depends on
// how many others were generated before it.
std::mt19937_64 Stream(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0;
  for (std::uint64_t p : parts) h = SplitMix64(h ^ p);
  return std::mt19937_64(h);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string Label(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, index);
  return buf;
}

// Average slope in dB/octave between 500 Hz and 4 kHz of kTiltSections
// cascaded one-pole low-pass sections with pole p.
double TiltSlope(double pole, double sample_rate) {
  auto gain_db = [&](double hz) {
    const std::complex<double> z = std::polar(1.0, -2.0 * std::numbers::pi * hz / sample_rate);
    return 20.0 * std::log10((1.0 - pole) / std::abs(1.0 - pole * z));
  };
  return kTiltSections * (gain_db(4000.0) - gain_db(500.0)) / 3.0;
}

double TiltPole(double db_per_octave, double sample_rate) {
  double lo = 0.0, hi = 0.9999;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (TiltSlope(mid, sample_rate) > db_per_octave ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpeakerSpec MakeSpeaker(std::uint64_t seed, std::size_t index) {
  auto rng = Stream({seed, kSpeakerStream, index});
  SpeakerSpec s;
  s.id = Label("spk", index);
  s.index = index;
  s.f0_hz = Uniform(rng, 90.0, 280.0);
  s.formant_shift = Uniform(rng, 0.85, 1.15);
  s.tilt_db_per_octave = Uniform(rng, -12.0, -3.0);
  return s;
}

PhraseSpec MakePhrase(std::uint64_t seed, std::size_t index, PhraseLength length) {
  auto rng = Stream({seed, kPhraseStream, index});
  PhraseSpec p;
  p.id = Label("phr", index);
  p.index = index;
  const auto [lo_ms, hi_ms] =
      length == PhraseLength::kShort ? std::pair{1000, 2000} : std::pair{3000, 4000};
  p.total_ms = std::uniform_int_distribution<int>(lo_ms, hi_ms)(rng);
  int remaining = p.total_ms;
  std::size_t previous = kVowels.size();
  while (remaining > 0) {
    int d = remaining;
    if (remaining > 300) {
      d = std::uniform_int_distribution<int>(120, std::min(300, remaining - 120))(rng);
    }
    std::size_t v = std::uniform_int_distribution<std::size_t>(0, kVowels.size() - 2)(rng);
    if (v >= previous) ++v;  // never repeat the previous vowel
    previous = v;
    p.segments.push_back({kVowels[v], d});
    remaining -= d;
  }
  return p;
}

Waveform Synthesize(const SpeakerSpec& speaker, const PhraseSpec& phrase, int session,
                    std::uint64_t seed) {
  const double fs = kCorpusSampleRate;
  const std::size_t n = static_cast<std::size_t>(phrase.total_ms) * kCorpusSampleRate / 1000;
  auto rng = Stream({seed, kSessionStream, speaker.index, phrase.index,
                     static_cast<std::uint64_t>(session)});
  const double f0 = speaker.f0_hz * (1.0 + Uniform(rng, -0.02, 0.02));
  const double gain_db = Uniform(rng, -3.0, 3.0);

  // Per-sample formant targets, smoothed with a 10 ms one-pole glide.
  std::vector<std::array<double, 3>> targets;
  targets.reserve(n);
  for (const VowelSegment& seg : phrase.segments) {
    const std::size_t len = static_cast<std::size_t>(seg.duration_ms) * kCorpusSampleRate / 1000;
    for (std::size_t i = 0; i < len && targets.size() < n; ++i) {
      targets.push_back(seg.formants_hz);
    }
  }
  while (targets.size() < n) targets.push_back(targets.back());

  const double glide = std::exp(-1.0 / (0.010 * fs));
  const double pole = TiltPole(speaker.tilt_db_per_octave, fs);
  std::array<double, 3> formant = targets.front();
  for (double& f : formant) f *= speaker.formant_shift;
  std::array<double, kTiltSections> tilt_state{};
  std::array<std::array<double, 2>, 3> res_state{};

  std::vector<double> out(n);
  double phase = 1.0;  // fire an impulse on the first sample
  for (std::size_t i = 0; i < n; ++i) {
    // Gentle declination: 5% above nominal F0 at onset, 5% below at the end.
    const double pitch = f0 * (1.05 - 0.10 * static_cast<double>(i) / n);
    double x = 0.0;
    if (phase >= 1.0) {
      x = 1.0;
      phase -= 1.0;
    }
    phase += pitch / fs;

    for (double& s : tilt_state) {
      s = (1.0 - pole) * x + pole * s;
      x = s;
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const double target = targets[i][k] * speaker.formant_shift;
      formant[k] = glide * formant[k] + (1.0 - glide) * target;
      const double r = std::exp(-std::numbers::pi * kBandwidthsHz[k] / fs);
      const double b = 2.0 * r * std::cos(2.0 * std::numbers::pi * formant[k] / fs);
      const double c = -r * r;
      const double a = 1.0 - b - c;
      const double y = a * x + b * res_state[k][0] + c * res_state[k][1];
      res_state[k][1] = res_state[k][0];
      res_state[k][0] = y;
      x = y;
    }
    out[i] = x;
  }

  double energy = 0.0;
  for (double v : out) energy += v * v;
  const double rms = std::sqrt(energy / n);
  const double target_rms = kTargetRms * std::pow(10.0, gain_db / 20.0);
  const double scale = rms > 0.0 ? target_rms / rms : 0.0;
  std::normal_distribution<double> noise(0.0, target_rms * std::pow(10.0, -kSnrDb / 20.0));
  Waveform wave;
  wave.sample_rate = kCorpusSampleRate;
  wave.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wave.samples[i] = std::clamp(out[i] * scale + noise(rng), -1.0, 1.0);
  }
  return wave;
}

SplitCounts SpeakerSplitCounts(const CorpusConfig& config) {
  SplitCounts c;
  c.background = static_cast<std::size_t>(std::lround(config.n_speakers * config.background_fraction));
  c.development = static_cast<std::size_t>(std::lround(config.n_speakers * config.development_fraction));
  if (c.background + c.development > config.n_speakers) {
    throw Error(ErrorKind::kConfig, "split fractions exceed the speaker count");
  }
  c.evaluation = config.n_speakers - c.background - c.development;
  return c;
}

Manifest CorpusManifest(const CorpusConfig& config) {
  if (config.n_speakers < 2) throw Error(ErrorKind::kConfig, "n_speakers must be >= 2");
  if (config.n_phrases < 2) throw Error(ErrorKind::kConfig, "n_phrases must be >= 2");
  const SplitCounts counts = SpeakerSplitCounts(config);
  Manifest manifest;
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    const Split split = s < counts.background ? Split::kBackground
                        : s < counts.background + counts.development ? Split::kDevelopment
                                                                      : Split::kEvaluation;
    for (std::size_t p = 0; p < config.n_phrases; ++p) {
      for (int session = 1; session <= kSessionsPerPhrase; ++session) {
        Utterance u;
        u.speaker = Label("spk", s);
        u.phrase = Label("phr", p);
        u.session = session;
        u.split = split;
        u.utt_id = u.speaker + "_" + u.phrase + "_s" + std::to_string(session);
        u.path = "wav/" + u.utt_id + ".wav";
        manifest.push_back(std::move(u));
      }
    }
  }
  return manifest;
}

Manifest GenerateCorpus(const CorpusConfig& config, const std::filesystem::path& out_dir) {
  Manifest manifest = CorpusManifest(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "wav", ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot create " + (out_dir / "wav").string() + ": " +
                                    ec.message());
  }
  std::vector<SpeakerSpec> speakers;
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    speakers.push_back(MakeSpeaker(config.seed, s));
  }
  std::vector<PhraseSpec> phrases;
  for (std::size_t p = 0; p < config.n_phrases; ++p) {
    phrases.push_back(MakePhrase(config.seed, p, config.phrase_length));
  }
  std::size_t i = 0;
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    for (std::size_t p = 0; p < config.n_phrases; ++p) {
      for (int session = 1; session <= kSessionsPerPhrase; ++session, ++i) {
        WriteWav(out_dir / manifest[i].path,
                 Synthesize(speakers[s], phrases[p], session, config.seed));
      }
    }
  }
  WriteManifest(out_dir / "manifest.tsv", manifest);
  return manifest;
}

}  // namespace suda
