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

#ifndef SUDA_RUN_CONFIG_HPP_
#define SUDA_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "suda/network.hpp"
#include "suda/synth.hpp"

namespace suda {

// Everything a pipeline run depends on. The file form is UTF-8
// `key = value` lines with `#` comments; unknown keys are rejected.
struct RunConfig {
  // Network. n_speakers / n_phrases are overwritten from the training data.
  SudaConfig model;

  // Optimization. Only "sgd_momentum" is implemented.
  std::string optimizer = "sgd_momentum";
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t lr_patience = 5;  // epochs without improvement before halving
  std::size_t batch_size = 128;
  std::size_t epochs = 30;
  double grad_clip = 0.0;  // global L2 norm; 0 disables
  double triplet_margin = 0.2;
  std::uint64_t seed = 2020;
  bool dev_eval = true;  // per-epoch development EER snapshot

  // Scoring.
  double alpha = 0.5;

  // Corpus.
  std::size_t corpus_speakers = 16;
  std::size_t corpus_phrases = 4;
  double background_fraction = 0.5;
  double development_fraction = 0.25;
  PhraseLength phrase_length = PhraseLength::kShort;

  // Paths, relative to the working directory of the process.
  std::string corpus_dir = "corpus";
  std::string feature_dir = "features";
  std::string work_dir = "work";

  // Throws Error(kConfig) naming the offending key.
  void Validate() const;

  std::string Serialize() const;
  static RunConfig Parse(std::string_view text, const std::string& origin);
  static RunConfig Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  CorpusConfig Corpus() const;
  // Flat key/value view written into artifact headers.
  std::map<std::string, std::string> Provenance() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace suda

#endif  // SUDA_RUN_CONFIG_HPP_
