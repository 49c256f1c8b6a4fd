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

#ifndef SUDA_PIPELINE_HPP_
#define SUDA_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "suda/checkpoint.hpp"
#include "suda/frontend.hpp"
#include "suda/protocol.hpp"
#include "suda/run_config.hpp"
#include "suda/scoring.hpp"
#include "suda/trainer.hpp"

namespace suda {

// On-disk locations derived from a RunConfig.
struct Layout {
  explicit Layout(const RunConfig& config);

  std::filesystem::path corpus_dir;
  std::filesystem::path feature_dir;
  std::filesystem::path work_dir;

  std::filesystem::path Manifest() const { return corpus_dir / "manifest.tsv"; }
  std::filesystem::path Features(const std::string& utt_id) const {
    return feature_dir / (utt_id + ".feat");
  }
  std::filesystem::path Checkpoint(bool masks) const;
  std::filesystem::path StepLog(bool masks) const;
  std::filesystem::path EpochLog(bool masks) const;
};

using FeatureStore = std::map<std::string, FeatureMatrix>;

// Reads FEAT1 files for every utterance of `manifest`.
FeatureStore LoadFeatures(const Layout& layout, const Manifest& manifest);

struct UtteranceEmbedding {
  std::vector<double> spk;
  std::vector<double> utt;
};
using EmbeddingTable = std::map<std::string, UtteranceEmbedding>;

EmbeddingTable ComputeEmbeddings(const SudaParams& params, const SudaConfig& config,
                                 const Manifest& manifest, const FeatureStore& features);

// One line per utterance: utt_id, dim, speaker vector, utterance vector.
std::string FormatEmbeddings(const EmbeddingTable& table);
EmbeddingTable ParseEmbeddings(std::string_view text, const std::string& origin);
void WriteEmbeddings(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable ReadEmbeddings(const std::filesystem::path& path);

// TC trials once followed by the TW, IC and IW non-target trials.
std::vector<Trial> AllConditionTrials(const Manifest& split_manifest);
std::vector<Trial> ConditionTrials(const Manifest& split_manifest, Condition condition);

// Enrollment models come from sessions {1,4,7} of `split_manifest`.
std::vector<ScoreRecord> ScoreTrials(const EmbeddingTable& embeddings,
                                     const Manifest& split_manifest,
                                     std::span<const Trial> trials, double alpha);

// EER for every condition whose non-target category appears in `scores`.
std::map<Condition, EerResult> EvaluateScores(std::span<const ScoreRecord> scores);
std::string FormatEvaluation(const std::map<Condition, EerResult>& eers);

struct SplitEvaluation {
  std::vector<ScoreRecord> scores;
  std::map<Condition, EerResult> eers;
};

SplitEvaluation EvaluateSplit(const SudaParams& params, const SudaConfig& config,
                              const Manifest& manifest, Split split,
                              const FeatureStore& features, double alpha);

// Commands. Each validates its inputs and writes deterministic artifacts.
Manifest CmdSynth(const RunConfig& config);
std::size_t CmdExtract(const RunConfig& config);
TrainResult CmdTrain(const RunConfig& config, bool masks);
EmbeddingTable CmdEmbed(const RunConfig& config, const std::filesystem::path& checkpoint,
                        Split split, const std::filesystem::path& out);
std::vector<Trial> CmdTrials(const RunConfig& config, Split split, Condition condition,
                             const std::filesystem::path& out);
// `source` is a checkpoint (SUDA1 magic) or an embedding file.
std::vector<ScoreRecord> CmdScore(const RunConfig& config,
                                  const std::filesystem::path& source,
                                  const std::filesystem::path& trials, double alpha,
                                  const std::filesystem::path& out);
std::string CmdEval(const std::filesystem::path& scores);

struct AblationRow {
  std::uint64_t seed = 0;
  std::map<Condition, EerResult> suda;
  std::map<Condition, EerResult> mod_suv;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::map<Condition, double> mean_suda;
  std::map<Condition, double> mean_mod_suv;

  std::string Format() const;
};

// Trains SUDA and mod-SUV from the same initialization for each seed and
// evaluates both on the evaluation split.
AblationReport CmdAblate(const RunConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace suda

#endif  // SUDA_PIPELINE_HPP_
