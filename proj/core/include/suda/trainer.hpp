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

#ifndef SUDA_TRAINER_HPP_
#define SUDA_TRAINER_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "suda/frontend.hpp"
#include "suda/losses.hpp"
#include "suda/network.hpp"
#include "suda/protocol.hpp"
#include "suda/run_config.hpp"

namespace suda {

struct TrainingExample {
  std::string utt_id;
  FeatureMatrix features;
  std::size_t speaker = 0;
  std::size_t phrase = 0;
};

// Labels are indices into the sorted speaker / phrase id lists.
struct TrainingSet {
  std::vector<TrainingExample> examples;
  std::vector<std::string> speakers;
  std::vector<std::string> phrases;
};

TrainingSet MakeTrainingSet(
    const Manifest& manifest,
    const std::function<FeatureMatrix(const Utterance&)>& load_features);

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;  // global, 1-based
  double learning_rate = 0.0;
  LossBundle loss;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double learning_rate = 0.0;
  std::map<std::string, double> dev_eer;  // condition name -> EER %
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;

  // Tab-separated tables preceded by `# key=value` provenance lines. Loss
  // values are written in shortest round-trip form.
  std::string FormatSteps(const std::map<std::string, std::string>& header) const;
  std::string FormatEpochs(const std::map<std::string, std::string>& header) const;
  static std::vector<StepRecord> ParseSteps(std::string_view text,
                                            const std::string& origin);
};

// v <- momentum * v + g; p <- p - lr * v.
class SgdMomentum {
 public:
  SgdMomentum(double learning_rate, double momentum)
      : learning_rate_(learning_rate), momentum_(momentum) {}

  void Step(SudaParams& params);
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }

 private:
  double learning_rate_;
  double momentum_;
  std::vector<std::vector<double>> velocity_;
};

// Loss of one batch with the tape recording. Mining draws from `rng`.
LossTerms BatchLoss(const SudaParams& params, const SudaConfig& config,
                    std::span<const TrainingExample* const> batch,
                    std::mt19937_64& rng, double margin);

// Global L2 norm of all parameter gradients; rescales them when above
// `max_norm` (ignored when max_norm == 0). Returns the norm before clipping.
double ClipGradients(SudaParams& params, double max_norm);

using DevEvaluator =
    std::function<std::map<std::string, double>(const SudaParams&, const SudaConfig&)>;
using StepObserver = std::function<void(const StepRecord&)>;

struct TrainResult {
  SudaConfig config;
  SudaParams params;
  TrainLog log;
};

// Trains from InitParams(model, run.seed). model.n_speakers / n_phrases are
// taken from `data`.
TrainResult Train(const RunConfig& run, SudaConfig model, const TrainingSet& data,
                  const DevEvaluator& dev = {}, const StepObserver& observer = {});

}  // namespace suda

#endif  // SUDA_TRAINER_HPP_
