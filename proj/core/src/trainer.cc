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

#include "suda/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "suda/error.hpp"
#include "text_util.hpp"

namespace suda {

namespace {

using internal::FormatDouble;

std::size_t IndexOf(const std::vector<std::string>& sorted, const std::string& id) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), id) - sorted.begin());
}

std::string Header(const std::map<std::string, std::string>& header) {
  std::string out;
  for (const auto& [k, v] : header) out += "# " + k + "=" + v + "\n";
  return out;
}

// Separate streams so that changing the batch order never perturbs mining.
std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t kind) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind)};
  return std::mt19937_64(seq);
}

void CheckFinite(const SudaParams& params) {
  for (const NamedTensor& p : params.Named()) {
    for (double v : p.tensor.values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kNonFinite, "parameter " + p.name + " diverged");
      }
    }
  }
}

}  // namespace

TrainingSet MakeTrainingSet(
    const Manifest& manifest,
    const std::function<FeatureMatrix(const Utterance&)>& load_features) {
  if (manifest.empty()) throw Error(ErrorKind::kEmptyInput, "empty training manifest");
  std::set<std::string> speakers, phrases;
  for (const Utterance& u : manifest) {
    speakers.insert(u.speaker);
    phrases.insert(u.phrase);
  }
  TrainingSet set;
  set.speakers.assign(speakers.begin(), speakers.end());
  set.phrases.assign(phrases.begin(), phrases.end());
  set.examples.reserve(manifest.size());
  for (const Utterance& u : manifest) {
    set.examples.push_back({u.utt_id, load_features(u), IndexOf(set.speakers, u.speaker),
                            IndexOf(set.phrases, u.phrase)});
  }
  return set;
}

std::string TrainLog::FormatSteps(const std::map<std::string, std::string>& header) const {
  std::string out = Header(header);
  out += "epoch\tstep\tlearning_rate\tL_Tspk\tL_Tutt\tL_spk\tL_utt\tL_total\n";
  for (const StepRecord& r : steps) {
    out += std::to_string(r.epoch) + "\t" + std::to_string(r.step) + "\t" +
           FormatDouble(r.learning_rate) + "\t" + FormatDouble(r.loss.triplet_spk) + "\t" +
           FormatDouble(r.loss.triplet_utt) + "\t" + FormatDouble(r.loss.nll_spk) + "\t" +
           FormatDouble(r.loss.nll_utt) + "\t" + FormatDouble(r.loss.total) + "\n";
  }
  return out;
}

std::string TrainLog::FormatEpochs(const std::map<std::string, std::string>& header) const {
  std::string out = Header(header);
  out += "epoch\tmean_loss\tlearning_rate\tdev_eer_TW\tdev_eer_IC\tdev_eer_IW\n";
  for (const EpochRecord& r : epochs) {
    out += std::to_string(r.epoch) + "\t" + FormatDouble(r.mean_loss) + "\t" +
           FormatDouble(r.learning_rate);
    for (const char* c : {"TW", "IC", "IW"}) {
      const auto it = r.dev_eer.find(c);
      out += "\t" + (it == r.dev_eer.end() ? std::string("-") : FormatDouble(it->second));
    }
    out += "\n";
  }
  return out;
}

std::vector<StepRecord> TrainLog::ParseSteps(std::string_view text,
                                             const std::string& origin) {
  std::vector<StepRecord> rows;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    const auto f = internal::SplitTabs(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (f.size() != 8) throw Error(ErrorKind::kFormat, where + ": expected 8 fields");
    try {
      StepRecord r;
      r.epoch = internal::ParseUnsigned("epoch", f[0]);
      r.step = internal::ParseUnsigned("step", f[1]);
      r.learning_rate = internal::ParseDouble("learning_rate", f[2]);
      r.loss.triplet_spk = internal::ParseDouble("L_Tspk", f[3]);
      r.loss.triplet_utt = internal::ParseDouble("L_Tutt", f[4]);
      r.loss.nll_spk = internal::ParseDouble("L_spk", f[5]);
      r.loss.nll_utt = internal::ParseDouble("L_utt", f[6]);
      r.loss.total = internal::ParseDouble("L_total", f[7]);
      rows.push_back(r);
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, where + ": " + e.what());
    }
  }
  return rows;
}

void SgdMomentum::Step(SudaParams& params) {
  std::vector<NamedTensor> named = params.Named();
  if (velocity_.empty()) {
    for (const NamedTensor& p : named) velocity_.emplace_back(p.tensor.size(), 0.0);
  }
  if (velocity_.size() != named.size()) {
    throw Error(ErrorKind::kDimension, "optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    ad::Tensor& t = named[i].tensor;
    if (!t.has_grad()) continue;
    std::span<double> value = t.mutable_values();
    std::span<const double> grad = t.grad();
    std::vector<double>& v = velocity_[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      v[k] = momentum_ * v[k] + grad[k];
      value[k] -= learning_rate_ * v[k];
    }
  }
}

LossTerms BatchLoss(const SudaParams& params, const SudaConfig& config,
                    std::span<const TrainingExample* const> batch,
                    std::mt19937_64& rng, double margin) {
  std::vector<BranchActivations> acts;
  std::vector<std::size_t> speakers, phrases;
  acts.reserve(batch.size());
  for (const TrainingExample* ex : batch) {
    acts.push_back(Forward(ex->features, params, config));
    speakers.push_back(ex->speaker);
    phrases.push_back(ex->phrase);
  }
  return TotalLoss(acts, speakers, phrases, rng, margin);
}

double ClipGradients(SudaParams& params, double max_norm) {
  std::vector<NamedTensor> named = params.Named();
  double sq = 0.0;
  for (const NamedTensor& p : named) {
    for (double g : p.tensor.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (NamedTensor& p : named) {
      if (!p.tensor.has_grad()) continue;
      for (double& g : p.tensor.mutable_grad()) g *= scale;
    }
  }
  return norm;
}

TrainResult Train(const RunConfig& run, SudaConfig model, const TrainingSet& data,
                  const DevEvaluator& dev, const StepObserver& observer) {
  run.Validate();
  if (data.examples.empty()) throw Error(ErrorKind::kEmptyInput, "no training examples");
  model.n_speakers = data.speakers.size();
  model.n_phrases = data.phrases.size();
  model.Validate();

  TrainResult result{model, InitParams(model, run.seed), {}};
  SudaParams& params = result.params;
  SgdMomentum optimizer(run.learning_rate, run.momentum);
  std::mt19937_64 shuffle_rng = Stream(run.seed, 1);
  std::mt19937_64 mining_rng = Stream(run.seed, 2);

  std::vector<const TrainingExample*> order;
  for (const TrainingExample& ex : data.examples) order.push_back(&ex);

  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale_epochs = 0;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= run.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += run.batch_size) {
      const std::size_t end = std::min(order.size(), begin + run.batch_size);
      const std::span<const TrainingExample* const> batch(order.data() + begin, end - begin);
      params.ZeroGrad();
      const LossTerms terms = BatchLoss(params, model, batch, mining_rng, run.triplet_margin);
      ad::Backward(terms.total);
      ClipGradients(params, run.grad_clip);
      optimizer.Step(params);
      CheckFinite(params);

      StepRecord record{epoch, ++step, optimizer.learning_rate(), terms.Values()};
      result.log.steps.push_back(record);
      if (observer) observer(record);
      loss_sum += record.loss.total;
      ++n_batches;
    }

    EpochRecord summary;
    summary.epoch = epoch;
    summary.mean_loss = loss_sum / static_cast<double>(n_batches);
    summary.learning_rate = optimizer.learning_rate();
    if (dev && run.dev_eval) summary.dev_eer = dev(params, model);
    result.log.epochs.push_back(summary);

    if (summary.mean_loss < best_loss) {
      best_loss = summary.mean_loss;
      stale_epochs = 0;
    } else if (++stale_epochs >= run.lr_patience) {
      optimizer.set_learning_rate(optimizer.learning_rate() * 0.5);
      stale_epochs = 0;
    }
  }
  params.ZeroGrad();
  return result;
}

}  // namespace suda
