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

#include "suda/network.hpp"

#include <cmath>
#include <random>

#include "suda/error.hpp"
#include "suda/ops.hpp"
#include "text_util.hpp"

namespace suda {

using ad::Tensor;

void SudaConfig::Validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::kConfig, field + ": " + why);
  };
  if (input_dim == 0) fail("input_dim", "must be positive");
  if (shared_hidden == 0) fail("shared_hidden", "must be positive");
  if (branch_hidden == 0) fail("branch_hidden", "must be positive");
  if (conv_channels == 0) fail("conv_channels", "must be positive");
  if (conv_kernel != 5) fail("conv_kernel", "is fixed at 5");
  if (conv_pad != 0) fail("conv_pad", "is fixed at 0");
  if (conv_stride != 1) fail("conv_stride", "is fixed at 1");
  if (embedding_dim != conv_channels) {
    fail("embedding_dim", "must equal conv_channels (pooling keeps channel count)");
  }
  if (n_speakers < 2) fail("n_speakers", "needs at least 2 classes");
  if (n_phrases < 2) fail("n_phrases", "needs at least 2 classes");
}

std::map<std::string, std::string> SudaConfig::ToKeyValues() const {
  return {
      {"input_dim", std::to_string(input_dim)},
      {"shared_hidden", std::to_string(shared_hidden)},
      {"branch_hidden", std::to_string(branch_hidden)},
      {"conv_channels", std::to_string(conv_channels)},
      {"conv_kernel", std::to_string(conv_kernel)},
      {"conv_pad", std::to_string(conv_pad)},
      {"conv_stride", std::to_string(conv_stride)},
      {"embedding_dim", std::to_string(embedding_dim)},
      {"n_speakers", std::to_string(n_speakers)},
      {"n_phrases", std::to_string(n_phrases)},
      {"masks_enabled", masks_enabled ? "true" : "false"},
  };
}

std::vector<std::string> SudaConfig::ApplyKeyValues(
    const std::map<std::string, std::string>& kv) {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : kv) {
    std::size_t* target = nullptr;
    if (key == "input_dim") target = &input_dim;
    else if (key == "shared_hidden") target = &shared_hidden;
    else if (key == "branch_hidden") target = &branch_hidden;
    else if (key == "conv_channels") target = &conv_channels;
    else if (key == "conv_kernel") target = &conv_kernel;
    else if (key == "conv_pad") target = &conv_pad;
    else if (key == "conv_stride") target = &conv_stride;
    else if (key == "embedding_dim") target = &embedding_dim;
    else if (key == "n_speakers") target = &n_speakers;
    else if (key == "n_phrases") target = &n_phrases;

    if (target) {
      *target = internal::ParseUnsigned(key, value);
    } else if (key == "masks_enabled") {
      masks_enabled = internal::ParseBool(key, value);
    } else {
      unknown.push_back(key);
    }
  }
  return unknown;
}

namespace {

void AppendLstm(std::vector<NamedTensor>& out, const std::string& prefix,
                const ad::LstmWeights& w) {
  out.push_back({prefix + ".w_ih", w.w_ih});
  out.push_back({prefix + ".w_hh", w.w_hh});
  out.push_back({prefix + ".bias", w.bias});
}

void AppendBranch(std::vector<NamedTensor>& out, const std::string& prefix,
                  const BranchParams& b) {
  AppendLstm(out, prefix + ".lstm", b.lstm);
  out.push_back({prefix + ".conv1.weight", b.conv1_weight});
  out.push_back({prefix + ".conv1.bias", b.conv1_bias});
  out.push_back({prefix + ".prelu.slope", b.prelu_slope});
  out.push_back({prefix + ".conv2.weight", b.conv2_weight});
  out.push_back({prefix + ".conv2.bias", b.conv2_bias});
  out.push_back({prefix + ".fc.weight", b.fc_weight});
  out.push_back({prefix + ".fc.bias", b.fc_bias});
}

ad::LstmWeights CloneLstm(const ad::LstmWeights& w) {
  return {w.w_ih.Detach(true), w.w_hh.Detach(true), w.bias.Detach(true)};
}

BranchParams CloneBranch(const BranchParams& b) {
  return {CloneLstm(b.lstm),           b.conv1_weight.Detach(true),
          b.conv1_bias.Detach(true),   b.prelu_slope.Detach(true),
          b.conv2_weight.Detach(true), b.conv2_bias.Detach(true),
          b.fc_weight.Detach(true),    b.fc_bias.Detach(true)};
}

class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}

  Tensor Uniform(ad::Shape shape, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> v(ad::NumElements(shape));
    for (double& x : v) x = dist(rng_);
    return Tensor(std::move(shape), std::move(v), true);
  }

  static Tensor Constant(ad::Shape shape, double value) {
    std::vector<double> v(ad::NumElements(shape), value);
    return Tensor(std::move(shape), std::move(v), true);
  }

  ad::LstmWeights Lstm(std::size_t input, std::size_t hidden) {
    ad::LstmWeights w;
    w.w_ih = Uniform({4 * hidden, input}, input);
    w.w_hh = Uniform({4 * hidden, hidden}, hidden);
    std::vector<double> bias(4 * hidden, 0.0);
    for (std::size_t k = hidden; k < 2 * hidden; ++k) bias[k] = 1.0;
    w.bias = Tensor({4 * hidden}, std::move(bias), true);
    return w;
  }

  BranchParams Branch(const SudaConfig& c, std::size_t classes) {
    BranchParams b;
    const std::size_t ch = c.conv_channels;
    b.lstm = Lstm(c.shared_hidden, c.branch_hidden);
    b.conv1_weight =
        Uniform({ch, c.branch_hidden, c.conv_kernel}, c.branch_hidden * c.conv_kernel);
    b.conv1_bias = Constant({ch}, 0.0);
    b.prelu_slope = Constant({ch}, 0.25);
    b.conv2_weight = Uniform({ch, ch, kPointwiseKernel}, ch * kPointwiseKernel);
    b.conv2_bias = Constant({ch}, 0.0);
    b.fc_weight = Uniform({classes, ch}, ch);
    b.fc_bias = Constant({classes}, 0.0);
    return b;
  }

 private:
  std::mt19937_64 rng_;
};

Tensor BranchFeatureMap(const Tensor& shared_out, const BranchParams& b) {
  Tensor h = ad::LstmForward(shared_out, b.lstm);
  Tensor x = ad::Transpose(h);
  Tensor y = ad::Conv1d(x, b.conv1_weight, b.conv1_bias);
  y = ad::PRelu(y, b.prelu_slope);
  return ad::Conv1d(y, b.conv2_weight, b.conv2_bias);
}

}  // namespace

std::vector<NamedTensor> SudaParams::Named() const {
  std::vector<NamedTensor> out;
  AppendLstm(out, "shared.lstm", shared);
  AppendBranch(out, "speaker", speaker);
  AppendBranch(out, "utterance", utterance);
  return out;
}

std::size_t SudaParams::Count() const {
  std::size_t n = 0;
  for (const auto& p : Named()) n += p.tensor.size();
  return n;
}

void SudaParams::ZeroGrad() {
  for (auto& p : Named()) p.tensor.ZeroGrad();
}

SudaParams SudaParams::Clone() const {
  return {CloneLstm(shared), CloneBranch(speaker), CloneBranch(utterance)};
}

std::size_t ParameterCount(const SudaConfig& c) {
  auto lstm = [](std::size_t in, std::size_t h) { return 4 * h * (in + h + 1); };
  auto branch = [&](std::size_t classes) {
    const std::size_t ch = c.conv_channels;
    return lstm(c.shared_hidden, c.branch_hidden) +
           ch * c.branch_hidden * c.conv_kernel + ch + ch +
           ch * ch * kPointwiseKernel + ch + classes * ch + classes;
  };
  return lstm(c.input_dim, c.shared_hidden) + branch(c.n_speakers) +
         branch(c.n_phrases);
}

SudaParams InitParams(const SudaConfig& config, std::uint64_t seed) {
  config.Validate();
  Initializer init(seed);
  SudaParams p;
  p.shared = init.Lstm(config.input_dim, config.shared_hidden);
  p.speaker = init.Branch(config, config.n_speakers);
  p.utterance = init.Branch(config, config.n_phrases);
  return p;
}

std::pair<Tensor, Tensor> ComputeMasks(const Tensor& fm_s, const Tensor& fm_u) {
  if (fm_s.shape() != fm_u.shape()) {
    throw Error(ErrorKind::kDimension,
                "feature maps differ in shape: " + ad::ShapeToString(fm_s.shape()) +
                    " vs " + ad::ShapeToString(fm_u.shape()));
  }
  Tensor mask_s = ad::OneMinus(ad::Sigmoid(fm_u));
  Tensor mask_u = ad::OneMinus(ad::Sigmoid(fm_s));
  return {mask_s, mask_u};
}

Tensor ApplyMasks(const Tensor& fm, const Tensor& mask) { return ad::Mul(fm, mask); }

BranchActivations Forward(const FeatureMatrix& features, const SudaParams& params,
                          const SudaConfig& config, const FeatureMapHook& hook) {
  if (features.rank() != 2 || features.dim(1) != config.input_dim) {
    throw Error(ErrorKind::kDimension,
                "features must be [NF x " + std::to_string(config.input_dim) +
                    "], got " + ad::ShapeToString(features.shape()));
  }
  if (features.dim(0) < config.conv_kernel) {
    throw Error(ErrorKind::kUtteranceTooShort,
                std::to_string(features.dim(0)) + " frames; need at least " +
                    std::to_string(config.conv_kernel));
  }
  BranchActivations a;
  Tensor shared = ad::LstmForward(features, params.shared);
  a.fm_s = BranchFeatureMap(shared, params.speaker);
  a.fm_u = BranchFeatureMap(shared, params.utterance);
  if (hook) hook(a.fm_s, a.fm_u);

  if (config.masks_enabled) {
    std::tie(a.mask_s, a.mask_u) = ComputeMasks(a.fm_s, a.fm_u);
    a.masked_s = ApplyMasks(a.fm_s, a.mask_s);
    a.masked_u = ApplyMasks(a.fm_u, a.mask_u);
  } else {
    a.masked_s = a.fm_s;
    a.masked_u = a.fm_u;
  }
  a.emb_s = ad::MeanOverTime(a.masked_s);
  a.emb_u = ad::MeanOverTime(a.masked_u);
  a.log_probs_s = ad::LogSoftmax(
      ad::Linear(a.emb_s, params.speaker.fc_weight, params.speaker.fc_bias));
  a.log_probs_u = ad::LogSoftmax(
      ad::Linear(a.emb_u, params.utterance.fc_weight, params.utterance.fc_bias));
  return a;
}

BranchActivations ForwardModSuv(const FeatureMatrix& features,
                                const SudaParams& params, SudaConfig config) {
  config.masks_enabled = false;
  return Forward(features, params, config);
}

Tensor Embed(const FeatureMatrix& features, const SudaParams& params,
             const SudaConfig& config, Branch branch) {
  BranchActivations a = Forward(features, params, config);
  return branch == Branch::kSpeaker ? a.emb_s : a.emb_u;
}

}  // namespace suda
