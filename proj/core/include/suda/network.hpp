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

#ifndef SUDA_NETWORK_HPP_
#define SUDA_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "suda/frontend.hpp"
#include "suda/lstm.hpp"
#include "suda/tensor.hpp"

namespace suda {

// Architecture of the dual-branch network:
//
//   features [NF x 60]
//     -> shared LSTM                          [NF x shared_hidden]
//     -> speaker LSTM | utterance LSTM        [NF x branch_hidden] each
//     -> transpose, conv k=5 -> PReLU -> conv k=1   fm_s | fm_u [C x NF-4]
//     -> mask_s = 1 - sigmoid(fm_u), mask_u = 1 - sigmoid(fm_s)
//     -> fm * mask -> mean over time          emb_s | emb_u [C]
//     -> linear + log-softmax                 speaker | phrase log-probs
//
// With masks_enabled = false the mask step is skipped (masked = fm), which is
// the mod-SUV ablation. Masks carry no parameters, so both modes share one
// parameter layout.
struct SudaConfig {
  std::size_t input_dim = kFeatureDim;
  std::size_t shared_hidden = 256;
  std::size_t branch_hidden = 256;
  std::size_t conv_channels = 512;
  std::size_t conv_kernel = 5;
  std::size_t conv_pad = 0;
  std::size_t conv_stride = 1;
  std::size_t embedding_dim = 512;
  std::size_t n_speakers = 2;
  std::size_t n_phrases = 2;
  bool masks_enabled = true;

  // Throws Error(kConfig) naming the offending field.
  void Validate() const;

  std::map<std::string, std::string> ToKeyValues() const;
  // Applies every recognized key; returns the keys it did not recognize.
  std::vector<std::string> ApplyKeyValues(
      const std::map<std::string, std::string>& kv);

  bool operator==(const SudaConfig&) const = default;
};

// Kernel of the second (pointwise) convolution. Keeping it at 1 preserves the
// NF' = NF - 4 time length of the k=5 layer.
inline constexpr std::size_t kPointwiseKernel = 1;

struct BranchParams {
  ad::LstmWeights lstm;
  ad::Tensor conv1_weight;  // [C x branch_hidden x 5]
  ad::Tensor conv1_bias;    // [C]
  ad::Tensor prelu_slope;   // [C]
  ad::Tensor conv2_weight;  // [C x C x 1]
  ad::Tensor conv2_bias;    // [C]
  ad::Tensor fc_weight;     // [classes x C]
  ad::Tensor fc_bias;       // [classes]
};

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

struct SudaParams {
  ad::LstmWeights shared;
  BranchParams speaker;
  BranchParams utterance;

  // Stable order used for checkpoints and optimizer state.
  std::vector<NamedTensor> Named() const;
  std::size_t Count() const;
  void ZeroGrad();
  // Deep copy with fresh leaves (no shared gradient buffers).
  SudaParams Clone() const;
};

std::size_t ParameterCount(const SudaConfig& config);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except the
// LSTM forget gate (+1), PReLU slopes 0.25. Deterministic in seed.
SudaParams InitParams(const SudaConfig& config, std::uint64_t seed);

struct BranchActivations {
  ad::Tensor fm_s, fm_u;          // [C x NF']
  ad::Tensor mask_s, mask_u;      // [C x NF'], undefined when masks are off
  ad::Tensor masked_s, masked_u;  // [C x NF']
  ad::Tensor emb_s, emb_u;        // [C]
  ad::Tensor log_probs_s;         // [n_speakers]
  ad::Tensor log_probs_u;         // [n_phrases]
};

// mask_s = 1 - sigmoid(fm_u), mask_u = 1 - sigmoid(fm_s).
std::pair<ad::Tensor, ad::Tensor> ComputeMasks(const ad::Tensor& fm_s,
                                               const ad::Tensor& fm_u);
ad::Tensor ApplyMasks(const ad::Tensor& fm, const ad::Tensor& mask);

// Test seam: called with the two final feature maps before masking; may
// replace either.
using FeatureMapHook = std::function<void(ad::Tensor& fm_s, ad::Tensor& fm_u)>;

// NF < 5 throws kUtteranceTooShort.
BranchActivations Forward(const FeatureMatrix& features, const SudaParams& params,
                          const SudaConfig& config,
                          const FeatureMapHook& hook = {});

// Forward with the masking block removed regardless of config.masks_enabled.
BranchActivations ForwardModSuv(const FeatureMatrix& features,
                                const SudaParams& params, SudaConfig config);

enum class Branch { kSpeaker, kUtterance };

// Post-pooling, pre-classifier embedding of one branch.
ad::Tensor Embed(const FeatureMatrix& features, const SudaParams& params,
                 const SudaConfig& config, Branch branch);

}  // namespace suda

#endif  // SUDA_NETWORK_HPP_
