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

#ifndef SUDA_LOSSES_HPP_
#define SUDA_LOSSES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "suda/network.hpp"
#include "suda/tensor.hpp"

namespace suda {

inline constexpr double kDefaultTripletMargin = 0.2;

struct TripletIndex {
  std::size_t anchor;
  std::size_t positive;
  std::size_t negative;
};

struct TripletBatch {
  std::vector<ad::Tensor> anchors;
  std::vector<ad::Tensor> positives;
  std::vector<ad::Tensor> negatives;

  bool empty() const { return anchors.empty(); }
  std::size_t size() const { return anchors.size(); }
};

// Every item in batch order that has at least one other item with its label
// and one with a different label becomes an anchor; its positive and negative
// are drawn uniformly from those candidates. Returns an empty list when no
// anchor qualifies.
std::vector<TripletIndex> MineTriplets(std::span<const std::size_t> labels,
                                       std::mt19937_64& rng);

TripletBatch GatherTriplets(std::span<const ad::Tensor> embeddings,
                            std::span<const TripletIndex> triplets);

// mean over triples of max(0, |a-p|^2 - |a-n|^2 + margin). Empty -> kEmptyInput.
ad::Tensor TripletLoss(const TripletBatch& batch,
                       double margin = kDefaultTripletMargin);

// -log_probs[target]; target >= size -> kOutOfRange.
ad::Tensor NllLoss(const ad::Tensor& log_probs, std::size_t target);

// Plain values of one step's four loss terms and their sum.
struct LossBundle {
  double triplet_spk = 0.0;
  double triplet_utt = 0.0;
  double nll_spk = 0.0;
  double nll_utt = 0.0;
  double total = 0.0;
};

struct LossTerms {
  ad::Tensor triplet_spk;
  ad::Tensor triplet_utt;
  ad::Tensor nll_spk;
  ad::Tensor nll_utt;
  ad::Tensor total;  // ((triplet_spk + triplet_utt) + nll_spk) + nll_utt

  LossBundle Values() const;
};

// Triplets are mined from speaker labels first, then phrase labels, with the
// same generator. A branch with no valid triple contributes 0.
LossTerms TotalLoss(std::span<const BranchActivations> acts,
                    std::span<const std::size_t> speaker_labels,
                    std::span<const std::size_t> phrase_labels,
                    std::mt19937_64& rng, double margin = kDefaultTripletMargin);

}  // namespace suda

#endif  // SUDA_LOSSES_HPP_
