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

#include "suda/losses.hpp"

#include <string>

#include "suda/error.hpp"
#include "suda/ops.hpp"

namespace suda {

using ad::Tensor;

std::vector<TripletIndex> MineTriplets(std::span<const std::size_t> labels,
                                       std::mt19937_64& rng) {
  std::vector<TripletIndex> out;
  std::vector<std::size_t> same, other;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    same.clear();
    other.clear();
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (j == a) continue;
      (labels[j] == labels[a] ? same : other).push_back(j);
    }
    if (same.empty() || other.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick_pos(0, same.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_neg(0, other.size() - 1);
    const std::size_t p = same[pick_pos(rng)];
    const std::size_t n = other[pick_neg(rng)];
    out.push_back({a, p, n});
  }
  return out;
}

TripletBatch GatherTriplets(std::span<const Tensor> embeddings,
                            std::span<const TripletIndex> triplets) {
  TripletBatch batch;
  for (const TripletIndex& t : triplets) {
    if (t.anchor >= embeddings.size() || t.positive >= embeddings.size() ||
        t.negative >= embeddings.size()) {
      throw Error(ErrorKind::kOutOfRange, "triplet index outside the batch");
    }
    batch.anchors.push_back(embeddings[t.anchor]);
    batch.positives.push_back(embeddings[t.positive]);
    batch.negatives.push_back(embeddings[t.negative]);
  }
  return batch;
}

Tensor TripletLoss(const TripletBatch& batch, double margin) {
  if (batch.empty()) throw Error(ErrorKind::kEmptyInput, "triplet loss on empty batch");
  if (batch.positives.size() != batch.size() || batch.negatives.size() != batch.size()) {
    throw Error(ErrorKind::kDimension, "triplet lists differ in length");
  }
  const Tensor margin_t = Tensor::Scalar(margin);
  std::vector<Tensor> hinges;
  hinges.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Tensor d_ap = ad::SquaredDistance(batch.anchors[i], batch.positives[i]);
    Tensor d_an = ad::SquaredDistance(batch.anchors[i], batch.negatives[i]);
    hinges.push_back(ad::Relu(ad::Add(ad::Sub(d_ap, d_an), margin_t)));
  }
  return ad::Scale(ad::AddN(hinges), 1.0 / static_cast<double>(hinges.size()));
}

Tensor NllLoss(const Tensor& log_probs, std::size_t target) {
  if (log_probs.rank() != 1) {
    throw Error(ErrorKind::kDimension, "nll_loss expects a rank-1 log-probability vector");
  }
  if (target >= log_probs.size()) {
    throw Error(ErrorKind::kOutOfRange, "target class " + std::to_string(target) +
                                            " outside " +
                                            std::to_string(log_probs.size()) +
                                            " classes");
  }
  return ad::Scale(ad::Pick(log_probs, target), -1.0);
}

LossBundle LossTerms::Values() const {
  return {triplet_spk.item(), triplet_utt.item(), nll_spk.item(), nll_utt.item(),
          total.item()};
}

namespace {

Tensor MeanNll(std::span<const Tensor> log_probs, std::span<const std::size_t> labels) {
  std::vector<Tensor> terms;
  terms.reserve(log_probs.size());
  for (std::size_t i = 0; i < log_probs.size(); ++i) {
    terms.push_back(NllLoss(log_probs[i], labels[i]));
  }
  return ad::Scale(ad::AddN(terms), 1.0 / static_cast<double>(terms.size()));
}

Tensor BranchTriplet(std::span<const Tensor> embeddings,
                     std::span<const std::size_t> labels, std::mt19937_64& rng,
                     double margin) {
  const std::vector<TripletIndex> triplets = MineTriplets(labels, rng);
  if (triplets.empty()) return Tensor::Scalar(0.0);
  return TripletLoss(GatherTriplets(embeddings, triplets), margin);
}

}  // namespace

LossTerms TotalLoss(std::span<const BranchActivations> acts,
                    std::span<const std::size_t> speaker_labels,
                    std::span<const std::size_t> phrase_labels,
                    std::mt19937_64& rng, double margin) {
  if (acts.empty()) throw Error(ErrorKind::kEmptyInput, "total loss of an empty batch");
  if (speaker_labels.size() != acts.size() || phrase_labels.size() != acts.size()) {
    throw Error(ErrorKind::kDimension, "label count does not match batch size");
  }
  std::vector<Tensor> emb_s, emb_u, lp_s, lp_u;
  for (const BranchActivations& a : acts) {
    emb_s.push_back(a.emb_s);
    emb_u.push_back(a.emb_u);
    lp_s.push_back(a.log_probs_s);
    lp_u.push_back(a.log_probs_u);
  }
  LossTerms terms;
  terms.triplet_spk = BranchTriplet(emb_s, speaker_labels, rng, margin);
  terms.triplet_utt = BranchTriplet(emb_u, phrase_labels, rng, margin);
  terms.nll_spk = MeanNll(lp_s, speaker_labels);
  terms.nll_utt = MeanNll(lp_u, phrase_labels);
  const Tensor parts[] = {terms.triplet_spk, terms.triplet_utt, terms.nll_spk,
                          terms.nll_utt};
  terms.total = ad::AddN(parts);
  return terms;
}

}  // namespace suda
