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

#ifndef SUDA_SCORING_HPP_
#define SUDA_SCORING_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "suda/protocol.hpp"

namespace suda {

inline constexpr double kDefaultFusionAlpha = 0.5;

// dot(a, b) / (|a| |b|). Zero-norm input raises kOutOfRange.
double CosineScore(std::span<const double> a, std::span<const double> b);

// alpha * s_spk + (1 - alpha) * s_utt, alpha in [0, 1].
double Fuse(double s_spk, double s_utt, double alpha);

struct ScoreRecord {
  Trial trial;
  double s_spk = 0.0;
  double s_utt = 0.0;
  double fused = 0.0;
};

struct EerResult {
  double eer_percent = 0.0;
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

// Threshold sweep over every distinct score and the midpoints between
// neighbouring distinct scores, with FRR(t) = P(target < t) and
// FAR(t) = P(nontarget >= t). Picks the threshold minimizing |FAR - FRR|
// (lowest threshold on ties) and reports (FAR + FRR) / 2 as a percentage.
EerResult ComputeEer(std::span<const double> targets,
                     std::span<const double> nontargets);

// TC fused scores against the condition's non-target category.
EerResult EvalCondition(std::span<const ScoreRecord> scores, Condition condition);

// model \t test_utt \t category \t s_spk \t s_utt \t fused, 6 decimals.
std::string FormatScores(std::span<const ScoreRecord> scores);
std::vector<ScoreRecord> ParseScores(std::string_view text, const std::string& origin);
void WriteScores(const std::filesystem::path& path, std::span<const ScoreRecord> scores);
std::vector<ScoreRecord> ReadScores(const std::filesystem::path& path);

// "condition=IC eer_percent=... threshold=... n_target=... n_nontarget=..."
std::string FormatEerReport(std::string_view condition, const EerResult& result);

}  // namespace suda

#endif  // SUDA_SCORING_HPP_
