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

#include "suda/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "suda/error.hpp"
#include "text_util.hpp"

namespace suda {

double CosineScore(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::kDimension, "cosine of vectors with lengths " +
                                           std::to_string(a.size()) + " and " +
                                           std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::kOutOfRange, "cosine score of a zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double Fuse(double s_spk, double s_utt, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kOutOfRange,
                "fusion weight alpha=" + std::to_string(alpha) + " outside [0, 1]");
  }
  return alpha * s_spk + (1.0 - alpha) * s_utt;
}

EerResult ComputeEer(std::span<const double> targets,
                     std::span<const double> nontargets) {
  if (targets.empty() || nontargets.empty()) {
    throw Error(ErrorKind::kEmptyInput, "EER needs both target and non-target scores");
  }
  std::vector<double> tar(targets.begin(), targets.end());
  std::vector<double> non(nontargets.begin(), nontargets.end());
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());

  std::vector<double> distinct;
  distinct.reserve(tar.size() + non.size());
  std::merge(tar.begin(), tar.end(), non.begin(), non.end(),
             std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (i > 0) candidates.push_back((distinct[i - 1] + distinct[i]) / 2.0);
    candidates.push_back(distinct[i]);
  }

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  EerResult best;
  best.n_target = tar.size();
  best.n_nontarget = non.size();
  double best_gap = 2.0;
  // Candidates ascend, so the two lower_bound cursors only move forward.
  auto tar_it = tar.begin();
  auto non_it = non.begin();
  for (double t : candidates) {
    while (tar_it != tar.end() && *tar_it < t) ++tar_it;
    while (non_it != non.end() && *non_it < t) ++non_it;
    const double frr = static_cast<double>(tar_it - tar.begin()) / nt;
    const double far = static_cast<double>(non.end() - non_it) / nn;
    const double gap = std::abs(far - frr);
    if (gap < best_gap) {
      best_gap = gap;
      best.threshold = t;
      best.far = far;
      best.frr = frr;
      best.eer_percent = 100.0 * (far + frr) / 2.0;
    }
  }
  return best;
}

EerResult EvalCondition(std::span<const ScoreRecord> scores, Condition condition) {
  const TrialCategory wanted = NonTargetCategory(condition);
  std::vector<double> targets, nontargets;
  for (const ScoreRecord& r : scores) {
    if (r.trial.category == TrialCategory::kTC) targets.push_back(r.fused);
    else if (r.trial.category == wanted) nontargets.push_back(r.fused);
  }
  if (targets.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no TC trials in score list");
  }
  if (nontargets.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no " + std::string(CategoryName(wanted)) +
                                            " trials in score list");
  }
  return ComputeEer(targets, nontargets);
}

std::string FormatScores(std::span<const ScoreRecord> scores) {
  std::string out;
  char buf[96];
  for (const ScoreRecord& r : scores) {
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f\t%.6f\n", r.s_spk, r.s_utt, r.fused);
    out += r.trial.model + '\t' + r.trial.test_utt + '\t' +
           std::string(CategoryName(r.trial.category)) + buf;
  }
  return out;
}

std::vector<ScoreRecord> ParseScores(std::string_view text, const std::string& origin) {
  std::vector<ScoreRecord> scores;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (internal::Trim(line).empty()) continue;
    const auto f = internal::SplitTabs(internal::Trim(line));
    const std::string where = origin + ":" + std::to_string(line_no);
    if (f.size() != 6) {
      throw Error(ErrorKind::kFormat, where + ": expected 6 tab-separated fields");
    }
    try {
      ScoreRecord r;
      r.trial = {f[0], f[1], ParseCategory(f[2])};
      r.s_spk = internal::ParseDouble("s_spk", f[3]);
      r.s_utt = internal::ParseDouble("s_utt", f[4]);
      r.fused = internal::ParseDouble("fused", f[5]);
      scores.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, where + ": " + e.what());
    }
  }
  return scores;
}

void WriteScores(const std::filesystem::path& path, std::span<const ScoreRecord> scores) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << FormatScores(scores);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<ScoreRecord> ReadScores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open score file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseScores(text, path.string());
}

std::string FormatEerReport(std::string_view condition, const EerResult& result) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "condition=%.*s eer_percent=%.6f threshold=%.6f n_target=%zu "
                "n_nontarget=%zu",
                static_cast<int>(condition.size()), condition.data(), result.eer_percent,
                result.threshold, result.n_target, result.n_nontarget);
  return buf;
}

}  // namespace suda
