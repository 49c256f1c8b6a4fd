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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "suda/error.hpp"
#include "suda/scoring.hpp"

namespace suda {
namespace {

TEST(CosineScore, ClosedForms) {
  const std::vector<double> a = {1, 0}, b = {1, 1}, c = {0, 2};
  EXPECT_DOUBLE_EQ(CosineScore(b, b), 1.0);
  EXPECT_DOUBLE_EQ(CosineScore(a, c), 0.0);
  EXPECT_NEAR(CosineScore(a, b), 1.0 / std::sqrt(2.0), 1e-15);
  const std::vector<double> zero = {0, 0};
  EXPECT_THROW(CosineScore(a, zero), Error);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(CosineScore(a, three), Error);
}

TEST(Fuse, ConvexCombination) {
  EXPECT_EQ(Fuse(0.8, 0.2, 1.0), 0.8);
  EXPECT_EQ(Fuse(0.8, 0.2, 0.0), 0.2);
  EXPECT_DOUBLE_EQ(Fuse(0.8, 0.2, 0.5), 0.5);
  EXPECT_THROW(Fuse(0.1, 0.1, 1.5), Error);
  EXPECT_THROW(Fuse(0.1, 0.1, -0.01), Error);
}

TEST(ComputeEer, HandFixtures) {
  const std::vector<double> t0 = {1.0, 0.9}, n0 = {0.1, 0.2};
  EXPECT_EQ(ComputeEer(t0, n0).eer_percent, 0.0);
  const std::vector<double> t1 = {0.8, 0.2}, n1 = {0.7, 0.1};
  EXPECT_EQ(ComputeEer(t1, n1).eer_percent, 50.0);
  const std::vector<double> same = {0.3, 0.5, 0.9};
  EXPECT_EQ(ComputeEer(same, same).eer_percent, 50.0);
  const std::vector<double> none;
  EXPECT_THROW(ComputeEer(none, n0), Error);
  EXPECT_THROW(ComputeEer(t0, none), Error);
}

TEST(ComputeEer, AgreesWithBruteForceSweep) {
  std::mt19937_64 rng(2020);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> size(1, 60);
    std::uniform_int_distribution<int> grid(0, 20);  // coarse grid forces ties
    std::normal_distribution<double> noise(0.0, 1.0);
    const bool tied = trial % 2 == 0;
    auto draw = [&](double shift) {
      std::vector<double> v(size(rng));
      for (double& x : v) x = tied ? grid(rng) / 10.0 + shift : noise(rng) + shift;
      return v;
    };
    const std::vector<double> t = draw(0.5), n = draw(0.0);
    const EerResult got = ComputeEer(t, n);
    const testing::SweepEer want = testing::BruteForceEer(t, n);
    EXPECT_EQ(got.eer_percent, want.eer_percent);
    EXPECT_EQ(got.threshold, want.threshold);
  }
}

TEST(ComputeEer, Invariances) {
  const std::vector<double> t = testing::RandomVector(40, 1, 0.0, 2.0);
  const std::vector<double> n = testing::RandomVector(70, 2, -1.0, 1.0);
  const EerResult base = ComputeEer(t, n);
  EXPECT_GE(base.eer_percent, 0.0);
  EXPECT_LE(base.eer_percent, 50.0);

  auto transform = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(3.0 * x) + 1.0;
    return v;
  };
  EXPECT_EQ(ComputeEer(transform(t), transform(n)).eer_percent, base.eer_percent);

  std::vector<double> ts = t, ns = n;
  std::mt19937_64 rng(3);
  std::shuffle(ts.begin(), ts.end(), rng);
  std::shuffle(ns.begin(), ns.end(), rng);
  const EerResult shuffled = ComputeEer(ts, ns);
  EXPECT_EQ(shuffled.eer_percent, base.eer_percent);
  EXPECT_EQ(shuffled.threshold, base.threshold);
  EXPECT_EQ(base.n_target, 40u);
  EXPECT_EQ(base.n_nontarget, 70u);
}

ScoreRecord Record(TrialCategory c, double s_spk, double s_utt) {
  ScoreRecord r;
  r.trial = {"spk0_phr0", "u", c};
  r.s_spk = s_spk;
  r.s_utt = s_utt;
  r.fused = Fuse(s_spk, s_utt, 0.5);
  return r;
}

TEST(EvalCondition, SelectsTargetAndNamedCategory) {
  const std::vector<ScoreRecord> scores = {
      Record(TrialCategory::kTC, 0.9, 0.9), Record(TrialCategory::kTC, 0.8, 0.8),
      Record(TrialCategory::kIC, 0.1, 0.9), Record(TrialCategory::kTW, 0.9, 0.1),
      Record(TrialCategory::kIW, 0.95, 0.95)};
  EXPECT_EQ(EvalCondition(scores, Condition::kIC).eer_percent, 0.0);
  EXPECT_EQ(EvalCondition(scores, Condition::kIC).n_nontarget, 1u);
  // The lone non-target outscores both targets: FAR = FRR = 1 between 0.9 and 0.95.
  EXPECT_EQ(EvalCondition(scores, Condition::kIW).eer_percent, 100.0);
  const std::vector<ScoreRecord> no_tw(scores.begin(), scores.begin() + 3);
  EXPECT_THROW(EvalCondition(no_tw, Condition::kTW), Error);
}

TEST(ScoreFile, SixDecimalsAndRoundTrip) {
  const std::vector<ScoreRecord> scores = {Record(TrialCategory::kTC, 0.123456789, -0.5)};
  const std::string text = FormatScores(scores);
  EXPECT_EQ(text, "spk0_phr0\tu\tTC\t0.123457\t-0.500000\t-0.188272\n");
  const auto back = ParseScores(text, "mem");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].trial, scores[0].trial);
  EXPECT_EQ(FormatScores(back), text);
  EXPECT_THROW(ParseScores("a\tb\tTC\t0.1\n", "bad"), Error);
}

TEST(EerReport, KeyValueLine) {
  const std::vector<double> t = {0.8, 0.2}, n = {0.7, 0.1};
  const std::string line = FormatEerReport("IC", ComputeEer(t, n));
  EXPECT_NE(line.find("condition=IC"), std::string::npos);
  EXPECT_NE(line.find("eer_percent=50.000000"), std::string::npos);
  EXPECT_NE(line.find("n_target=2"), std::string::npos);
  EXPECT_NE(line.find("n_nontarget=2"), std::string::npos);
}

}  // namespace
}  // namespace suda
