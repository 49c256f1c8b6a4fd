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
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "suda/error.hpp"
#include "suda/protocol.hpp"

namespace suda {
namespace {

using testing::EnumeratedManifest;

std::vector<Trial> Trials(const Manifest& m, Condition c) {
  const EnrollmentSplit parts = SplitEnrollment(m);
  const std::vector<ModelId> models = EnrollmentModels(parts.enroll);
  return GenerateTrials(models, parts.test, c);
}

TEST(SplitEnrollment, ThreeEnrollSixTest) {
  const EnrollmentSplit parts = SplitEnrollment(EnumeratedManifest(2, 2));
  EXPECT_EQ(parts.enroll.size(), 12u);
  EXPECT_EQ(parts.test.size(), 24u);
  for (const Utterance& u : parts.enroll) EXPECT_TRUE(IsEnrollmentSession(u.session));
  for (const Utterance& u : parts.test) EXPECT_FALSE(IsEnrollmentSession(u.session));
  EXPECT_TRUE(SplitEnrollment({}).enroll.empty());
}

TEST(SplitEnrollment, MissingSessionIsNamed) {
  Manifest m = EnumeratedManifest(2, 2);
  m.erase(std::remove_if(m.begin(), m.end(),
                         [](const Utterance& u) {
                           return u.speaker == "spk1" && u.phrase == "phr0" && u.session == 4;
                         }),
          m.end());
  try {
    SplitEnrollment(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kManifest);
    EXPECT_NE(std::string(e.what()).find("(spk1, phr0, 4)"), std::string::npos);
  }
}

TEST(Categorize, FourWayTaxonomy) {
  const ModelId model{"spk0", "phr0"};
  auto test = [](const char* spk, const char* phr) {
    Utterance u;
    u.speaker = spk;
    u.phrase = phr;
    u.session = 2;
    return u;
  };
  EXPECT_EQ(Categorize(model, test("spk0", "phr0")), TrialCategory::kTC);
  EXPECT_EQ(Categorize(model, test("spk0", "phr1")), TrialCategory::kTW);
  EXPECT_EQ(Categorize(model, test("spk1", "phr0")), TrialCategory::kIC);
  EXPECT_EQ(Categorize(model, test("spk1", "phr1")), TrialCategory::kIW);
}

TEST(GenerateTrials, CountsMatchClosedForm) {
  for (auto [s, p] : {std::pair{3u, 2u}, std::pair{2u, 2u}, std::pair{4u, 3u}}) {
    const Manifest m = EnumeratedManifest(s, p);
    const testing::TrialCounts want = testing::ClosedFormTrialCounts(s, p);
    std::map<TrialCategory, std::size_t> got;
    for (Condition c : {Condition::kTW, Condition::kIC, Condition::kIW}) {
      std::map<TrialCategory, std::size_t> counts;
      for (const Trial& t : Trials(m, c)) ++counts[t.category];
      EXPECT_EQ(counts[TrialCategory::kTC], want.tc);
      EXPECT_EQ(counts.size(), 2u);
      got[NonTargetCategory(c)] = counts[NonTargetCategory(c)];
    }
    EXPECT_EQ(got[TrialCategory::kTW], want.tw);
    EXPECT_EQ(got[TrialCategory::kIC], want.ic);
    EXPECT_EQ(got[TrialCategory::kIW], want.iw);
  }
}

TEST(GenerateTrials, TestSessionsExcludeEnrollmentAndOrderIsStable) {
  const Manifest m = EnumeratedManifest(3, 2);
  std::set<std::string> utt_session;
  for (const Utterance& u : m) {
    if (IsEnrollmentSession(u.session)) utt_session.insert(u.utt_id);
  }
  const std::vector<Trial> trials = Trials(m, Condition::kIC);
  for (const Trial& t : trials) EXPECT_EQ(utt_session.count(t.test_utt), 0u);
  EXPECT_TRUE(std::is_sorted(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    return std::tie(a.model, a.test_utt) < std::tie(b.model, b.test_utt);
  }));
  Manifest reversed(m.rbegin(), m.rend());
  EXPECT_EQ(FormatTrials(Trials(reversed, Condition::kIC)), FormatTrials(trials));
}

TEST(TrialFile, RoundTripAndErrors) {
  const std::vector<Trial> trials = Trials(EnumeratedManifest(2, 2), Condition::kIW);
  EXPECT_EQ(ParseTrials(FormatTrials(trials), "mem"), trials);
  EXPECT_THROW(ParseTrials("a\tb\n", "bad"), Error);
  EXPECT_THROW(ParseTrials("a\tb\tXX\n", "bad"), Error);
}

TEST(Manifest, RoundTripAndValidation) {
  const Manifest m = EnumeratedManifest(2, 3, Split::kDevelopment);
  EXPECT_EQ(ParseManifest(FormatManifest(m), "mem"), m);
  EXPECT_NO_THROW(ValidateManifest(m));
  Manifest dup = m;
  dup.push_back(m.front());
  dup.back().utt_id = "other";
  EXPECT_THROW(ValidateManifest(dup), Error);
  Manifest bad_session = m;
  bad_session[0].session = 10;
  EXPECT_THROW(ValidateManifest(bad_session), Error);
  try {
    ParseManifest("u\tspk\tphr\t1\tnowhere\tp.wav\n", "m.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kManifest);
    EXPECT_NE(std::string(e.what()).find("m.tsv"), std::string::npos);
  }
}

TEST(EnrollModel, MeanThenNormalize) {
  const std::vector<std::vector<double>> same = {{3, 4}, {3, 4}, {3, 4}};
  EXPECT_EQ(EnrollModel(same), (std::vector<double>{0.6, 0.8}));
  const std::vector<std::vector<double>> cancel = {{1, -2}, {-1, 2}, {0, 0}};
  try {
    EnrollModel(cancel);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateEnrollment);
  }
  const std::vector<std::vector<double>> two = {{1, 0}, {0, 1}};
  EXPECT_THROW(EnrollModel(two), Error);

  const std::vector<std::vector<double>> r = {testing::RandomVector(5, 1),
                                              testing::RandomVector(5, 2),
                                              testing::RandomVector(5, 3)};
  std::vector<double> mean(5, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    mean[i] = (r[0][i] + r[1][i] + r[2][i]) / 3.0;
    norm += mean[i] * mean[i];
  }
  const std::vector<double> got = EnrollModel(r);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(got[i], mean[i] / std::sqrt(norm), 1e-12);
}

}  // namespace
}  // namespace suda
