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

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "suda/error.hpp"
#include "suda/trainer.hpp"

namespace suda {
namespace {

using testing::MicroConfig;
using testing::RandomFeatures;

// Two speakers x two phrases x three sessions with label-dependent offsets.
TrainingSet ToySet() {
  Manifest m;
  for (int s = 0; s < 2; ++s) {
    for (int p = 0; p < 2; ++p) {
      for (int k = 1; k <= 3; ++k) {
        Utterance u;
        u.speaker = "spk" + std::to_string(s);
        u.phrase = "phr" + std::to_string(p);
        u.session = k;
        u.utt_id = u.speaker + "_" + u.phrase + "_s" + std::to_string(k);
        m.push_back(u);
      }
    }
  }
  std::uint64_t seed = 0;
  return MakeTrainingSet(m, [&seed](const Utterance& u) {
    FeatureMatrix f = RandomFeatures(10, ++seed);
    const double ds = u.speaker == "spk0" ? 1.0 : -1.0;
    const double dp = u.phrase == "phr0" ? 1.0 : -1.0;
    auto v = f.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = 0.3 * v[i] + ((i % kFeatureDim) < 30 ? ds : dp);
    }
    return f;
  });
}

RunConfig ToyRun() {
  RunConfig run;
  run.model = MicroConfig();
  run.learning_rate = 0.01;
  run.batch_size = 5;
  run.epochs = 6;
  return run;
}

TEST(MakeTrainingSet, LabelsIndexSortedIds) {
  const TrainingSet set = ToySet();
  ASSERT_EQ(set.examples.size(), 12u);
  EXPECT_EQ(set.speakers, (std::vector<std::string>{"spk0", "spk1"}));
  EXPECT_EQ(set.phrases, (std::vector<std::string>{"phr0", "phr1"}));
  for (const TrainingExample& ex : set.examples) {
    EXPECT_EQ(set.speakers[ex.speaker], ex.utt_id.substr(0, 4));
    EXPECT_EQ(set.phrases[ex.phrase], ex.utt_id.substr(5, 4));
  }
  EXPECT_THROW(MakeTrainingSet({}, [](const Utterance&) { return FeatureMatrix(); }), Error);
}

TEST(SgdMomentum, MatchesHandRecurrence) {
  SudaParams params = InitParams(MicroConfig(), 1);
  ad::Tensor w = params.speaker.fc_bias;
  const std::vector<double> p0(w.values().begin(), w.values().end());
  SgdMomentum opt(0.1, 0.9);
  for (double& g : w.mutable_grad()) g = 2.0;
  opt.Step(params);
  for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_DOUBLE_EQ(w.at(i), p0[i] - 0.2);
  opt.Step(params);  // v = 0.9 * 2 + 2
  for (std::size_t i = 0; i < p0.size(); ++i) {
    EXPECT_NEAR(w.at(i), p0[i] - 0.2 - 0.38, 1e-15);
  }
}

TEST(ClipGradients, RescalesToMaxNorm) {
  SudaParams params = InitParams(MicroConfig(), 1);
  params.ZeroGrad();
  auto g = params.utterance.fc_bias.mutable_grad();
  g[0] = 3.0;
  g[1] = 4.0;
  EXPECT_DOUBLE_EQ(ClipGradients(params, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(ClipGradients(params, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(g[0], 0.6);
  EXPECT_DOUBLE_EQ(g[1], 0.8);
  EXPECT_NEAR(ClipGradients(params, 10.0), 1.0, 1e-15);
}

TEST(Train, LogsEveryStepWithExactLossIdentity) {
  const TrainingSet set = ToySet();
  std::size_t observed = 0;
  const TrainResult r = Train(ToyRun(), MicroConfig(), set, {},
                              [&observed](const StepRecord&) { ++observed; });
  ASSERT_EQ(r.log.steps.size(), 6u * 3u);  // ceil(12 / 5) batches per epoch
  EXPECT_EQ(observed, r.log.steps.size());
  for (std::size_t i = 0; i < r.log.steps.size(); ++i) {
    const StepRecord& s = r.log.steps[i];
    EXPECT_EQ(s.step, i + 1);
    EXPECT_EQ(s.epoch, i / 3 + 1);
    EXPECT_EQ(s.loss.total,
              ((s.loss.triplet_spk + s.loss.triplet_utt) + s.loss.nll_spk) + s.loss.nll_utt);
  }
  EXPECT_EQ(r.log.epochs.size(), 6u);
  EXPECT_EQ(r.config.n_speakers, 2u);
}

TEST(Train, DeterministicInSeed) {
  const TrainingSet set = ToySet();
  RunConfig run = ToyRun();
  run.epochs = 2;
  const TrainResult a = Train(run, MicroConfig(), set);
  const TrainResult b = Train(run, MicroConfig(), set);
  EXPECT_EQ(a.log.FormatSteps({}), b.log.FormatSteps({}));
  const auto na = a.params.Named();
  const auto nb = b.params.Named();
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_TRUE(std::equal(na[i].tensor.values().begin(), na[i].tensor.values().end(),
                           nb[i].tensor.values().begin()));
  }
  run.seed = 7;
  EXPECT_NE(Train(run, MicroConfig(), set).log.FormatSteps({}), a.log.FormatSteps({}));
}

TEST(Train, ReducesLossOnSeparableData) {
  RunConfig run = ToyRun();
  run.epochs = 25;
  const TrainResult r = Train(run, MicroConfig(), ToySet());
  EXPECT_LT(r.log.epochs.back().mean_loss, 0.7 * r.log.epochs.front().mean_loss);
}

TEST(Train, LearningRateOnlyHalves) {
  RunConfig run = ToyRun();
  run.learning_rate = 0.3;
  run.lr_patience = 1;
  run.epochs = 12;
  run.grad_clip = 1.0;
  const TrainResult r = Train(run, MicroConfig(), ToySet());
  double lr = run.learning_rate;
  for (const EpochRecord& e : r.log.epochs) {
    EXPECT_TRUE(e.learning_rate == lr || e.learning_rate == 0.5 * lr) << e.epoch;
    lr = e.learning_rate;
  }
}

TEST(Train, DevEvaluatorFillsEpochRecords) {
  RunConfig run = ToyRun();
  run.epochs = 2;
  int calls = 0;
  const TrainResult r = Train(run, MicroConfig(), ToySet(),
                              [&calls](const SudaParams&, const SudaConfig&) {
                                ++calls;
                                return std::map<std::string, double>{{"IC", 12.5}};
                              });
  EXPECT_EQ(calls, 2);
  EXPECT_EQ(r.log.epochs[1].dev_eer.at("IC"), 12.5);
  run.dev_eval = false;
  calls = 0;
  Train(run, MicroConfig(), ToySet(), [&calls](const SudaParams&, const SudaConfig&) {
    ++calls;
    return std::map<std::string, double>{};
  });
  EXPECT_EQ(calls, 0);
}

TEST(TrainLog, StepTableRoundTripsExactly) {
  RunConfig run = ToyRun();
  run.epochs = 1;
  const TrainResult r = Train(run, MicroConfig(), ToySet());
  const std::string text = r.log.FormatSteps({{"seed", "2020"}});
  EXPECT_EQ(text.rfind("# seed=2020\n", 0), 0u);
  const std::vector<StepRecord> back = TrainLog::ParseSteps(text, "mem");
  ASSERT_EQ(back.size(), r.log.steps.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].loss.total, r.log.steps[i].loss.total);
    EXPECT_EQ(back[i].loss.nll_utt, r.log.steps[i].loss.nll_utt);
    EXPECT_EQ(back[i].step, r.log.steps[i].step);
  }
  EXPECT_THROW(TrainLog::ParseSteps("h\n1\t2\n", "bad"), Error);
}

TEST(TrainLog, EpochTableMarksMissingDevEer) {
  TrainLog log;
  log.epochs.push_back({1, 2.5, 0.1, {{"IC", 4.0}}});
  const std::string text = log.FormatEpochs({});
  EXPECT_NE(text.find("1\t2.5\t0.1\t-\t4\t-\n"), std::string::npos);
}

}  // namespace
}  // namespace suda
