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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "suda/frontend.hpp"
#include "suda/losses.hpp"
#include "suda/network.hpp"
#include "suda/scoring.hpp"
#include "suda/synth.hpp"

namespace {

using namespace suda;

FeatureMatrix Features(std::size_t nf, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(nf * kFeatureDim);
  for (double& x : v) x = n(rng);
  return FeatureMatrix({nf, kFeatureDim}, std::move(v));
}

SudaConfig Sized(std::size_t hidden, std::size_t channels) {
  SudaConfig c;
  c.shared_hidden = hidden;
  c.branch_hidden = hidden;
  c.conv_channels = channels;
  c.embedding_dim = channels;
  c.n_speakers = 8;
  c.n_phrases = 4;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const SudaConfig config = Sized(state.range(0), state.range(1));
  const SudaParams params = InitParams(config, 1);
  const FeatureMatrix x = Features(state.range(2), 2);
  ad::NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(Forward(x, params, config).emb_s);
}
BENCHMARK(BM_Forward)->Args({32, 64, 150})->Args({256, 512, 150})->Unit(benchmark::kMillisecond);

void BM_ForwardBackwardBatch(benchmark::State& state) {
  const SudaConfig config = Sized(state.range(0), state.range(1));
  SudaParams params = InitParams(config, 1);
  std::vector<FeatureMatrix> xs;
  std::vector<std::size_t> spk, phr;
  for (std::size_t i = 0; i < 8; ++i) {
    xs.push_back(Features(150, 10 + i));
    spk.push_back(i % 4);
    phr.push_back(i / 4);
  }
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    params.ZeroGrad();
    std::vector<BranchActivations> acts;
    for (const FeatureMatrix& x : xs) acts.push_back(Forward(x, params, config));
    ad::Backward(TotalLoss(acts, spk, phr, rng).total);
  }
  state.SetItemsProcessed(state.iterations() * xs.size());
}
BENCHMARK(BM_ForwardBackwardBatch)->Args({32, 64})->Unit(benchmark::kMillisecond);

void BM_ExtractFeatures(benchmark::State& state) {
  const Waveform w = Synthesize(MakeSpeaker(2020, 0),
                                MakePhrase(2020, 0, PhraseLength::kShort), 1, 2020);
  for (auto _ : state) benchmark::DoNotOptimize(ExtractFeatures(w));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMicrosecond);

void BM_ComputeEer(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> t(state.range(0)), nt(state.range(0) * 3);
  for (double& x : t) x = n(rng) + 2.0;
  for (double& x : nt) x = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeEer(t, nt));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ComputeEer)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

}  // namespace

BENCHMARK_MAIN();
