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
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "suda/error.hpp"
#include "suda/feature_io.hpp"
#include "suda/frontend.hpp"
#include "suda/wav.hpp"

namespace suda {
namespace {

Waveform Noise(std::size_t n, std::uint64_t seed) {
  return {testing::RandomVector(n, seed, -0.3, 0.3), 16000};
}

Waveform Tone(double hz, std::size_t n) {
  Waveform w;
  for (std::size_t i = 0; i < n; ++i) {
    w.samples.push_back(0.5 * std::sin(2.0 * std::numbers::pi * hz * i / 16000.0));
  }
  return w;
}

std::vector<std::vector<double>> Rows(const ad::Tensor& t) {
  std::vector<std::vector<double>> rows(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t r = 0; r < t.dim(0); ++r) {
    for (std::size_t c = 0; c < t.dim(1); ++c) rows[r][c] = t.at(r, c);
  }
  return rows;
}

TEST(FrameSignal, FrameCounts) {
  EXPECT_EQ(FrameSignal(Noise(16000, 1)).dim(0), 99u);
  EXPECT_EQ(FrameSignal(Noise(320, 1)).dim(0), 1u);
  try {
    FrameSignal(Noise(319, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUtteranceTooShort);
  }
}

TEST(Mfcc, SilenceGivesIdenticalRows) {
  const Waveform silence{std::vector<double>(3200, 0.0), 16000};
  const ad::Tensor m = Mfcc(FrameSignal(silence), 16000);
  ASSERT_EQ(m.dim(1), 20u);
  for (std::size_t r = 1; r < m.dim(0); ++r) {
    for (std::size_t c = 0; c < 20; ++c) EXPECT_EQ(m.at(r, c), m.at(0, c));
  }
  // c0 of an orthonormal DCT of 26 equal values log(1e-10).
  EXPECT_NEAR(m.at(0, 0), std::sqrt(26.0) * std::log(1e-10), 1e-9);
  EXPECT_NEAR(m.at(0, 1), 0.0, 1e-9);
}

TEST(MelFilterbank, ToneLandsInBracketingFilter) {
  const MelFilterbank bank(26, 512, 16000);
  const ad::Tensor e = MelEnergies(FrameSignal(Tone(1000.0, 8000)), 16000);
  std::size_t best = 0;
  for (std::size_t b = 1; b < 26; ++b) {
    if (e.at(10, b) > e.at(10, best)) best = b;
  }
  // The two filters whose centres straddle the tone overlap at 1 kHz; spectral
  // leakage decides between them.
  std::size_t below = 0;
  while (bank.centers_hz()[below + 1] < 1000.0) ++below;
  EXPECT_TRUE(best == below || best == below + 1) << best << " vs " << below;
  EXPECT_LT(bank.left_hz(best), 1000.0);
  EXPECT_GT(bank.right_hz(best), 1000.0);
  EXPECT_NEAR(bank.right_hz(25), 8000.0, 1e-9);
}

TEST(MelScale, RoundTrip) {
  for (double hz : {0.0, 300.0, 1000.0, 7999.0}) EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
}

TEST(AddDeltas, ConstantAndRamp) {
  const ad::Tensor constant({6, 2}, std::vector<double>(12, 3.5));
  const ad::Tensor d = AddDeltas(constant);
  ASSERT_EQ(d.dim(1), 6u);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 2; c < 6; ++c) EXPECT_EQ(d.at(r, c), 0.0);
  }
  std::vector<double> ramp(9);
  for (std::size_t t = 0; t < 9; ++t) ramp[t] = static_cast<double>(t);
  const ad::Tensor r = AddDeltas(ad::Tensor({9, 1}, ramp));
  for (std::size_t t = 2; t < 7; ++t) EXPECT_DOUBLE_EQ(r.at(t, 1), 1.0);
}

TEST(AddDeltas, MatchesDirectSummation) {
  const ad::Tensor x({7, 4}, testing::RandomVector(28, 2));
  const ad::Tensor got = AddDeltas(x);
  const auto delta = testing::DeltaOracle(Rows(x), 2);
  const auto delta2 = testing::DeltaOracle(delta, 2);
  for (std::size_t t = 0; t < 7; ++t) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(got.at(t, c), x.at(t, c));
      EXPECT_NEAR(got.at(t, 4 + c), delta[t][c], 1e-12);
      EXPECT_NEAR(got.at(t, 8 + c), delta2[t][c], 1e-12);
    }
  }
}

TEST(Cmvn, Statistics) {
  const ad::Tensor x({50, 3}, testing::RandomVector(150, 3, -5.0, 9.0));
  const ad::Tensor y = Cmvn(x);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0, var = 0.0;
    for (std::size_t t = 0; t < 50; ++t) mean += y.at(t, c);
    mean /= 50;
    for (std::size_t t = 0; t < 50; ++t) var += (y.at(t, c) - mean) * (y.at(t, c) - mean);
    var /= 50;
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_LT(std::abs(var - 1.0), 1e-6);
  }
  const ad::Tensor again = Cmvn(y);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(again.at(i), y.at(i), 1e-9);
}

TEST(Cmvn, NormalizedInputUnchangedAndConstantColumnZeroed) {
  const ad::Tensor x({4, 2}, {1, 7, -1, 7, 1, 7, -1, 7});
  const ad::Tensor y = Cmvn(x);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_NEAR(y.at(t, 0), x.at(t, 0), 1e-12);
    EXPECT_EQ(y.at(t, 1), 0.0);
  }
}

TEST(Features, ShapeAndShiftProperty) {
  const Waveform w = Noise(16000 + 160, 4);
  Waveform shifted{std::vector<double>(w.samples.begin() + 160, w.samples.end()), 16000};
  const ad::Tensor a = Mfcc(FrameSignal(w), 16000);
  const ad::Tensor b = Mfcc(FrameSignal(shifted), 16000);
  ASSERT_EQ(a.dim(0), b.dim(0) + 1);
  for (std::size_t t = 0; t < b.dim(0); ++t) {
    for (std::size_t c = 0; c < 20; ++c) EXPECT_NEAR(a.at(t + 1, c), b.at(t, c), 1e-9);
  }
  const FeatureMatrix f = ExtractFeatures(w);
  EXPECT_EQ(f.dim(0), 100u);
  EXPECT_EQ(f.dim(1), kFeatureDim);
}

TEST(Feat1, DeterministicBytesAndLayout) {
  const Waveform w = QuantizeToPcm16(Noise(4000, 5));
  const std::string a = EncodeFeat1(ExtractFeatures(w));
  const std::string b = EncodeFeat1(ExtractFeatures(w));
  EXPECT_EQ(a, b);
  ASSERT_GE(a.size(), 12u);
  EXPECT_EQ(a.substr(0, 4), "FT01");
  const std::uint32_t nf = static_cast<unsigned char>(a[4]) |
                           static_cast<unsigned char>(a[5]) << 8;
  EXPECT_EQ(nf, 24u);
  EXPECT_EQ(static_cast<unsigned char>(a[8]), 60u);
  EXPECT_EQ(a.size(), 12u + 24u * 60u * 4u);
  const FeatureMatrix back = DecodeFeat1(a, "mem");
  EXPECT_EQ(EncodeFeat1(back), a);
}

TEST(Feat1, RejectsTruncatedInput) {
  const std::string bytes = EncodeFeat1(ExtractFeatures(Noise(4000, 6)));
  try {
    DecodeFeat1(bytes.substr(0, bytes.size() - 1), "short.feat");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("short.feat"), std::string::npos);
  }
}

TEST(Wav, RoundTripThroughDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "suda_wav_test";
  std::filesystem::create_directories(dir);
  const Waveform w = QuantizeToPcm16(Noise(1000, 7));
  WriteWav(dir / "a.wav", w);
  const Waveform back = ReadWav(dir / "a.wav");
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_EQ(back.samples, w.samples);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace suda
