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

#ifndef SUDA_FRONTEND_HPP_
#define SUDA_FRONTEND_HPP_

#include <cstddef>
#include <vector>

#include "suda/tensor.hpp"
#include "suda/wav.hpp"

namespace suda {

// NF x 60 matrix: 20 cepstra, 20 deltas, 20 delta-deltas per frame.
using FeatureMatrix = ad::Tensor;

inline constexpr std::size_t kFeatureDim = 60;

struct FrontendOptions {
  double frame_ms = 20.0;
  double shift_ms = 10.0;
  double preemphasis = 0.97;
  std::size_t fft_size = 512;
  std::size_t num_mel_bins = 26;
  std::size_t num_ceps = 20;
  double log_floor = 1e-10;
  int delta_window = 2;
  double variance_floor = 1e-10;
};

std::size_t FrameLength(int sample_rate, double ms);
// floor((num_samples - frame_length) / shift) + 1; throws kUtteranceTooShort
// when num_samples < frame_length.
std::size_t NumFrames(std::size_t num_samples, std::size_t frame_length,
                      std::size_t shift);

// [NF x frame_length]; each frame pre-emphasized then Hamming-windowed.
ad::Tensor FrameSignal(const Waveform& wave, const FrontendOptions& opts = {});

// Triangular filters equally spaced on the mel scale between 0 Hz and
// Nyquist, defined over FFT bins 0..fft_size/2.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t num_bins, std::size_t fft_size, int sample_rate);

  std::size_t num_bins() const { return centers_hz_.size(); }
  const std::vector<double>& centers_hz() const { return centers_hz_; }
  // Lower and upper edges (Hz) of filter i.
  double left_hz(std::size_t i) const { return edges_hz_[i]; }
  double right_hz(std::size_t i) const { return edges_hz_[i + 2]; }

  // power: fft_size/2+1 values -> num_bins energies.
  std::vector<double> Apply(const std::vector<double>& power) const;

 private:
  std::vector<double> edges_hz_;
  std::vector<double> centers_hz_;
  std::vector<std::vector<double>> weights_;
};

double HzToMel(double hz);
double MelToHz(double mel);

// [NF x (fft/2+1)] power spectra of already windowed frames.
ad::Tensor PowerSpectrum(const ad::Tensor& frames, std::size_t fft_size);
// [NF x num_mel_bins] linear filterbank energies.
ad::Tensor MelEnergies(const ad::Tensor& frames, int sample_rate,
                       const FrontendOptions& opts = {});
// [NF x num_ceps]: orthonormal DCT-II of floored log mel energies, c0..c19.
ad::Tensor Mfcc(const ad::Tensor& frames, int sample_rate,
                const FrontendOptions& opts = {});

// [NF x d] -> [NF x 3d] with regression deltas over +-window frames
// (edge frames replicated).
ad::Tensor AddDeltas(const ad::Tensor& x, int window = 2);

// Per-column utterance mean/variance normalization.
ad::Tensor Cmvn(const ad::Tensor& x, double variance_floor = 1e-10);

// Full pipeline: frame, MFCC, deltas, CMVN.
FeatureMatrix ExtractFeatures(const Waveform& wave,
                              const FrontendOptions& opts = {});

}  // namespace suda

#endif  // SUDA_FRONTEND_HPP_
