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

#include "suda/frontend.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "suda/error.hpp"

namespace suda {

namespace {

// The FFTW planner is not re-entrant.
std::mutex g_fftw_planner_mutex;

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::size_t FrameLength(int sample_rate, double ms) {
  return static_cast<std::size_t>(std::lround(sample_rate * ms / 1000.0));
}

std::size_t NumFrames(std::size_t num_samples, std::size_t frame_length,
                      std::size_t shift) {
  if (num_samples < frame_length) {
    throw Error(ErrorKind::kUtteranceTooShort,
                std::to_string(num_samples) + " samples is shorter than one " +
                    std::to_string(frame_length) + "-sample frame");
  }
  return (num_samples - frame_length) / shift + 1;
}

ad::Tensor FrameSignal(const Waveform& wave, const FrontendOptions& opts) {
  const std::size_t len = FrameLength(wave.sample_rate, opts.frame_ms);
  const std::size_t shift = FrameLength(wave.sample_rate, opts.shift_ms);
  const std::size_t nf = NumFrames(wave.samples.size(), len, shift);
  std::vector<double> window(len);
  for (std::size_t n = 0; n < len; ++n) {
    window[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (len - 1));
  }
  std::vector<double> out(nf * len);
  for (std::size_t f = 0; f < nf; ++f) {
    const double* x = wave.samples.data() + f * shift;
    double* y = out.data() + f * len;
    // First sample is emphasized against itself.
    for (std::size_t n = len; n-- > 1;) y[n] = x[n] - opts.preemphasis * x[n - 1];
    y[0] = x[0] - opts.preemphasis * x[0];
    for (std::size_t n = 0; n < len; ++n) y[n] *= window[n];
  }
  return ad::Tensor({nf, len}, std::move(out));
}

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t num_bins, std::size_t fft_size,
                             int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  const double mel_hi = HzToMel(nyquist);
  edges_hz_.resize(num_bins + 2);
  for (std::size_t i = 0; i < num_bins + 2; ++i) {
    edges_hz_[i] = MelToHz(mel_hi * i / static_cast<double>(num_bins + 1));
  }
  centers_hz_.assign(edges_hz_.begin() + 1, edges_hz_.end() - 1);
  const std::size_t nbins = fft_size / 2 + 1;
  weights_.assign(num_bins, std::vector<double>(nbins, 0.0));
  for (std::size_t j = 0; j < num_bins; ++j) {
    const double lo = HzToMel(edges_hz_[j]);
    const double mid = HzToMel(edges_hz_[j + 1]);
    const double hi = HzToMel(edges_hz_[j + 2]);
    for (std::size_t k = 0; k < nbins; ++k) {
      const double mel = HzToMel(k * static_cast<double>(sample_rate) / fft_size);
      if (mel > lo && mel < hi) {
        weights_[j][k] = mel <= mid ? (mel - lo) / (mid - lo) : (hi - mel) / (hi - mid);
      }
    }
  }
}

std::vector<double> MelFilterbank::Apply(const std::vector<double>& power) const {
  std::vector<double> out(weights_.size(), 0.0);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) acc += weights_[j][k] * power[k];
    out[j] = acc;
  }
  return out;
}

ad::Tensor PowerSpectrum(const ad::Tensor& frames, std::size_t fft_size) {
  const std::size_t nf = frames.dim(0), len = frames.dim(1);
  if (len > fft_size) {
    throw Error(ErrorKind::kDimension, "frame length " + std::to_string(len) +
                                           " exceeds FFT size " +
                                           std::to_string(fft_size));
  }
  const std::size_t nbins = fft_size / 2 + 1;
  std::unique_ptr<double, FftwDeleter> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * fft_size)));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size), in.get(), spec.get(),
                                FFTW_ESTIMATE);
  }
  std::vector<double> out(nf * nbins);
  for (std::size_t f = 0; f < nf; ++f) {
    std::fill(in.get(), in.get() + fft_size, 0.0);
    std::copy_n(frames.values().data() + f * len, len, in.get());
    fftw_execute(plan);
    for (std::size_t k = 0; k < nbins; ++k) {
      const double re = spec.get()[k][0], im = spec.get()[k][1];
      out[f * nbins + k] = re * re + im * im;
    }
  }
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  return ad::Tensor({nf, nbins}, std::move(out));
}

ad::Tensor MelEnergies(const ad::Tensor& frames, int sample_rate,
                       const FrontendOptions& opts) {
  ad::Tensor power = PowerSpectrum(frames, opts.fft_size);
  const std::size_t nf = power.dim(0), nbins = power.dim(1);
  MelFilterbank bank(opts.num_mel_bins, opts.fft_size, sample_rate);
  std::vector<double> out(nf * opts.num_mel_bins);
  std::vector<double> row(nbins);
  for (std::size_t f = 0; f < nf; ++f) {
    std::copy_n(power.values().data() + f * nbins, nbins, row.begin());
    std::vector<double> e = bank.Apply(row);
    std::copy(e.begin(), e.end(), out.begin() + f * opts.num_mel_bins);
  }
  return ad::Tensor({nf, opts.num_mel_bins}, std::move(out));
}

ad::Tensor Mfcc(const ad::Tensor& frames, int sample_rate,
                const FrontendOptions& opts) {
  ad::Tensor energies = MelEnergies(frames, sample_rate, opts);
  const std::size_t nf = energies.dim(0), nm = opts.num_mel_bins;
  const std::size_t nc = opts.num_ceps;
  if (nc > nm) {
    throw Error(ErrorKind::kConfig, "more cepstra than mel bins requested");
  }
  std::vector<double> basis(nc * nm);
  for (std::size_t k = 0; k < nc; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / nm);
    for (std::size_t n = 0; n < nm; ++n) {
      basis[k * nm + n] =
          scale * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) / (2.0 * nm));
    }
  }
  std::vector<double> out(nf * nc);
  std::vector<double> logs(nm);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t n = 0; n < nm; ++n) {
      logs[n] = std::log(std::max(energies.at(f * nm + n), opts.log_floor));
    }
    for (std::size_t k = 0; k < nc; ++k) {
      double acc = 0.0;
      for (std::size_t n = 0; n < nm; ++n) acc += basis[k * nm + n] * logs[n];
      out[f * nc + k] = acc;
    }
  }
  return ad::Tensor({nf, nc}, std::move(out));
}

namespace {

std::vector<double> Regress(const std::vector<double>& x, std::size_t rows,
                            std::size_t cols, int window) {
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;
  std::vector<double> out(rows * cols, 0.0);
  const auto last = static_cast<long>(rows) - 1;
  for (std::size_t t = 0; t < rows; ++t) {
    for (int k = 1; k <= window; ++k) {
      const std::size_t ahead = std::min<long>(long(t) + k, last);
      const std::size_t behind = std::max<long>(long(t) - k, 0);
      for (std::size_t c = 0; c < cols; ++c) {
        out[t * cols + c] += k * (x[ahead * cols + c] - x[behind * cols + c]);
      }
    }
    for (std::size_t c = 0; c < cols; ++c) out[t * cols + c] /= denom;
  }
  return out;
}

}  // namespace

ad::Tensor AddDeltas(const ad::Tensor& x, int window) {
  if (x.rank() != 2) throw Error(ErrorKind::kDimension, "add_deltas: need [NF x d]");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  std::vector<double> base(x.values().begin(), x.values().end());
  std::vector<double> delta = Regress(base, rows, cols, window);
  std::vector<double> accel = Regress(delta, rows, cols, window);
  std::vector<double> out(rows * cols * 3);
  for (std::size_t t = 0; t < rows; ++t) {
    double* row = out.data() + t * cols * 3;
    std::copy_n(base.data() + t * cols, cols, row);
    std::copy_n(delta.data() + t * cols, cols, row + cols);
    std::copy_n(accel.data() + t * cols, cols, row + 2 * cols);
  }
  return ad::Tensor({rows, cols * 3}, std::move(out));
}

ad::Tensor Cmvn(const ad::Tensor& x, double variance_floor) {
  if (x.rank() != 2) throw Error(ErrorKind::kDimension, "cmvn: need [NF x d]");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  std::vector<double> out(x.values().begin(), x.values().end());
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < rows; ++t) mean += out[t * cols + c];
    mean /= rows;
    double var = 0.0;
    for (std::size_t t = 0; t < rows; ++t) {
      const double d = out[t * cols + c] - mean;
      var += d * d;
    }
    var /= rows;
    const double inv_std = 1.0 / std::sqrt(std::max(var, variance_floor));
    for (std::size_t t = 0; t < rows; ++t) {
      out[t * cols + c] = (out[t * cols + c] - mean) * inv_std;
    }
  }
  return ad::Tensor({rows, cols}, std::move(out));
}

FeatureMatrix ExtractFeatures(const Waveform& wave, const FrontendOptions& opts) {
  ad::Tensor frames = FrameSignal(wave, opts);
  return Cmvn(AddDeltas(Mfcc(frames, wave.sample_rate, opts), opts.delta_window),
              opts.variance_floor);
}

}  // namespace suda
