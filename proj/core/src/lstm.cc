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

#include "suda/lstm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "suda/error.hpp"
#include "suda/ops.hpp"

namespace suda::ad {

namespace {

using internal::Node;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

double Sigm(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckWeights(const LstmWeights& w, std::size_t input) {
  const bool ok = w.w_ih.rank() == 2 && w.w_hh.rank() == 2 &&
                  w.bias.rank() == 1 && w.w_hh.dim(0) == 4 * w.w_hh.dim(1) &&
                  w.w_ih.dim(0) == w.w_hh.dim(0) &&
                  w.bias.dim(0) == w.w_hh.dim(0) && w.w_ih.dim(1) == input;
  if (!ok) {
    throw Error(ErrorKind::kDimension,
                "lstm: weights " + ShapeToString(w.w_ih.shape()) + ", " +
                    ShapeToString(w.w_hh.shape()) + ", " +
                    ShapeToString(w.bias.shape()) +
                    " inconsistent with input size " + std::to_string(input));
  }
}

}  // namespace

LstmState ZeroLstmState(std::size_t hidden) {
  return {Tensor::Zeros({hidden}), Tensor::Zeros({hidden})};
}

LstmState LstmStep(const Tensor& x_t, const LstmState& prev,
                   const LstmWeights& weights) {
  if (x_t.rank() != 1) {
    throw Error(ErrorKind::kDimension, "lstm_step: x_t must be rank 1");
  }
  CheckWeights(weights, x_t.dim(0));
  const std::size_t hidden = weights.hidden();
  if (prev.h.shape() != Shape{hidden} || prev.c.shape() != Shape{hidden}) {
    throw Error(ErrorKind::kDimension, "lstm_step: state size mismatch");
  }
  Tensor zero_bias = Tensor::Zeros({4 * hidden});
  Tensor gates = Add(Linear(x_t, weights.w_ih, weights.bias),
                     Linear(prev.h, weights.w_hh, zero_bias));
  Tensor i = Sigmoid(Slice(gates, 0, hidden));
  Tensor f = Sigmoid(Slice(gates, hidden, hidden));
  Tensor g = Tanh(Slice(gates, 2 * hidden, hidden));
  Tensor o = Sigmoid(Slice(gates, 3 * hidden, hidden));
  Tensor c = Add(Mul(f, prev.c), Mul(i, g));
  Tensor h = Mul(o, Tanh(c));
  return {h, c};
}

Tensor LstmForward(const Tensor& x, const LstmWeights& weights) {
  if (x.rank() != 2) {
    throw Error(ErrorKind::kDimension, "lstm_forward: x must be [T x input]");
  }
  const std::size_t steps = x.dim(0), input = x.dim(1);
  CheckWeights(weights, input);
  const std::size_t hidden = weights.hidden();
  const std::size_t g4 = 4 * hidden;

  ConstMatMap w_hh(weights.w_hh.values().data(), g4, hidden);

  // Activated gates (i, f, g, o), cell states and tanh(c), all [T x ...].
  RowMat act(steps, g4);
  act.noalias() = ConstMatMap(x.values().data(), steps, input) *
                  ConstMatMap(weights.w_ih.values().data(), g4, input).transpose();
  act.rowwise() += ConstVecMap(weights.bias.values().data(), g4).transpose();
  RowMat cell(steps, hidden), tanh_cell(steps, hidden);
  Buffer out(steps * hidden);
  MatMap h_all(out.data(), steps, hidden);

  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd rec(g4);
  for (std::size_t t = 0; t < steps; ++t) {
    rec.noalias() = w_hh * h_prev;
    double* a = act.row(t).data();
    for (std::size_t k = 0; k < hidden; ++k) {
      const double ig = Sigm(a[k] + rec[k]);
      const double fg = Sigm(a[hidden + k] + rec[hidden + k]);
      const double gg = std::tanh(a[2 * hidden + k] + rec[2 * hidden + k]);
      const double og = Sigm(a[3 * hidden + k] + rec[3 * hidden + k]);
      a[k] = ig;
      a[hidden + k] = fg;
      a[2 * hidden + k] = gg;
      a[3 * hidden + k] = og;
      const double c = fg * c_prev[k] + ig * gg;
      const double tc = std::tanh(c);
      cell(t, k) = c;
      tanh_cell(t, k) = tc;
      h_all(t, k) = og * tc;
    }
    h_prev = h_all.row(t).transpose();
    c_prev = cell.row(t).transpose();
  }

  Tensor result = Tensor::FromBuffer({steps, hidden}, std::move(out));
  for (double v : result.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNonFinite, "lstm_forward produced " + std::to_string(v));
    }
  }
  const bool track = GradEnabled() &&
                     (x.requires_grad() || weights.w_ih.requires_grad() ||
                      weights.w_hh.requires_grad() || weights.bias.requires_grad());
  if (!track) return result;

  Node& node = *result.node();
  node.requires_grad = true;
  node.op = "lstm_forward";
  node.parents = {x.node(), weights.w_ih.node(), weights.w_hh.node(),
                  weights.bias.node()};
  node.backward = [steps, input, hidden, g4, act = std::move(act),
                   cell = std::move(cell),
                   tanh_cell = std::move(tanh_cell)](Node& self) {
    Node& px = *self.parents[0];
    Node& pih = *self.parents[1];
    Node& phh = *self.parents[2];
    Node& pb = *self.parents[3];
    ConstMatMap dh_out(self.grad.data(), steps, hidden);
    ConstMatMap h_all(self.value.data(), steps, hidden);
    ConstMatMap w_hh(phh.value.data(), g4, hidden);

    RowMat dgates(steps, g4);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(hidden);
    for (std::size_t s = steps; s-- > 0;) {
      const double* a = act.row(s).data();
      double* d = dgates.row(s).data();
      for (std::size_t k = 0; k < hidden; ++k) {
        const double ig = a[k], fg = a[hidden + k];
        const double gg = a[2 * hidden + k], og = a[3 * hidden + k];
        const double tc = tanh_cell(s, k);
        const double c_prev = s > 0 ? cell(s - 1, k) : 0.0;
        const double dh = dh_out(s, k) + dh_next[k];
        const double dc = dh * og * (1.0 - tc * tc) + dc_next[k];
        d[k] = dc * gg * ig * (1.0 - ig);
        d[hidden + k] = dc * c_prev * fg * (1.0 - fg);
        d[2 * hidden + k] = dc * ig * (1.0 - gg * gg);
        d[3 * hidden + k] = dh * tc * og * (1.0 - og);
        dc_next[k] = dc * fg;
      }
      dh_next.noalias() = w_hh.transpose() * dgates.row(s).transpose();
    }

    if (phh.requires_grad && steps > 1) {
      MatMap(phh.GradBuffer().data(), g4, hidden).noalias() +=
          dgates.bottomRows(steps - 1).transpose() * h_all.topRows(steps - 1);
    } else if (phh.requires_grad) {
      phh.GradBuffer();
    }
    if (pih.requires_grad) {
      MatMap(pih.GradBuffer().data(), g4, input).noalias() +=
          dgates.transpose() * ConstMatMap(px.value.data(), steps, input);
    }
    if (pb.requires_grad) {
      VecMap(pb.GradBuffer().data(), g4) += dgates.colwise().sum().transpose();
    }
    if (px.requires_grad) {
      MatMap(px.GradBuffer().data(), steps, input).noalias() +=
          dgates * ConstMatMap(pih.value.data(), g4, input);
    }
  };
  return result;
}

}  // namespace suda::ad
