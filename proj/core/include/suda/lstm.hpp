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

#ifndef SUDA_LSTM_HPP_
#define SUDA_LSTM_HPP_

#include <cstddef>

#include "suda/tensor.hpp"

namespace suda::ad {

// Gate rows are stacked in the order input, forget, candidate, output.
struct LstmWeights {
  Tensor w_ih;  // [4H x input]
  Tensor w_hh;  // [4H x H]
  Tensor bias;  // [4H]

  std::size_t hidden() const { return w_hh.dim(1); }
  std::size_t input() const { return w_ih.dim(1); }
};

struct LstmState {
  Tensor h;  // [H]
  Tensor c;  // [H]
};

LstmState ZeroLstmState(std::size_t hidden);

// One cell update built from primitive ops:
//   i, f, o = sigmoid(.), g = tanh(.), c' = f*c + i*g, h' = o*tanh(c')
LstmState LstmStep(const Tensor& x_t, const LstmState& prev,
                   const LstmWeights& weights);

// Whole sequence from a zero state as a single tape node with a hand-written
// BPTT backward. x: [T x input] -> H: [T x hidden]. Numerically identical to
// chaining LstmStep up to summation order.
Tensor LstmForward(const Tensor& x, const LstmWeights& weights);

}  // namespace suda::ad

#endif  // SUDA_LSTM_HPP_
