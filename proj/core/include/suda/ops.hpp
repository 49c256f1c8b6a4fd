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

#ifndef SUDA_OPS_HPP_
#define SUDA_OPS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "suda/tensor.hpp"

// Differentiable operations. Shapes are checked strictly; the only
// broadcasting is the per-channel bias / slope in Conv1d, PRelu and Linear.
// Any op that yields NaN/Inf throws Error(kNonFinite).
namespace suda::ad {

// [m x k] x [k x n] -> [m x n]
Tensor MatMul(const Tensor& a, const Tensor& b);
// [m x n] -> [n x m]
Tensor Transpose(const Tensor& x);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, double factor);
// 1 - x
Tensor OneMinus(const Tensor& x);

Tensor Sigmoid(const Tensor& x);
Tensor Tanh(const Tensor& x);
Tensor Relu(const Tensor& x);

// x: [C x T] (or [C]); slope: [C]. Per-channel leaky slope for x <= 0.
Tensor PRelu(const Tensor& x, const Tensor& slope);

// Valid cross-correlation along time, stride 1, no padding.
// x: [C_in x T], weight: [C_out x C_in x K], bias: [C_out]
// -> [C_out x (T - K + 1)]. T < K throws kUtteranceTooShort.
Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Global average pooling over the time axis: [C x T] -> [C].
Tensor MeanOverTime(const Tensor& x);

// weight: [m x n], x: [n], bias: [m] -> [m]
Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor LogSoftmax(const Tensor& x);

// Reductions and selections returning shape [1] unless noted.
Tensor Sum(const Tensor& x);
Tensor Pick(const Tensor& x, std::size_t index);
// Rank-1 slice [begin, begin + length).
Tensor Slice(const Tensor& x, std::size_t begin, std::size_t length);
Tensor SquaredDistance(const Tensor& a, const Tensor& b);
// Elementwise sum of same-shaped tensors, left to right.
Tensor AddN(std::span<const Tensor> terms);

}  // namespace suda::ad

#endif  // SUDA_OPS_HPP_
