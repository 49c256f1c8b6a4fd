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

#ifndef SUDA_TENSOR_HPP_
#define SUDA_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace suda::ad {

using Shape = std::vector<std::size_t>;

// Packet-aligned storage. Eigen picks its reduction order from the runtime
// alignment of each buffer, so a fixed alignment keeps sums reproducible
// regardless of allocation history.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace internal {

// One vertex of the tape. Leaves have no backward function; interior nodes
// keep their parents alive and read their own grad to fill the parents'.
struct Node {
  Shape shape;
  Buffer value;
  Buffer grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }
  // Lazily allocates a zeroed gradient buffer.
  std::span<double> GradBuffer();
};

}  // namespace internal

// Dense row-major float64 tensor. Copies are shallow: two Tensor handles may
// refer to the same tape node, which is how parameters are shared between
// graphs.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor FromBuffer(Shape shape, Buffer values, bool requires_grad = false);
  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  // Writing through this on a tensor that is already part of a recorded
  // graph invalidates that graph's saved activations.
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t i) const { return node_->value.at(i); }
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on);

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->GradBuffer(); }
  void ZeroGrad();

  // Value copy with no tape history.
  Tensor Detach(bool requires_grad = false) const;

  const std::shared_ptr<internal::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<internal::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<internal::Node> node_;
};

// Gradient recording is on by default; the guard disables it for the current
// thread, e.g. for inference.
bool GradEnabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Reverse-mode sweep from a scalar root with seed 1. Leaf gradients
// accumulate across calls; interior gradients are scratch and are released.
void Backward(const Tensor& loss);

// Multi-root form: each root receives the matching seed gradient.
void Backward(std::span<const Tensor> roots,
              std::span<const std::vector<double>> seeds);

}  // namespace suda::ad

#endif  // SUDA_TENSOR_HPP_
