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

#include "suda/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "suda/error.hpp"

namespace suda::ad {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::span<double> internal::Node::GradBuffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Tensor::FromBuffer(Shape shape, Buffer values, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw Error(ErrorKind::kDimension,
                  "zero-length axis in shape " + ShapeToString(shape));
    }
  }
  if (NumElements(shape) != values.size()) {
    throw Error(ErrorKind::kDimension,
                "shape " + ShapeToString(shape) + " does not match " +
                    std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : node_(FromBuffer(std::move(shape), Buffer(values.begin(), values.end()),
                       requires_grad).node_) {}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  Buffer v(NumElements(shape), 0.0);
  return FromBuffer(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

double Tensor::item() const {
  if (size() != 1) {
    throw Error(ErrorKind::kDimension,
                "item() on tensor of shape " + ShapeToString(shape()));
  }
  return node_->value[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  if (rank() != 2 || row >= dim(0) || col >= dim(1)) {
    throw Error(ErrorKind::kOutOfRange, "index out of range");
  }
  return node_->value[row * dim(1) + col];
}

void Tensor::set_requires_grad(bool on) { node_->requires_grad = on; }

void Tensor::ZeroGrad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::Detach(bool requires_grad) const {
  return FromBuffer(node_->shape, node_->value, requires_grad);
}

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace {

using internal::Node;

// Post-order DFS without recursion; LSTM graphs built step by step can be
// thousands of nodes deep.
std::vector<Node*> TopologicalOrder(std::span<const Tensor> roots) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  for (const Tensor& root : roots) {
    Node* r = root.node().get();
    if (!r->requires_grad || visited.count(r)) continue;
    visited.insert(r);
    stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->parents.size()) {
        Node* p = node->parents[next++].get();
        if (p->requires_grad && !visited.count(p)) {
          visited.insert(p);
          stack.emplace_back(p, 0);
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }
  return order;
}

}  // namespace

void Backward(std::span<const Tensor> roots,
              std::span<const std::vector<double>> seeds) {
  if (roots.size() != seeds.size()) {
    throw Error(ErrorKind::kDimension, "backward: roots/seeds count mismatch");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!roots[i].defined() || seeds[i].size() != roots[i].size()) {
      throw Error(ErrorKind::kDimension, "backward: seed shape mismatch");
    }
  }
  std::vector<Node*> order = TopologicalOrder(roots);
  for (Node* n : order) {
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    Node* r = roots[i].node().get();
    if (!r->requires_grad) continue;
    std::span<double> g = r->GradBuffer();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += seeds[i][k];
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->is_leaf()) n->backward(*n);
  }
  for (Node* n : order) {
    if (!n->is_leaf()) Buffer().swap(n->grad);
  }
}

void Backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw Error(ErrorKind::kDimension,
                "backward requires a scalar root, got " +
                    (loss.defined() ? ShapeToString(loss.shape())
                                    : std::string("undefined")));
  }
  std::vector<double> seed{1.0};
  Backward(std::span<const Tensor>(&loss, 1),
           std::span<const std::vector<double>>(&seed, 1));
}

}  // namespace suda::ad
