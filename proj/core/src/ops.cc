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

#include "suda/ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "suda/error.hpp"

namespace suda::ad {

namespace {

using internal::Node;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

using BackwardFn = std::function<void(Node&)>;

void Require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kDimension, std::string(op) + ": " + what);
}

Tensor MakeResult(const char* op, Shape shape, Buffer value,
                  std::initializer_list<const Tensor*> inputs,
                  BackwardFn backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNonFinite, std::string(op) + " produced " +
                                             std::to_string(v));
    }
  }
  Tensor out = Tensor::FromBuffer(std::move(shape), std::move(value));
  bool track = false;
  if (GradEnabled()) {
    for (const Tensor* t : inputs) track = track || t->requires_grad();
  }
  if (track) {
    Node& n = *out.node();
    n.requires_grad = true;
    n.op = op;
    for (const Tensor* t : inputs) n.parents.push_back(t->node());
    n.backward = std::move(backward);
  }
  return out;
}

Tensor MakeResult(const char* op, Shape shape, Buffer value,
                  std::span<const Tensor> inputs, BackwardFn backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNonFinite, std::string(op) + " produced " +
                                             std::to_string(v));
    }
  }
  Tensor out = Tensor::FromBuffer(std::move(shape), std::move(value));
  bool track = false;
  if (GradEnabled()) {
    for (const Tensor& t : inputs) track = track || t.requires_grad();
  }
  if (track) {
    Node& n = *out.node();
    n.requires_grad = true;
    n.op = op;
    for (const Tensor& t : inputs) n.parents.push_back(t.node());
    n.backward = std::move(backward);
  }
  return out;
}

Node& Parent(Node& n, std::size_t i) { return *n.parents[i]; }

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  Require(a.shape() == b.shape(), op,
          "shape mismatch " + ShapeToString(a.shape()) + " vs " +
              ShapeToString(b.shape()));
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  Require(a.rank() == 2 && b.rank() == 2, "matmul", "operands must be rank 2");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Require(b.dim(0) == k, "matmul",
          "inner dimensions differ: " + ShapeToString(a.shape()) + " x " +
              ShapeToString(b.shape()));
  Buffer out(m * n);
  MatMap(out.data(), m, n).noalias() =
      ConstMatMap(a.values().data(), m, k) * ConstMatMap(b.values().data(), k, n);
  return MakeResult("matmul", {m, n}, std::move(out), {&a, &b},
                    [m, k, n](Node& self) {
                      ConstMatMap dc(self.grad.data(), m, n);
                      Node& pa = Parent(self, 0);
                      Node& pb = Parent(self, 1);
                      if (pa.requires_grad) {
                        MatMap(pa.GradBuffer().data(), m, k).noalias() +=
                            dc * ConstMatMap(pb.value.data(), k, n).transpose();
                      }
                      if (pb.requires_grad) {
                        MatMap(pb.GradBuffer().data(), k, n).noalias() +=
                            ConstMatMap(pa.value.data(), m, k).transpose() * dc;
                      }
                    });
}

Tensor Transpose(const Tensor& x) {
  Require(x.rank() == 2, "transpose", "operand must be rank 2");
  const std::size_t r = x.dim(0), c = x.dim(1);
  Buffer out(r * c);
  MatMap(out.data(), c, r) = ConstMatMap(x.values().data(), r, c).transpose();
  return MakeResult("transpose", {c, r}, std::move(out), {&x},
                    [r, c](Node& self) {
                      MatMap(Parent(self, 0).GradBuffer().data(), r, c) +=
                          ConstMatMap(self.grad.data(), c, r).transpose();
                    });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape("add", a, b);
  Buffer out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return MakeResult("add", a.shape(), std::move(out), {&a, &b},
                    [](Node& self) {
                      for (std::size_t p = 0; p < 2; ++p) {
                        Node& par = Parent(self, p);
                        if (!par.requires_grad) continue;
                        auto g = par.GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] += self.grad[i];
                        }
                      }
                    });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape("sub", a, b);
  Buffer out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return MakeResult("sub", a.shape(), std::move(out), {&a, &b},
                    [](Node& self) {
                      Node& pa = Parent(self, 0);
                      Node& pb = Parent(self, 1);
                      if (pa.requires_grad) {
                        auto g = pa.GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] += self.grad[i];
                        }
                      }
                      if (pb.requires_grad) {
                        auto g = pb.GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] -= self.grad[i];
                        }
                      }
                    });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape("mul", a, b);
  Buffer out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return MakeResult("mul", a.shape(), std::move(out), {&a, &b},
                    [](Node& self) {
                      Node& pa = Parent(self, 0);
                      Node& pb = Parent(self, 1);
                      if (pa.requires_grad) {
                        auto g = pa.GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] += self.grad[i] * pb.value[i];
                        }
                      }
                      if (pb.requires_grad) {
                        auto g = pb.GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] += self.grad[i] * pa.value[i];
                        }
                      }
                    });
}

Tensor Scale(const Tensor& x, double factor) {
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * x.at(i);
  return MakeResult("scale", x.shape(), std::move(out), {&x},
                    [factor](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] += factor * self.grad[i];
                      }
                    });
}

Tensor OneMinus(const Tensor& x) {
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 - x.at(i);
  return MakeResult("one_minus", x.shape(), std::move(out), {&x},
                    [](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] -= self.grad[i];
                      }
                    });
}

Tensor Sigmoid(const Tensor& x) {
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = StableSigmoid(x.at(i));
  return MakeResult("sigmoid", x.shape(), std::move(out), {&x},
                    [](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        const double y = self.value[i];
                        g[i] += self.grad[i] * y * (1.0 - y);
                      }
                    });
}

Tensor Tanh(const Tensor& x) {
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x.at(i));
  return MakeResult("tanh", x.shape(), std::move(out), {&x},
                    [](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        const double y = self.value[i];
                        g[i] += self.grad[i] * (1.0 - y * y);
                      }
                    });
}

Tensor Relu(const Tensor& x) {
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x.at(i));
  return MakeResult("relu", x.shape(), std::move(out), {&x},
                    [](Node& self) {
                      Node& p = Parent(self, 0);
                      auto g = p.GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        if (p.value[i] > 0.0) g[i] += self.grad[i];
                      }
                    });
}

Tensor PRelu(const Tensor& x, const Tensor& slope) {
  Require(x.rank() == 1 || x.rank() == 2, "prelu", "input must be [C] or [C x T]");
  Require(slope.rank() == 1 && slope.dim(0) == x.dim(0), "prelu",
          "slope must be [C] with C = " + std::to_string(x.dim(0)));
  const std::size_t channels = x.dim(0);
  const std::size_t steps = x.rank() == 2 ? x.dim(1) : 1;
  Buffer out(x.size());
  for (std::size_t c = 0; c < channels; ++c) {
    const double a = slope.at(c);
    for (std::size_t t = 0; t < steps; ++t) {
      const double v = x.at(c * steps + t);
      out[c * steps + t] = v > 0.0 ? v : a * v;
    }
  }
  return MakeResult(
      "prelu", x.shape(), std::move(out), {&x, &slope},
      [channels, steps](Node& self) {
        Node& px = Parent(self, 0);
        Node& pa = Parent(self, 1);
        if (px.requires_grad) {
          auto g = px.GradBuffer();
          for (std::size_t c = 0; c < channels; ++c) {
            const double a = pa.value[c];
            for (std::size_t t = 0; t < steps; ++t) {
              const std::size_t i = c * steps + t;
              g[i] += px.value[i] > 0.0 ? self.grad[i] : a * self.grad[i];
            }
          }
        }
        if (pa.requires_grad) {
          auto g = pa.GradBuffer();
          for (std::size_t c = 0; c < channels; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < steps; ++t) {
              const std::size_t i = c * steps + t;
              acc += std::min(px.value[i], 0.0) * self.grad[i];
            }
            g[c] += acc;
          }
        }
      });
}

namespace {

// cols[(ci * K + k), t] = x[ci, t + k]
RowMat Im2Col(const double* x, std::size_t c_in, std::size_t steps,
              std::size_t kernel) {
  const std::size_t out_steps = steps - kernel + 1;
  RowMat cols(c_in * kernel, out_steps);
  for (std::size_t ci = 0; ci < c_in; ++ci) {
    for (std::size_t k = 0; k < kernel; ++k) {
      const double* src = x + ci * steps + k;
      double* dst = cols.data() + (ci * kernel + k) * out_steps;
      std::copy(src, src + out_steps, dst);
    }
  }
  return cols;
}

}  // namespace

Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  Require(x.rank() == 2, "conv1d", "input must be [C_in x T]");
  Require(weight.rank() == 3, "conv1d", "weight must be [C_out x C_in x K]");
  const std::size_t c_in = x.dim(0), steps = x.dim(1);
  const std::size_t c_out = weight.dim(0), kernel = weight.dim(2);
  Require(weight.dim(1) == c_in, "conv1d",
          "weight expects " + std::to_string(weight.dim(1)) +
              " input channels, got " + std::to_string(c_in));
  Require(bias.rank() == 1 && bias.dim(0) == c_out, "conv1d",
          "bias must be [C_out]");
  if (steps < kernel) {
    throw Error(ErrorKind::kUtteranceTooShort,
                "conv1d needs at least " + std::to_string(kernel) +
                    " frames, got " + std::to_string(steps));
  }
  const std::size_t out_steps = steps - kernel + 1;
  const std::size_t patch = c_in * kernel;
  RowMat cols = Im2Col(x.values().data(), c_in, steps, kernel);
  Buffer out(c_out * out_steps);
  MatMap y(out.data(), c_out, out_steps);
  y.noalias() = ConstMatMap(weight.values().data(), c_out, patch) * cols;
  y.colwise() += ConstVecMap(bias.values().data(), c_out);
  return MakeResult(
      "conv1d", {c_out, out_steps}, std::move(out), {&x, &weight, &bias},
      [c_in, steps, c_out, kernel, out_steps, patch](Node& self) {
        Node& px = Parent(self, 0);
        Node& pw = Parent(self, 1);
        Node& pb = Parent(self, 2);
        ConstMatMap dy(self.grad.data(), c_out, out_steps);
        if (pw.requires_grad) {
          RowMat cols = Im2Col(px.value.data(), c_in, steps, kernel);
          MatMap(pw.GradBuffer().data(), c_out, patch).noalias() +=
              dy * cols.transpose();
        }
        if (pb.requires_grad) {
          VecMap(pb.GradBuffer().data(), c_out) += dy.rowwise().sum();
        }
        if (px.requires_grad) {
          RowMat dcols =
              ConstMatMap(pw.value.data(), c_out, patch).transpose() * dy;
          auto g = px.GradBuffer();
          for (std::size_t ci = 0; ci < c_in; ++ci) {
            for (std::size_t k = 0; k < kernel; ++k) {
              const double* src = dcols.data() + (ci * kernel + k) * out_steps;
              double* dst = g.data() + ci * steps + k;
              for (std::size_t t = 0; t < out_steps; ++t) dst[t] += src[t];
            }
          }
        }
      });
}

Tensor MeanOverTime(const Tensor& x) {
  Require(x.rank() == 2, "mean_over_time", "input must be [C x T]");
  const std::size_t channels = x.dim(0), steps = x.dim(1);
  Buffer out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double acc = 0.0;
    for (std::size_t t = 0; t < steps; ++t) acc += x.at(c * steps + t);
    out[c] = acc / static_cast<double>(steps);
  }
  return MakeResult("mean_over_time", {channels}, std::move(out), {&x},
                    [channels, steps](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      const double inv = 1.0 / static_cast<double>(steps);
                      for (std::size_t c = 0; c < channels; ++c) {
                        const double d = self.grad[c] * inv;
                        for (std::size_t t = 0; t < steps; ++t) {
                          g[c * steps + t] += d;
                        }
                      }
                    });
}

Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  Require(x.rank() == 1, "linear", "input must be rank 1");
  Require(weight.rank() == 2 && weight.dim(1) == x.dim(0), "linear",
          "weight " + ShapeToString(weight.shape()) + " incompatible with input " +
              ShapeToString(x.shape()));
  const std::size_t m = weight.dim(0), n = weight.dim(1);
  Require(bias.rank() == 1 && bias.dim(0) == m, "linear", "bias must be [m]");
  Buffer out(m);
  VecMap y(out.data(), m);
  y.noalias() = ConstMatMap(weight.values().data(), m, n) *
                ConstVecMap(x.values().data(), n);
  y += ConstVecMap(bias.values().data(), m);
  return MakeResult(
      "linear", {m}, std::move(out), {&x, &weight, &bias}, [m, n](Node& self) {
        Node& px = Parent(self, 0);
        Node& pw = Parent(self, 1);
        Node& pb = Parent(self, 2);
        ConstVecMap dy(self.grad.data(), m);
        if (px.requires_grad) {
          VecMap(px.GradBuffer().data(), n).noalias() +=
              ConstMatMap(pw.value.data(), m, n).transpose() * dy;
        }
        if (pw.requires_grad) {
          MatMap(pw.GradBuffer().data(), m, n).noalias() +=
              dy * ConstVecMap(px.value.data(), n).transpose();
        }
        if (pb.requires_grad) VecMap(pb.GradBuffer().data(), m) += dy;
      });
}

Tensor LogSoftmax(const Tensor& x) {
  Require(x.rank() == 1, "log_softmax", "input must be rank 1");
  const double peak = *std::max_element(x.values().begin(), x.values().end());
  double acc = 0.0;
  for (double v : x.values()) acc += std::exp(v - peak);
  const double log_z = peak + std::log(acc);
  Buffer out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.at(i) - log_z;
  return MakeResult("log_softmax", x.shape(), std::move(out), {&x},
                    [](Node& self) {
                      double total = 0.0;
                      for (double d : self.grad) total += d;
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] += self.grad[i] - std::exp(self.value[i]) * total;
                      }
                    });
}

Tensor Sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return MakeResult("sum", {1}, {acc}, {&x}, [](Node& self) {
    auto g = Parent(self, 0).GradBuffer();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor Pick(const Tensor& x, std::size_t index) {
  if (index >= x.size()) {
    throw Error(ErrorKind::kOutOfRange,
                "pick index " + std::to_string(index) + " outside " +
                    ShapeToString(x.shape()));
  }
  return MakeResult("pick", {1}, {x.at(index)}, {&x}, [index](Node& self) {
    Parent(self, 0).GradBuffer()[index] += self.grad[0];
  });
}

Tensor Slice(const Tensor& x, std::size_t begin, std::size_t length) {
  Require(x.rank() == 1, "slice", "input must be rank 1");
  if (length == 0 || begin + length > x.size()) {
    throw Error(ErrorKind::kOutOfRange, "slice outside " + ShapeToString(x.shape()));
  }
  Buffer out(x.values().begin() + begin,
                          x.values().begin() + begin + length);
  return MakeResult("slice", {length}, std::move(out), {&x},
                    [begin, length](Node& self) {
                      auto g = Parent(self, 0).GradBuffer();
                      for (std::size_t i = 0; i < length; ++i) {
                        g[begin + i] += self.grad[i];
                      }
                    });
}

Tensor SquaredDistance(const Tensor& a, const Tensor& b) {
  RequireSameShape("squared_distance", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.at(i) - b.at(i);
    acc += d * d;
  }
  return MakeResult("squared_distance", {1}, {acc}, {&a, &b}, [](Node& self) {
    Node& pa = Parent(self, 0);
    Node& pb = Parent(self, 1);
    const double s = 2.0 * self.grad[0];
    if (pa.requires_grad) {
      auto g = pa.GradBuffer();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += s * (pa.value[i] - pb.value[i]);
      }
    }
    if (pb.requires_grad) {
      auto g = pb.GradBuffer();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] -= s * (pa.value[i] - pb.value[i]);
      }
    }
  });
}

Tensor AddN(std::span<const Tensor> terms) {
  if (terms.empty()) throw Error(ErrorKind::kEmptyInput, "add_n of nothing");
  for (const Tensor& t : terms) RequireSameShape("add_n", terms[0], t);
  Buffer out(terms[0].values().begin(), terms[0].values().end());
  for (std::size_t k = 1; k < terms.size(); ++k) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += terms[k].at(i);
  }
  return MakeResult("add_n", terms[0].shape(), std::move(out), terms,
                    [](Node& self) {
                      for (auto& p : self.parents) {
                        if (!p->requires_grad) continue;
                        auto g = p->GradBuffer();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          g[i] += self.grad[i];
                        }
                      }
                    });
}

}  // namespace suda::ad
