// Copyright 2026 The fpdesc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpdesc/nn/tape.hpp"

#include <cmath>
#include <string>

#include "fpdesc/error.hpp"

namespace fpdesc::nn {
namespace {

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Param Tape::bind_impl(const Tensor& tensor, Tensor* target) {
  if (auto it = binding_index_.find(&tensor); it != binding_index_.end()) {
    if (target) bindings_[it->second].target = target;
    return Param{it->second};
  }
  Binding b;
  b.target = target;
  const auto rows = static_cast<Eigen::Index>(tensor.rows());
  const auto cols = static_cast<Eigen::Index>(tensor.cols());
  b.value = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(tensor.data().data(), rows, cols)
                .cast<double>();
  bindings_.push_back(std::move(b));
  binding_index_.emplace(&tensor, bindings_.size() - 1);
  return Param{bindings_.size() - 1};
}

Param Tape::bind(Tensor& tensor) { return bind_impl(tensor, &tensor); }

Param Tape::bind(const Tensor& tensor) { return bind_impl(tensor, nullptr); }

template <typename T>
LstmWeights Tape::bind_lstm_impl(T& W, T& U, T& b) {
  const std::size_t hidden = U.cols();
  if (W.rows() != 4 * hidden || U.rows() != 4 * hidden || b.numel() != 4 * hidden) {
    throw DimensionError("lstm: weight shapes " + W.shape_string() + ", " + U.shape_string() +
                         ", " + b.shape_string() + " are inconsistent");
  }
  return LstmWeights{bind(W), bind(U), bind(b), W.cols(), hidden};
}

LstmWeights Tape::bind_lstm(Tensor& W, Tensor& U, Tensor& b) { return bind_lstm_impl(W, U, b); }

LstmWeights Tape::bind_lstm(const Tensor& W, const Tensor& U, const Tensor& b) {
  return bind_lstm_impl(W, U, b);
}

RowMat& Tape::param_grad(Param p) {
  Binding& b = bindings_[p.id];
  if (b.grad.size() == 0) b.grad = RowMat::Zero(b.value.rows(), b.value.cols());
  return b.grad;
}

Var Tape::push(Vec value, bool needs_grad, std::function<void(std::size_t)> back) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

void Tape::check_same_dim(Var a, Var b, const char* op) const {
  if (dim(a) != dim(b)) {
    throw DimensionError(std::string(op) + ": operand lengths " + std::to_string(dim(a)) +
                         " and " + std::to_string(dim(b)) + " differ");
  }
}

Var Tape::constant(Vec value) { return push(std::move(value), false); }

Var Tape::constant(std::span<const float> value) {
  Vec v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) v(static_cast<Eigen::Index>(i)) = value[i];
  return constant(std::move(v));
}

Var Tape::zeros(std::size_t n) { return constant(Vec::Zero(static_cast<Eigen::Index>(n))); }

Var Tape::param_vector(Param p) {
  const RowMat& m = bindings_[p.id].value;
  Vec v = Eigen::Map<const Vec>(m.data(), m.size());
  return push(std::move(v), true, [this, p](std::size_t self) {
    RowMat& g = param_grad(p);
    Eigen::Map<Vec>(g.data(), g.size()) += grad(self);
  });
}

Var Tape::row(Param table, std::size_t r) {
  const RowMat& m = bindings_[table.id].value;
  if (r >= static_cast<std::size_t>(m.rows())) {
    throw DimensionError("row lookup: index " + std::to_string(r) + " out of range " +
                         std::to_string(m.rows()));
  }
  const auto ri = static_cast<Eigen::Index>(r);
  Vec v = m.row(ri).transpose();
  return push(std::move(v), true, [this, table, ri](std::size_t self) {
    param_grad(table).row(ri) += grad(self).transpose();
  });
}

Var Tape::matvec(Param W, Var x) {
  const RowMat& m = bindings_[W.id].value;
  if (static_cast<std::size_t>(m.cols()) != dim(x)) {
    throw DimensionError("matvec: matrix has " + std::to_string(m.cols()) +
                         " columns but vector has length " + std::to_string(dim(x)));
  }
  Vec v = m * value(x);
  return push(std::move(v), true, [this, W, x](std::size_t self) {
    const Vec& g = grad(self);
    param_grad(W).noalias() += g * value(x).transpose();
    if (needs(x)) grad(x).noalias() += bindings_[W.id].value.transpose() * g;
  });
}

Var Tape::matvec_transposed(Param W, Var x) {
  const RowMat& m = bindings_[W.id].value;
  if (static_cast<std::size_t>(m.rows()) != dim(x)) {
    throw DimensionError("matvec_transposed: matrix has " + std::to_string(m.rows()) +
                         " rows but vector has length " + std::to_string(dim(x)));
  }
  Vec v = m.transpose() * value(x);
  return push(std::move(v), true, [this, W, x](std::size_t self) {
    const Vec& g = grad(self);
    param_grad(W).noalias() += value(x) * g.transpose();
    if (needs(x)) grad(x).noalias() += bindings_[W.id].value * g;
  });
}

Var Tape::affine(Param W, Var x, Param b) {
  const RowMat& m = bindings_[W.id].value;
  const RowMat& bias = bindings_[b.id].value;
  if (static_cast<std::size_t>(m.cols()) != dim(x)) {
    throw DimensionError("affine: matrix has " + std::to_string(m.cols()) +
                         " columns but input has length " + std::to_string(dim(x)));
  }
  if (bias.size() != m.rows()) {
    throw DimensionError("affine: bias length " + std::to_string(bias.size()) +
                         " does not match " + std::to_string(m.rows()) + " outputs");
  }
  Vec v = m * value(x) + Eigen::Map<const Vec>(bias.data(), bias.size());
  return push(std::move(v), true, [this, W, x, b](std::size_t self) {
    const Vec& g = grad(self);
    param_grad(W).noalias() += g * value(x).transpose();
    RowMat& gb = param_grad(b);
    Eigen::Map<Vec>(gb.data(), gb.size()) += g;
    if (needs(x)) grad(x).noalias() += bindings_[W.id].value.transpose() * g;
  });
}

Var Tape::add(Var a, Var b) {
  check_same_dim(a, b, "add");
  return push(value(a) + value(b), needs(a) || needs(b), [this, a, b](std::size_t self) {
    if (needs(a)) grad(a) += grad(self);
    if (needs(b)) grad(b) += grad(self);
  });
}

Var Tape::mul(Var a, Var b) {
  check_same_dim(a, b, "mul");
  return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b),
              [this, a, b](std::size_t self) {
                if (needs(a)) grad(a) += grad(self).cwiseProduct(value(b));
                if (needs(b)) grad(b) += grad(self).cwiseProduct(value(a));
              });
}

Var Tape::scale(Var a, double s) {
  return push(value(a) * s, needs(a), [this, a, s](std::size_t self) {
    grad(a) += grad(self) * s;
  });
}

Var Tape::tanh(Var a) {
  Vec v = value(a).array().tanh();
  return push(std::move(v), needs(a), [this, a](std::size_t self) {
    const Vec& y = value(Var{self});
    grad(a).array() += grad(self).array() * (1.0 - y.array().square());
  });
}

Var Tape::sigmoid(Var a) {
  Vec v = value(a).unaryExpr(&sigmoid_scalar);
  return push(std::move(v), needs(a), [this, a](std::size_t self) {
    const Vec& y = value(Var{self});
    grad(a).array() += grad(self).array() * y.array() * (1.0 - y.array());
  });
}

Var Tape::concat(std::span<const Var> parts) {
  Eigen::Index total = 0;
  bool any = false;
  for (Var p : parts) {
    total += value(p).size();
    any = any || needs(p);
  }
  Vec v(total);
  Eigen::Index off = 0;
  for (Var p : parts) {
    v.segment(off, value(p).size()) = value(p);
    off += value(p).size();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(v), any, [this, inputs](std::size_t self) {
    Eigen::Index off = 0;
    for (Var p : inputs) {
      const Eigen::Index n = value(p).size();
      if (needs(p)) grad(p) += grad(self).segment(off, n);
      off += n;
    }
  });
}

Var Tape::slice(Var a, std::size_t offset, std::size_t length) {
  if (offset + length > dim(a)) {
    throw DimensionError("slice: [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") exceeds length " +
                         std::to_string(dim(a)));
  }
  const auto off = static_cast<Eigen::Index>(offset);
  const auto len = static_cast<Eigen::Index>(length);
  Vec v = value(a).segment(off, len);
  return push(std::move(v), needs(a), [this, a, off, len](std::size_t self) {
    grad(a).segment(off, len) += grad(self);
  });
}

Var Tape::dot(Var a, Var b) {
  check_same_dim(a, b, "dot");
  Vec v(1);
  v(0) = value(a).dot(value(b));
  return push(std::move(v), needs(a) || needs(b), [this, a, b](std::size_t self) {
    const double g = grad(self)(0);
    if (needs(a)) grad(a) += g * value(b);
    if (needs(b)) grad(b) += g * value(a);
  });
}

Var Tape::sum(Var a) {
  Vec v(1);
  v(0) = value(a).sum();
  return push(std::move(v), needs(a), [this, a](std::size_t self) {
    grad(a).array() += grad(self)(0);
  });
}

Var Tape::add_scalars(std::span<const Var> scalars) {
  Vec v = Vec::Zero(1);
  bool any = false;
  for (Var s : scalars) {
    if (dim(s) != 1) throw DimensionError("add_scalars: operand is not a scalar");
    v(0) += value(s)(0);
    any = any || needs(s);
  }
  std::vector<Var> inputs(scalars.begin(), scalars.end());
  return push(std::move(v), any, [this, inputs](std::size_t self) {
    for (Var s : inputs) {
      if (needs(s)) grad(s)(0) += grad(self)(0);
    }
  });
}

Var Tape::max_pool(std::span<const Var> vectors) {
  if (vectors.empty()) throw InvalidArgument("max_pool: no inputs");
  const Eigen::Index n = value(vectors[0]).size();
  std::vector<std::size_t> argmax(static_cast<std::size_t>(n), 0);
  Vec v = value(vectors[0]);
  bool any = needs(vectors[0]);
  for (std::size_t k = 1; k < vectors.size(); ++k) {
    check_same_dim(vectors[0], vectors[k], "max_pool");
    const Vec& x = value(vectors[k]);
    any = any || needs(vectors[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x(i) > v(i)) {
        v(i) = x(i);
        argmax[static_cast<std::size_t>(i)] = k;
      }
    }
  }
  std::vector<Var> inputs(vectors.begin(), vectors.end());
  return push(std::move(v), any, [this, inputs, argmax](std::size_t self) {
    const Vec& g = grad(self);
    for (std::size_t i = 0; i < argmax.size(); ++i) {
      Var src = inputs[argmax[i]];
      if (needs(src)) grad(src)(static_cast<Eigen::Index>(i)) += g(static_cast<Eigen::Index>(i));
    }
  });
}

Var Tape::stack(std::span<const Var> scalars) {
  Vec v(static_cast<Eigen::Index>(scalars.size()));
  bool any = false;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (dim(scalars[i]) != 1) throw DimensionError("stack: operand is not a scalar");
    v(static_cast<Eigen::Index>(i)) = value(scalars[i])(0);
    any = any || needs(scalars[i]);
  }
  std::vector<Var> inputs(scalars.begin(), scalars.end());
  return push(std::move(v), any, [this, inputs](std::size_t self) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (needs(inputs[i])) grad(inputs[i])(0) += grad(self)(static_cast<Eigen::Index>(i));
    }
  });
}

Var Tape::softmax(Var logits) {
  if (dim(logits) == 0) throw InvalidArgument("softmax: empty vector");
  const Vec& l = value(logits);
  Vec p = (l.array() - l.maxCoeff()).exp();
  p /= p.sum();
  return push(std::move(p), needs(logits), [this, logits](std::size_t self) {
    const Vec& y = value(Var{self});
    const Vec& g = grad(self);
    const double inner = g.dot(y);
    grad(logits).array() += y.array() * (g.array() - inner);
  });
}

Var Tape::weighted_sum(Var weights, std::span<const Var> vectors) {
  if (vectors.empty()) throw InvalidArgument("weighted_sum: no vectors");
  if (dim(weights) != vectors.size()) {
    throw DimensionError("weighted_sum: " + std::to_string(dim(weights)) + " weights for " +
                         std::to_string(vectors.size()) + " vectors");
  }
  const Vec& w = value(weights);
  Vec v = Vec::Zero(value(vectors[0]).size());
  bool any = needs(weights);
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    check_same_dim(vectors[0], vectors[j], "weighted_sum");
    v += w(static_cast<Eigen::Index>(j)) * value(vectors[j]);
    any = any || needs(vectors[j]);
  }
  std::vector<Var> inputs(vectors.begin(), vectors.end());
  return push(std::move(v), any, [this, weights, inputs](std::size_t self) {
    const Vec& g = grad(self);
    const Vec& w = value(weights);
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (needs(weights)) grad(weights)(jj) += g.dot(value(inputs[j]));
      if (needs(inputs[j])) grad(inputs[j]) += w(jj) * g;
    }
  });
}

Var Tape::softmax_cross_entropy(Var logits, std::size_t target) {
  if (target >= dim(logits)) {
    throw InvalidArgument("softmax_cross_entropy: target " + std::to_string(target) +
                          " out of range " + std::to_string(dim(logits)));
  }
  const Vec& l = value(logits);
  const double mx = l.maxCoeff();
  Vec p = (l.array() - mx).exp();
  const double z = p.sum();
  p /= z;
  Vec v(1);
  v(0) = std::log(z) + mx - l(static_cast<Eigen::Index>(target));
  return push(std::move(v), needs(logits),
              [this, logits, target, p = std::move(p)](std::size_t self) {
                const double g = grad(self)(0);
                Vec& gl = grad(logits);
                gl += g * p;
                gl(static_cast<Eigen::Index>(target)) -= g;
              });
}

LstmOutput Tape::lstm(const LstmWeights& w, Var x, Var h, Var c) {
  const auto H = static_cast<Eigen::Index>(w.hidden_dim);
  if (dim(x) != w.input_dim) {
    throw DimensionError("lstm: input x has length " + std::to_string(dim(x)) +
                         ", expected " + std::to_string(w.input_dim));
  }
  if (dim(h) != w.hidden_dim) {
    throw DimensionError("lstm: previous hidden state h has length " + std::to_string(dim(h)) +
                         ", expected " + std::to_string(w.hidden_dim));
  }
  if (dim(c) != w.hidden_dim) {
    throw DimensionError("lstm: previous cell state c has length " + std::to_string(dim(c)) +
                         ", expected " + std::to_string(w.hidden_dim));
  }
  const RowMat& Wm = bindings_[w.W.id].value;
  const RowMat& Um = bindings_[w.U.id].value;
  const RowMat& bm = bindings_[w.b.id].value;

  Vec z = Wm * value(x) + Um * value(h) + Eigen::Map<const Vec>(bm.data(), bm.size());
  Vec gates(4 * H);
  gates.segment(0, H) = z.segment(0, H).unaryExpr(&sigmoid_scalar);
  gates.segment(H, H) = z.segment(H, H).unaryExpr(&sigmoid_scalar);
  gates.segment(2 * H, H) = z.segment(2 * H, H).array().tanh();
  gates.segment(3 * H, H) = z.segment(3 * H, H).unaryExpr(&sigmoid_scalar);

  Vec out(2 * H);
  Vec c_new = gates.segment(H, H).cwiseProduct(value(c)) +
              gates.segment(0, H).cwiseProduct(gates.segment(2 * H, H));
  Vec tanh_c = c_new.array().tanh();
  out.segment(0, H) = gates.segment(3 * H, H).cwiseProduct(tanh_c);
  out.segment(H, H) = c_new;

  Var both = push(
      std::move(out), true,
      [this, w, x, h, c, H, gates = std::move(gates), tanh_c = std::move(tanh_c)](
          std::size_t self) {
        const Vec& g = grad(self);
        auto i_g = gates.segment(0, H).array();
        auto f_g = gates.segment(H, H).array();
        auto c_g = gates.segment(2 * H, H).array();
        auto o_g = gates.segment(3 * H, H).array();
        auto dh = g.segment(0, H).array();
        Eigen::ArrayXd dc = g.segment(H, H).array() +
                            dh * o_g * (1.0 - tanh_c.array().square());
        Vec dz(4 * H);
        dz.segment(0, H) = (dc * c_g * i_g * (1.0 - i_g)).matrix();
        dz.segment(H, H) = (dc * value(c).array() * f_g * (1.0 - f_g)).matrix();
        dz.segment(2 * H, H) = (dc * i_g * (1.0 - c_g.square())).matrix();
        dz.segment(3 * H, H) = (dh * tanh_c.array() * o_g * (1.0 - o_g)).matrix();

        param_grad(w.W).noalias() += dz * value(x).transpose();
        param_grad(w.U).noalias() += dz * value(h).transpose();
        RowMat& gb = param_grad(w.b);
        Eigen::Map<Vec>(gb.data(), gb.size()) += dz;
        if (needs(x)) grad(x).noalias() += bindings_[w.W.id].value.transpose() * dz;
        if (needs(h)) grad(h).noalias() += bindings_[w.U.id].value.transpose() * dz;
        if (needs(c)) grad(c).array() += dc * f_g;
      });
  return LstmOutput{slice(both, 0, w.hidden_dim), slice(both, w.hidden_dim, w.hidden_dim)};
}

void Tape::backward(Var root) {
  if (dim(root) != 1) throw DimensionError("backward: root is not a scalar");
  for (auto& node : nodes_) {
    node.grad = Vec::Zero(node.value.size());
  }
  nodes_[root.id].grad(0) = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.needs_grad && node.back) node.back(i);
  }
  for (auto& b : bindings_) {
    if (b.grad.size() == 0) continue;
    if (!b.target) {
      b.grad.resize(0, 0);
      continue;
    }
    auto g = b.target->grad();
    for (Eigen::Index k = 0; k < b.grad.size(); ++k) {
      g[static_cast<std::size_t>(k)] += static_cast<float>(b.grad.data()[k]);
    }
    b.grad.resize(0, 0);
  }
}

}  // namespace fpdesc::nn
