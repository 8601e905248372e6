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

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "fpdesc/nn/tensor.hpp"

namespace fpdesc::nn {

using Vec = Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Handle to a Tensor bound to a Tape as a trainable parameter.
struct Param {
  std::size_t id = 0;
};

struct LstmWeights {
  Param W;  // 4h x in, gate blocks ordered input, forget, candidate, output
  Param U;  // 4h x h
  Param b;  // 4h
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
};

struct LstmOutput {
  Var h;
  Var c;
};

/// Reverse-mode differentiation over vector-valued operations.
///
/// Values are held in double precision while the parameters themselves stay float32.
/// backward() adds the gradients into each bound Tensor's grad buffer.
///
/// A Tape records one forward pass and is neither copyable nor movable.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Binds a trainable tensor; binding the same tensor twice returns the same handle.
  Param bind(Tensor& tensor);
  /// Binds a read-only tensor. Gradients reaching it are discarded.
  Param bind(const Tensor& tensor);
  LstmWeights bind_lstm(Tensor& W, Tensor& U, Tensor& b);
  LstmWeights bind_lstm(const Tensor& W, const Tensor& U, const Tensor& b);

  Var constant(Vec value);
  Var constant(std::span<const float> value);
  Var zeros(std::size_t n);

  /// The whole parameter, flattened, as a differentiable vector.
  Var param_vector(Param p);
  /// Row r of a 2-D parameter (embedding lookup).
  Var row(Param table, std::size_t r);

  Var matvec(Param W, Var x);
  Var matvec_transposed(Param W, Var x);
  Var affine(Param W, Var x, Param b);

  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var concat(std::span<const Var> parts);
  Var concat(std::initializer_list<Var> parts) {
    return concat(std::span<const Var>(parts.begin(), parts.size()));
  }
  Var slice(Var a, std::size_t offset, std::size_t length);

  Var dot(Var a, Var b);
  Var sum(Var a);
  Var add_scalars(std::span<const Var> scalars);
  /// Elementwise maximum over vectors of equal length; ties go to the earliest vector.
  Var max_pool(std::span<const Var> vectors);
  Var stack(std::span<const Var> scalars);
  Var softmax(Var logits);
  /// sum_j weights[j] * vectors[j]
  Var weighted_sum(Var weights, std::span<const Var> vectors);
  /// -log softmax(logits)[target], computed stably.
  Var softmax_cross_entropy(Var logits, std::size_t target);

  LstmOutput lstm(const LstmWeights& w, Var x, Var h, Var c);

  const Vec& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0); }
  std::size_t dim(Var v) const { return static_cast<std::size_t>(nodes_[v.id].value.size()); }
  const RowMat& param_value(Param p) const { return bindings_[p.id].value; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Backpropagates from a scalar node and accumulates into the bound tensors' gradients.
  void backward(Var root);

 private:
  struct Node {
    Vec value;
    Vec grad;
    bool needs_grad = false;
    std::function<void(std::size_t self)> back;
  };
  struct Binding {
    Tensor* target = nullptr;  // null for read-only bindings
    RowMat value;
    RowMat grad;
  };

  Param bind_impl(const Tensor& tensor, Tensor* target);
  template <typename T>
  LstmWeights bind_lstm_impl(T& W, T& U, T& b);
  Var push(Vec value, bool needs_grad, std::function<void(std::size_t)> back = {});
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Vec& grad(Var v) { return nodes_[v.id].grad; }
  const Vec& grad(std::size_t id) const { return nodes_[id].grad; }
  RowMat& param_grad(Param p);
  void check_same_dim(Var a, Var b, const char* op) const;

  std::vector<Node> nodes_;
  std::vector<Binding> bindings_;
  std::unordered_map<const Tensor*, std::size_t> binding_index_;
};

}  // namespace fpdesc::nn
