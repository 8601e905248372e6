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
#include <span>
#include <string>
#include <vector>

namespace fpdesc {
class Rng;
}

namespace fpdesc::nn {

/// Dense row-major float32 array with an optional gradient buffer of the same length.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<float> data);

  /// Entries uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static Tensor uniform(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t numel() const noexcept { return data_.size(); }
  std::size_t rank() const noexcept { return shape_.size(); }
  /// Leading dimension; for vectors this is the length.
  std::size_t rows() const noexcept { return shape_.empty() ? 0 : shape_[0]; }
  /// Product of trailing dimensions (1 for vectors).
  std::size_t cols() const noexcept;

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }
  float& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  float at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  bool has_grad() const noexcept { return !grad_.empty(); }
  /// Allocates (zeroed) on first use.
  std::span<float> grad();
  std::span<const float> grad() const noexcept { return grad_; }
  void zero_grad();
  void clear_grad() { grad_.clear(); }

  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<float> data_;
  std::vector<float> grad_;
};

/// A parameter as seen by optimizers, checkpoints and gradient checks.
struct NamedTensor {
  std::string name;
  Tensor* tensor = nullptr;
};

/// Rescales all gradients so their joint L2 norm is at most max_norm. Returns the norm
/// before clipping.
double clip_grad_norm(std::span<const NamedTensor> params, double max_norm);

void zero_grads(std::span<const NamedTensor> params);

}  // namespace fpdesc::nn
