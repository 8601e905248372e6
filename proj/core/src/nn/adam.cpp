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

#include "fpdesc/nn/adam.hpp"

#include <cmath>
#include <string>

#include "fpdesc/error.hpp"

namespace fpdesc::nn {

OptimizerState OptimizerState::for_params(std::span<const NamedTensor> params,
                                          AdamConfig config) {
  OptimizerState state;
  state.config = config;
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.tensor->numel(), 0.0f);
    state.second_moment.emplace_back(p.tensor->numel(), 0.0f);
  }
  return state;
}

void adam_step(OptimizerState& state, std::span<const NamedTensor> params) {
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state tracks " +
                         std::to_string(state.first_moment.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& t = *params[k].tensor;
    if (state.first_moment[k].size() != t.numel()) {
      throw DimensionError("adam_step: accumulator shape mismatch for " + params[k].name);
    }
    for (float g : t.grad()) {
      if (!std::isfinite(g)) {
        throw NonFiniteError("adam_step: non-finite gradient in parameter " + params[k].name);
      }
    }
  }

  ++state.step;
  const AdamConfig& c = state.config;
  const double step = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, step);
  const double correction2 = 1.0 - std::pow(c.beta2, step);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& t = *params[k].tensor;
    auto data = t.data();
    auto grad = t.grad();
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grad[i];
      const double mi = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update =
          c.learning_rate * (mi / correction1) / (std::sqrt(vi / correction2) + c.epsilon);
      data[i] = static_cast<float>(data[i] - update);
    }
  }
}

}  // namespace fpdesc::nn
