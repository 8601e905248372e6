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
#include <span>
#include <string>
#include <vector>

#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"

namespace fpdesc::nn {

/// Records a scalar loss on the given tape. Must bind the checked tensors through the tape
/// as trainable parameters and be deterministic.
using LossBuilder = std::function<Var(Tape&)>;

struct ParamCheck {
  std::string name;
  std::size_t entries = 0;
  double max_relative_error = 0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0;
  double numeric_at_worst = 0;
  bool passed = true;
};

struct GradCheckReport {
  double tolerance = 0;
  double step = 0;
  std::vector<ParamCheck> params;

  bool passed() const;
  double max_relative_error() const;
};

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

/// Compares backprop gradients against central differences (step h) for every entry of
/// every listed parameter. Throws NonDeterministicError if two identical evaluations
/// disagree.
GradCheckReport grad_check(const LossBuilder& loss, std::span<const NamedTensor> params,
                           double tolerance, double step = 1e-2);

std::string to_json(const GradCheckReport& report);

}  // namespace fpdesc::nn
