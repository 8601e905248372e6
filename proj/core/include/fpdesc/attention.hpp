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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"

namespace fpdesc::tbdg {

/// dot: e_j = h_t . h_s_j.  general: e_j = h_t^T W_a h_s_j.
enum class AlignMode { Dot, General };

std::string_view align_mode_name(AlignMode mode);
/// Accepts "dot" and "general"; throws InvalidArgument otherwise.
AlignMode parse_align_mode(std::string_view name);

struct AttentionOutput {
  nn::Var scores;
  nn::Var alpha;
  nn::Var context;
};

/// W_a is required for General and ignored for Dot.
AttentionOutput attention_step(nn::Tape& tape, nn::Var h_t, std::span<const nn::Var> h_s,
                               AlignMode mode, std::optional<nn::Param> W_a = std::nullopt);

struct AttentionResult {
  std::vector<double> scores;
  std::vector<double> alpha;
  std::vector<double> context;
};

AttentionResult attention_step(std::span<const float> h_t, std::span<const std::vector<float>> h_s,
                               AlignMode mode, const nn::Tensor* W_a = nullptr);

}  // namespace fpdesc::tbdg
