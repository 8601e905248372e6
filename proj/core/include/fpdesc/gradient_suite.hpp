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

#include <cstdint>
#include <string>
#include <vector>

#include "fpdesc/nn/gradcheck.hpp"

namespace fpdesc {

struct GradientCase {
  std::string name;
  nn::GradCheckReport report;
};

/// Finite-difference checks of every trainable path on tiny seeded shapes (feature dim 8,
/// hidden 8, vocab 12): lstm_step, bilstm_encode, pool_regions, attention (dot and general),
/// the DSIC loss, the captioner loss and the TBDG loss (dot and general).
std::vector<GradientCase> run_gradient_suite(std::uint64_t seed, double tolerance = 1e-3,
                                             double step = 1e-2);

std::string gradient_suite_json(const std::vector<GradientCase>& cases);

}  // namespace fpdesc
