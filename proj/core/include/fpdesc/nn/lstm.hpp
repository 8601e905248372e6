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

#include "fpdesc/nn/tape.hpp"
#include "fpdesc/nn/tensor.hpp"

namespace fpdesc {
class Rng;
}

namespace fpdesc::nn {

/// Weights of a single LSTM layer. Gates are stacked input, forget, candidate, output.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor W;  // 4h x in
  Tensor U;  // 4h x h
  Tensor b;  // 4h

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  static LstmParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  /// Appends {prefix.W, prefix.U, prefix.b}.
  void collect(const std::string& prefix, std::vector<NamedTensor>& out);
  LstmWeights bind(Tape& tape) { return tape.bind_lstm(W, U, b); }
  LstmWeights bind(Tape& tape) const { return tape.bind_lstm(W, U, b); }
};

struct LstmState {
  std::vector<float> h;
  std::vector<float> c;
};

/// One LSTM step: sigmoid gates, tanh candidate and output squash.
LstmState lstm_step(const LstmParams& params, std::span<const float> x, std::span<const float> h_prev,
                    std::span<const float> c_prev);

/// Runs fwd left-to-right and bwd right-to-left from zero states; output t is
/// [fwd_h_t ; bwd_h_t].
std::vector<std::vector<float>> bilstm_encode(const LstmParams& fwd, const LstmParams& bwd,
                                              std::span<const std::vector<float>> xs);

/// Tape version of bilstm_encode.
std::vector<Var> bilstm_encode(Tape& tape, const LstmWeights& fwd, const LstmWeights& bwd,
                               std::span<const Var> xs);

std::vector<float> to_float(const Vec& v);

}  // namespace fpdesc::nn
