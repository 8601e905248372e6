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

#include "fpdesc/attention.hpp"

#include <string>

#include "fpdesc/error.hpp"

namespace fpdesc::tbdg {

std::string_view align_mode_name(AlignMode mode) {
  return mode == AlignMode::Dot ? "dot" : "general";
}

AlignMode parse_align_mode(std::string_view name) {
  if (name == "dot") return AlignMode::Dot;
  if (name == "general") return AlignMode::General;
  throw InvalidArgument("unknown align mode '" + std::string(name) + "' (expected dot or general)");
}

AttentionOutput attention_step(nn::Tape& tape, nn::Var h_t, std::span<const nn::Var> h_s,
                               AlignMode mode, std::optional<nn::Param> W_a) {
  if (h_s.empty()) throw InvalidArgument("attention_step: no encoder states");
  const std::size_t enc_dim = tape.dim(h_s[0]);
  for (std::size_t j = 1; j < h_s.size(); ++j) {
    if (tape.dim(h_s[j]) != enc_dim) {
      throw DimensionError("attention_step: encoder state " + std::to_string(j) + " has length " +
                           std::to_string(tape.dim(h_s[j])) + ", expected " + std::to_string(enc_dim));
    }
  }
  nn::Var query = h_t;
  if (mode == AlignMode::General) {
    if (!W_a) throw InvalidArgument("attention_step: general mode needs W_a");
    const auto& W = tape.param_value(*W_a);
    if (static_cast<std::size_t>(W.rows()) != tape.dim(h_t) ||
        static_cast<std::size_t>(W.cols()) != enc_dim) {
      throw DimensionError("attention_step: W_a is " + std::to_string(W.rows()) + "x" +
                           std::to_string(W.cols()) + " but h_t has length " +
                           std::to_string(tape.dim(h_t)) + " and encoder states " +
                           std::to_string(enc_dim));
    }
    query = tape.matvec_transposed(*W_a, h_t);
  } else if (tape.dim(h_t) != enc_dim) {
    throw DimensionError("attention_step: dot mode needs h_t (length " +
                         std::to_string(tape.dim(h_t)) + ") and encoder states (length " +
                         std::to_string(enc_dim) + ") of equal length");
  }
  std::vector<nn::Var> e;
  e.reserve(h_s.size());
  for (nn::Var s : h_s) e.push_back(tape.dot(query, s));
  const nn::Var scores = tape.stack(e);
  const nn::Var alpha = tape.softmax(scores);
  return AttentionOutput{scores, alpha, tape.weighted_sum(alpha, h_s)};
}

AttentionResult attention_step(std::span<const float> h_t, std::span<const std::vector<float>> h_s,
                               AlignMode mode, const nn::Tensor* W_a) {
  nn::Tape tape;
  std::vector<nn::Var> states;
  for (const auto& s : h_s) states.push_back(tape.constant(std::span<const float>(s)));
  std::optional<nn::Param> w;
  if (W_a) w = tape.bind(*W_a);
  const auto out = attention_step(tape, tape.constant(h_t), states, mode, w);
  auto copy = [&](nn::Var v) {
    const nn::Vec& x = tape.value(v);
    return std::vector<double>(x.data(), x.data() + x.size());
  };
  return AttentionResult{copy(out.scores), copy(out.alpha), copy(out.context)};
}

}  // namespace fpdesc::tbdg
