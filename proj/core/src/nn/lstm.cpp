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

#include "fpdesc/nn/lstm.hpp"

#include <cmath>

#include "fpdesc/error.hpp"
#include "fpdesc/rng.hpp"

namespace fpdesc::nn {

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.W = Tensor({4 * hidden_dim, input_dim});
  p.U = Tensor({4 * hidden_dim, hidden_dim});
  p.b = Tensor({4 * hidden_dim});
  return p;
}

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.W = Tensor::uniform({4 * hidden_dim, input_dim}, input_dim, rng);
  p.U = Tensor::uniform({4 * hidden_dim, hidden_dim}, hidden_dim, rng);
  p.b = Tensor::uniform({4 * hidden_dim}, hidden_dim, rng);
  return p;
}

void LstmParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) {
  out.push_back({prefix + ".W", &W});
  out.push_back({prefix + ".U", &U});
  out.push_back({prefix + ".b", &b});
}

std::vector<float> to_float(const Vec& v) {
  std::vector<float> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v(i));
  return out;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Row r of a row-major float matrix dotted with v, accumulated in double.
double row_dot(const Tensor& m, std::size_t r, std::span<const float> v) {
  const float* row = m.data().data() + r * v.size();
  double sum = 0;
  for (std::size_t k = 0; k < v.size(); ++k) sum += static_cast<double>(row[k]) * static_cast<double>(v[k]);
  return sum;
}

}  // namespace

LstmState lstm_step(const LstmParams& params, std::span<const float> x, std::span<const float> h_prev,
                    std::span<const float> c_prev) {
  const std::size_t H = params.U.cols();
  if (params.W.rows() != 4 * H || params.U.rows() != 4 * H || params.b.numel() != 4 * H) {
    throw DimensionError("lstm: weight shapes " + params.W.shape_string() + ", " + params.U.shape_string() +
                         ", " + params.b.shape_string() + " are inconsistent");
  }
  if (x.size() != params.W.cols()) {
    throw DimensionError("lstm: input x has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(params.W.cols()));
  }
  if (h_prev.size() != H) {
    throw DimensionError("lstm: previous hidden state h has length " + std::to_string(h_prev.size()) +
                         ", expected " + std::to_string(H));
  }
  if (c_prev.size() != H) {
    throw DimensionError("lstm: previous cell state c has length " + std::to_string(c_prev.size()) +
                         ", expected " + std::to_string(H));
  }
  std::vector<double> z(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    z[r] = row_dot(params.W, r, x) + row_dot(params.U, r, h_prev) + static_cast<double>(params.b[r]);
  }
  LstmState out{std::vector<float>(H), std::vector<float>(H)};
  for (std::size_t j = 0; j < H; ++j) {
    const double i = sigmoid(z[j]), f = sigmoid(z[H + j]), g = std::tanh(z[2 * H + j]), o = sigmoid(z[3 * H + j]);
    const double c = f * static_cast<double>(c_prev[j]) + i * g;
    out.c[j] = static_cast<float>(c);
    out.h[j] = static_cast<float>(o * std::tanh(c));
  }
  return out;
}

std::vector<Var> bilstm_encode(Tape& tape, const LstmWeights& fwd, const LstmWeights& bwd,
                               std::span<const Var> xs) {
  if (xs.empty()) throw InvalidArgument("bilstm_encode: empty sequence");
  const std::size_t n = xs.size();
  std::vector<Var> forward(n);
  std::vector<Var> backward(n);
  Var h = tape.zeros(fwd.hidden_dim);
  Var c = tape.zeros(fwd.hidden_dim);
  for (std::size_t t = 0; t < n; ++t) {
    auto out = tape.lstm(fwd, xs[t], h, c);
    h = out.h;
    c = out.c;
    forward[t] = h;
  }
  h = tape.zeros(bwd.hidden_dim);
  c = tape.zeros(bwd.hidden_dim);
  for (std::size_t t = n; t-- > 0;) {
    auto out = tape.lstm(bwd, xs[t], h, c);
    h = out.h;
    c = out.c;
    backward[t] = h;
  }
  std::vector<Var> states(n);
  for (std::size_t t = 0; t < n; ++t) states[t] = tape.concat({forward[t], backward[t]});
  return states;
}

std::vector<std::vector<float>> bilstm_encode(const LstmParams& fwd, const LstmParams& bwd,
                                              std::span<const std::vector<float>> xs) {
  Tape tape;
  const LstmWeights wf = fwd.bind(tape);
  const LstmWeights wb = bwd.bind(tape);
  std::vector<Var> inputs;
  inputs.reserve(xs.size());
  for (const auto& x : xs) inputs.push_back(tape.constant(x));
  std::vector<std::vector<float>> out;
  for (Var v : bilstm_encode(tape, wf, wb, inputs)) out.push_back(to_float(tape.value(v)));
  return out;
}

}  // namespace fpdesc::nn
