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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "fpdesc/error.hpp"
#include "fpdesc/gradient_suite.hpp"
#include "fpdesc/nn/adam.hpp"
#include "fpdesc/nn/checkpoint.hpp"
#include "fpdesc/nn/gradcheck.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/nn/ops.hpp"
#include "fpdesc/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fpdesc;
using namespace fpdesc::nn;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Gate-by-gate LSTM step written out with explicit loops.
LstmState reference_lstm(const LstmParams& p, const std::vector<float>& x, const std::vector<float>& h,
                         const std::vector<float>& c) {
  const std::size_t H = p.hidden_dim;
  std::vector<double> pre(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    double acc = p.b[r];
    for (std::size_t k = 0; k < p.input_dim; ++k) acc += double(p.W.at(r, k)) * x[k];
    for (std::size_t k = 0; k < H; ++k) acc += double(p.U.at(r, k)) * h[k];
    pre[r] = acc;
  }
  LstmState out{std::vector<float>(H), std::vector<float>(H)};
  for (std::size_t j = 0; j < H; ++j) {
    const double i = sigmoid(pre[j]), f = sigmoid(pre[H + j]), g = std::tanh(pre[2 * H + j]),
                 o = sigmoid(pre[3 * H + j]);
    const double cn = f * c[j] + i * g;
    out.c[j] = static_cast<float>(cn);
    out.h[j] = static_cast<float>(o * std::tanh(cn));
  }
  return out;
}

std::vector<float> random_vec(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return v;
}

}  // namespace

TEST_CASE("softmax matches the extended-precision oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> logits(1 + rng.below(10));
    for (auto& v : logits) v = rng.uniform(-30, 30);
    const auto got = softmax(logits);
    const auto want = oracle::softmax(logits);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(double(want[i])).epsilon(1e-12));
  }
  const std::vector<double> big{1000, 0};
  const auto p = softmax(big);
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(double(oracle::softmax(big)[1])).epsilon(1e-9));
  CHECK_THROWS_AS(softmax(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("cross_entropy and argmax") {
  const std::vector<double> uniform(4, 0.25);
  CHECK(cross_entropy(uniform, 2) == doctest::Approx(std::log(4.0)));
  const std::vector<double> zero{1.0, 0.0};
  CHECK(cross_entropy(zero, 1) == doctest::Approx(std::log(1e12)));
  CHECK_THROWS_AS(cross_entropy(uniform, 4), InvalidArgument);
  CHECK(argmax(std::vector<double>{1, 3, 3, 2}) == 1);
}

TEST_CASE("lstm_step") {
  const auto zero = LstmParams::zeros(3, 2);
  const std::vector<float> x{1, 2, 3}, h{0, 0}, c{0.4f, -1.0f};
  const auto z = lstm_step(zero, x, h, c);
  CHECK(z.c[0] == doctest::Approx(0.2));
  CHECK(z.c[1] == doctest::Approx(-0.5));
  CHECK(z.h[0] == doctest::Approx(0.5 * std::tanh(0.2)));

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = LstmParams::init(5, 4, rng);
    const auto xv = random_vec(5, rng), hv = random_vec(4, rng), cv = random_vec(4, rng);
    const auto got = lstm_step(p, xv, hv, cv);
    const auto want = reference_lstm(p, xv, hv, cv);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(got.h[j] == doctest::Approx(want.h[j]).epsilon(1e-6));
      CHECK(got.c[j] == doctest::Approx(want.c[j]).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(lstm_step(zero, std::vector<float>{1, 2}, h, c), DimensionError);
}

TEST_CASE("bilstm halves swap under sequence reversal") {
  Rng rng(5);
  const auto p = LstmParams::init(3, 4, rng);
  std::vector<std::vector<float>> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(random_vec(3, rng));
  std::vector<std::vector<float>> rev(xs.rbegin(), xs.rend());
  const auto a = bilstm_encode(p, p, xs);
  const auto b = bilstm_encode(p, p, rev);
  REQUIRE(a.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    REQUIRE(a[t].size() == 8);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(a[t][j] == doctest::Approx(b[4 - t][4 + j]).epsilon(1e-6));
      CHECK(a[t][4 + j] == doctest::Approx(b[4 - t][j]).epsilon(1e-6));
    }
  }
  // The first forward output is a plain step from zero state.
  const auto first = lstm_step(p, xs[0], std::vector<float>(4, 0), std::vector<float>(4, 0));
  for (std::size_t j = 0; j < 4; ++j) CHECK(a[0][j] == doctest::Approx(first.h[j]).epsilon(1e-6));
  CHECK_THROWS_AS(bilstm_encode(p, p, std::vector<std::vector<float>>{}), InvalidArgument);
}

TEST_CASE("adam") {
  Tensor w({2}, {1.0f, -2.0f});
  std::vector<NamedTensor> params{{"w", &w}};
  auto state = OptimizerState::for_params(params, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  w.zero_grad();
  adam_step(state, params);
  CHECK(w[0] == 1.0f);
  CHECK(w[1] == -2.0f);
  CHECK(state.step == 1);

  // First bias-corrected step moves each entry by lr against the gradient sign.
  w.grad()[0] = 4.0f;
  w.grad()[1] = -0.5f;
  auto fresh = OptimizerState::for_params(params, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  adam_step(fresh, params);
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-1.9).epsilon(1e-6));

  Tensor q({2}, {3.0f, -4.0f});
  std::vector<NamedTensor> qp{{"q", &q}};
  auto qs = OptimizerState::for_params(qp, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 200; ++i) {
    q.grad()[0] = 2 * (q[0] - 1);
    q.grad()[1] = 8 * (q[1] + 0.5f);
    adam_step(qs, qp);
  }
  const double f = std::pow(q[0] - 1, 2) + 4 * std::pow(q[1] + 0.5, 2);
  CHECK(f < 1e-3);

  q.grad()[0] = std::numeric_limits<float>::quiet_NaN();
  const float before = q[1];
  CHECK_THROWS_AS(adam_step(qs, qp), NonFiniteError);
  CHECK(q[1] == before);
}

TEST_CASE("clip_grad_norm") {
  Tensor a({2}, {0, 0});
  Tensor b({1}, {0});
  a.grad()[0] = 3;
  a.grad()[1] = 0;
  b.grad()[0] = 4;
  std::vector<NamedTensor> params{{"a", &a}, {"b", &b}};
  CHECK(clip_grad_norm(params, 1.0) == doctest::Approx(5.0));
  CHECK(a.grad()[0] == doctest::Approx(0.6));
  CHECK(b.grad()[0] == doctest::Approx(0.8));
  CHECK(clip_grad_norm(params, 10.0) == doctest::Approx(1.0));
  CHECK(b.grad()[0] == doctest::Approx(0.8));
}

TEST_CASE("grad_check") {
  Tensor w({3}, {0.5f, -1.0f, 2.0f});
  const std::vector<double> xs{1.0, 2.0, -3.0};
  std::vector<NamedTensor> params{{"w", &w}};
  auto linear = [&](Tape& t) {
    Var x = t.constant(Eigen::Map<const Vec>(xs.data(), 3));
    return t.dot(t.param_vector(t.bind(w)), x);
  };
  const auto ok = grad_check(linear, params, 1e-6);
  CHECK(ok.passed());
  CHECK(ok.max_relative_error() < 1e-6);

  Tensor v({2}, {0.3f, 0.7f});
  std::vector<NamedTensor> vp{{"v", &v}};
  auto squares = [&](Tape& t) {
    Var vv = t.param_vector(t.bind(v));
    return t.sum(t.mul(vv, vv));
  };
  auto report = grad_check(squares, vp, 1e-3);
  CHECK(report.passed());
  // Against an analytic gradient that is off by a factor of two on purpose.
  auto halved = [&](Tape& t) {
    Var vv = t.param_vector(t.bind(v));
    Var frozen = t.constant(Eigen::Vector2d(v[0], v[1]));
    return t.sum(t.mul(vv, frozen));
  };
  const auto bad = grad_check(halved, vp, 1e-3);
  CHECK_FALSE(bad.passed());
  CHECK(bad.max_relative_error() == doctest::Approx(0.5).epsilon(1e-3));

  int calls = 0;
  auto flaky = [&](Tape& t) {
    ++calls;
    return t.scale(t.sum(t.param_vector(t.bind(v))), double(calls));
  };
  CHECK_THROWS_AS(grad_check(flaky, vp, 1e-3), NonDeterministicError);
  CHECK(relative_error(0, 0) == 0);
  CHECK(relative_error(1e-9, 0) == doctest::Approx(0.1));
}

TEST_CASE("gradient suite at a small step") {
  const auto cases = run_gradient_suite(1234, 1e-3, 1e-3);
  CHECK(cases.size() == 9);
  for (const auto& c : cases) {
    INFO(c.name << " " << c.report.max_relative_error());
    CHECK(c.report.passed());
  }
}

TEST_CASE("finite-difference error shrinks quadratically with the step") {
  const auto coarse = run_gradient_suite(1234, 1e-3, 8e-3);
  const auto fine = run_gradient_suite(1234, 1e-3, 4e-3);
  REQUIRE(coarse.size() == fine.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (coarse[i].name == "pool_regions") continue;  // piecewise linear: error is rounding only
    const double ratio = coarse[i].report.max_relative_error() / fine[i].report.max_relative_error();
    INFO(coarse[i].name << " ratio " << ratio);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("checkpoint round trip and schema errors") {
  testutil::ScratchDir dir("nn_checkpoint");
  Rng rng(2);
  Tensor a = Tensor::uniform({3, 2}, 2, rng);
  Tensor b = Tensor::uniform({4}, 4, rng);
  std::vector<NamedTensor> params{{"a", &a}, {"b", &b}};
  CheckpointMeta meta{"toy", 9, 17, {{"hidden", "4"}}};
  save_checkpoint(dir / "m", meta, params);

  Tensor a2({3, 2}), b2({4});
  std::vector<NamedTensor> back{{"a", &a2}, {"b", &b2}};
  const auto loaded = load_checkpoint(dir / "m", "toy", back);
  CHECK(loaded.seed == 9);
  CHECK(loaded.step == 17);
  CHECK(loaded.config.at("hidden") == "4");
  for (std::size_t i = 0; i < a.numel(); ++i) CHECK(a2[i] == a[i]);
  for (std::size_t i = 0; i < b.numel(); ++i) CHECK(b2[i] == b[i]);

  const auto manifest = read_checkpoint_manifest(dir / "m");
  REQUIRE(manifest.entries.size() == 2);
  CHECK(manifest.entries[1].byte_offset == 24);

  CHECK_THROWS_AS(load_checkpoint(dir / "m", "other", back), SchemaError);
  Tensor wrong({4, 2});
  std::vector<NamedTensor> misshaped{{"a", &wrong}, {"b", &b2}};
  CHECK_THROWS_AS(load_checkpoint(dir / "m", "toy", misshaped), SchemaError);
  std::vector<NamedTensor> short_list{{"a", &a2}};
  CHECK_THROWS_AS(load_checkpoint(dir / "m", "toy", short_list), SchemaError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing", "toy", back), IoError);

  {
    std::ofstream trunc(blob_path(dir / "m"), std::ios::binary | std::ios::trunc);
    trunc.write("abcd", 4);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "m", "toy", back), IoError);
  testutil::write_file(manifest_path(dir / "m"), "not a checkpoint\n");
  CHECK_THROWS_AS(read_checkpoint_manifest(dir / "m"), ParseError);
}
