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

#include <benchmark/benchmark.h>

#include "fpdesc/attention.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/rng.hpp"
#include "fpdesc/tbdg.hpp"

namespace {

std::vector<float> random_vec(std::size_t n, fpdesc::Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return v;
}

void BM_LstmStep(benchmark::State& state) {
  fpdesc::Rng rng(1);
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const auto p = fpdesc::nn::LstmParams::init(hidden, hidden, rng);
  const auto x = random_vec(hidden, rng), h = random_vec(hidden, rng), c = random_vec(hidden, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::nn::lstm_step(p, x, h, c));
}
BENCHMARK(BM_LstmStep)->Arg(64)->Arg(256)->Arg(512);

void BM_BilstmEncode(benchmark::State& state) {
  fpdesc::Rng rng(2);
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto fwd = fpdesc::nn::LstmParams::init(150, 128, rng);
  const auto bwd = fpdesc::nn::LstmParams::init(150, 128, rng);
  std::vector<std::vector<float>> xs;
  for (std::size_t t = 0; t < steps; ++t) xs.push_back(random_vec(150, rng));
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::nn::bilstm_encode(fwd, bwd, xs));
}
BENCHMARK(BM_BilstmEncode)->Arg(20)->Arg(80);

void BM_Attention(benchmark::State& state) {
  fpdesc::Rng rng(3);
  const auto positions = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<float>> hs;
  for (std::size_t j = 0; j < positions; ++j) hs.push_back(random_vec(256, rng));
  const auto h = random_vec(256, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fpdesc::tbdg::attention_step(h, hs, fpdesc::tbdg::AlignMode::Dot));
  }
}
BENCHMARK(BM_Attention)->Arg(20)->Arg(80);

void BM_TbdgLossBackward(benchmark::State& state) {
  fpdesc::tbdg::TbdgConfig cfg;
  cfg.vocab_size = 200;
  cfg.input_len = 40;
  cfg.output_len = 32;
  cfg.embed_dim = 32;
  cfg.encoder_hidden = 32;
  cfg.decoder_hidden = 64;
  auto params = fpdesc::tbdg::TbdgParams::init(cfg, 1);
  fpdesc::Rng rng(4);
  std::vector<fpdesc::TokenId> input(cfg.input_len), target(cfg.output_len, fpdesc::kPadId);
  for (auto& id : input) id = static_cast<fpdesc::TokenId>(4 + rng.below(196));
  target[0] = fpdesc::kBosId;
  for (std::size_t t = 1; t + 1 < cfg.output_len; ++t) target[t] = static_cast<fpdesc::TokenId>(4 + rng.below(196));
  target[cfg.output_len - 1] = fpdesc::kEosId;
  for (auto _ : state) {
    fpdesc::nn::Tape tape;
    auto loss = fpdesc::tbdg::tbdg_loss(tape, params, input, target);
    tape.backward(loss);
  }
}
BENCHMARK(BM_TbdgLossBackward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
