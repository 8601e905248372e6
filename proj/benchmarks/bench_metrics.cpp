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

#include "fpdesc/metrics.hpp"
#include "fpdesc/rng.hpp"

namespace {

fpdesc::Tokens sentence(fpdesc::Rng& rng, std::size_t len) {
  static const char* kWords[] = {"the", "bedroom", "has", "a", "bed", "and", "closet", "kitchen",
                                 "sink", "oven", "next", "to", "hall", "living", "room", "sofa"};
  fpdesc::Tokens t(len);
  for (auto& w : t) w = kWords[rng.below(16)];
  return t;
}

void BM_Bleu4(benchmark::State& state) {
  fpdesc::Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto cand = sentence(rng, len);
  const std::vector<fpdesc::Tokens> refs{sentence(rng, len), sentence(rng, len)};
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::metrics::bleu(cand, refs, 4));
}
BENCHMARK(BM_Bleu4)->Arg(20)->Arg(60)->Arg(200);

void BM_RougeL(benchmark::State& state) {
  fpdesc::Rng rng(2);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = sentence(rng, len), b = sentence(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::metrics::rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(20)->Arg(60)->Arg(200);

void BM_Meteor(benchmark::State& state) {
  fpdesc::Rng rng(3);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = sentence(rng, len), b = sentence(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::metrics::meteor(a, b));
}
BENCHMARK(BM_Meteor)->Arg(20)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
