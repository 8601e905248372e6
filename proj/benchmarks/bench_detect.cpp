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

#include "fpdesc/detect_eval.hpp"
#include "fpdesc/rng.hpp"

namespace {

void BM_EvaluateDetections(benchmark::State& state) {
  fpdesc::Rng rng(1);
  const auto images = static_cast<std::size_t>(state.range(0));
  const std::vector<std::string> labels{"sink", "oven", "bed", "toilet"};
  std::map<std::string, std::vector<fpdesc::SymbolAnnotation>> gts;
  std::vector<fpdesc::detect::Detection> dets;
  for (std::size_t i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    auto& image_gts = gts[id];
    for (int k = 0; k < 20; ++k) {
      const fpdesc::BBox box{rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(5, 40), rng.uniform(5, 40)};
      const auto& label = labels[rng.below(labels.size())];
      image_gts.push_back({box, label});
      const fpdesc::BBox jitter{box.x + rng.uniform(-3, 3), box.y + rng.uniform(-3, 3), box.w, box.h};
      dets.push_back({id, label, jitter, rng.uniform()});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(fpdesc::detect::evaluate_detections(dets, gts, 0.5, labels));
}
BENCHMARK(BM_EvaluateDetections)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
