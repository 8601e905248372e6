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

#include "fpdesc/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "fpdesc/error.hpp"

namespace fpdesc::nn {
namespace {

double evaluate(const LossBuilder& loss) {
  Tape tape;
  return tape.scalar(loss(tape));
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

bool GradCheckReport::passed() const {
  return std::all_of(params.begin(), params.end(), [](const ParamCheck& p) { return p.passed; });
}

double GradCheckReport::max_relative_error() const {
  double worst = 0;
  for (const auto& p : params) worst = std::max(worst, p.max_relative_error);
  return worst;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const LossBuilder& loss, std::span<const NamedTensor> params,
                           double tolerance, double step) {
  const double first = evaluate(loss);
  const double second = evaluate(loss);
  if (!bitwise_equal(first, second)) {
    throw NonDeterministicError("grad_check: loss closure returned " + std::to_string(first) +
                                " then " + std::to_string(second));
  }

  zero_grads(params);
  {
    Tape tape;
    tape.backward(loss(tape));
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  report.step = step;
  for (const auto& p : params) {
    Tensor& t = *p.tensor;
    const std::vector<float> analytic(t.grad().begin(), t.grad().end());
    ParamCheck check;
    check.name = p.name;
    check.entries = t.numel();
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const float original = t[i];
      const float plus = static_cast<float>(original + step);
      const float minus = static_cast<float>(original - step);
      t[i] = plus;
      const double loss_plus = evaluate(loss);
      t[i] = minus;
      const double loss_minus = evaluate(loss);
      t[i] = original;
      const double numeric =
          (loss_plus - loss_minus) / (static_cast<double>(plus) - static_cast<double>(minus));
      const double err = relative_error(analytic[i], numeric);
      if (err > check.max_relative_error || i == 0) {
        check.max_relative_error = err;
        check.worst_index = i;
        check.analytic_at_worst = analytic[i];
        check.numeric_at_worst = numeric;
      }
    }
    check.passed = check.max_relative_error < tolerance;
    report.params.push_back(std::move(check));
  }
  return report;
}

std::string to_json(const GradCheckReport& report) {
  nlohmann::json doc;
  doc["tolerance"] = report.tolerance;
  doc["step"] = report.step;
  doc["passed"] = report.passed();
  doc["max_relative_error"] = report.max_relative_error();
  doc["params"] = nlohmann::json::array();
  for (const auto& p : report.params) {
    doc["params"].push_back({{"name", p.name},
                             {"entries", p.entries},
                             {"max_relative_error", p.max_relative_error},
                             {"worst_index", p.worst_index},
                             {"analytic", p.analytic_at_worst},
                             {"numeric", p.numeric_at_worst},
                             {"passed", p.passed}});
  }
  return doc.dump(2);
}

}  // namespace fpdesc::nn
