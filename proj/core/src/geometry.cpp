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

#include "fpdesc/geometry.hpp"

#include <cmath>

namespace fpdesc {

std::string bbox_problem(const BBox& box) {
  if (!std::isfinite(box.x) || !std::isfinite(box.y) || !std::isfinite(box.w) ||
      !std::isfinite(box.h)) {
    return "non-finite coordinate";
  }
  if (box.x < 0 || box.y < 0) return "negative origin";
  if (box.w <= 0) return "width must be positive";
  if (box.h <= 0) return "height must be positive";
  return {};
}

BBox bbox_from_corners(double xmin, double ymin, double xmax, double ymax) {
  return BBox{xmin, ymin, xmax - xmin, ymax - ymin};
}

}  // namespace fpdesc
