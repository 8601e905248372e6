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

#include <string>

namespace fpdesc {

/// Axis-aligned box in pixels, (x, y) is the top-left corner.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const noexcept { return w * h; }
  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double center_x() const noexcept { return x + w / 2; }
  double center_y() const noexcept { return y + h / 2; }
  bool contains_point(double px, double py) const noexcept {
    return px >= x && px <= right() && py >= y && py <= bottom();
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Reason the box violates the BBox invariants, or empty when it is valid.
std::string bbox_problem(const BBox& box);

inline bool is_valid(const BBox& box) { return bbox_problem(box).empty(); }

/// Builds a box from corner coordinates (VOC convention).
BBox bbox_from_corners(double xmin, double ymin, double xmax, double ymax);

}  // namespace fpdesc
