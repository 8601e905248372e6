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

#include "fpdesc/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "format_util.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/rng.hpp"

namespace fpdesc {
namespace {

constexpr std::size_t kCropValues = kCropSide * kCropSide;

std::vector<float> crop_resample(const GrayImage& image, const BBox& box) {
  const double W = static_cast<double>(image.width);
  const double H = static_cast<double>(image.height);
  const double x0 = std::clamp(box.x, 0.0, W);
  const double y0 = std::clamp(box.y, 0.0, H);
  const double x1 = std::clamp(box.right(), 0.0, W);
  const double y1 = std::clamp(box.bottom(), 0.0, H);
  std::vector<float> out(kCropValues, 0.0f);
  if (x1 <= x0 || y1 <= y0) return out;
  auto pixel = [&](long x, long y) {
    x = std::clamp<long>(x, 0, static_cast<long>(image.width) - 1);
    y = std::clamp<long>(y, 0, static_cast<long>(image.height) - 1);
    return image.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) / 255.0;
  };
  for (std::size_t r = 0; r < kCropSide; ++r) {
    const double sy = y0 + (static_cast<double>(r) + 0.5) * (y1 - y0) / kCropSide - 0.5;
    const long iy = static_cast<long>(std::floor(sy));
    const double fy = sy - static_cast<double>(iy);
    for (std::size_t c = 0; c < kCropSide; ++c) {
      const double sx = x0 + (static_cast<double>(c) + 0.5) * (x1 - x0) / kCropSide - 0.5;
      const long ix = static_cast<long>(std::floor(sx));
      const double fx = sx - static_cast<double>(ix);
      const double top = pixel(ix, iy) * (1 - fx) + pixel(ix + 1, iy) * fx;
      const double bottom = pixel(ix, iy + 1) * (1 - fx) + pixel(ix + 1, iy + 1) * fx;
      out[r * kCropSide + c] = static_cast<float>(top * (1 - fy) + bottom * fy);
    }
  }
  return out;
}

std::vector<float> projection_matrix(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(kCropValues));
  std::vector<float> m(d * kCropValues);
  for (float& v : m) v = static_cast<float>(rng.uniform(-bound, bound));
  return m;
}

}  // namespace

std::vector<std::size_t> select_top_regions(std::span<const BBox> boxes, std::size_t k) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].area() > boxes[b].area();
  });
  if (order.size() > k) order.resize(k);
  return order;
}

std::vector<RegionFeature> extract_region_features(const GrayImage& image,
                                                   std::span<const BBox> boxes, std::size_t d,
                                                   std::uint64_t projection_seed) {
  if (d == 0) throw InvalidArgument("feature dimension must be positive");
  if (image.width == 0 || image.height == 0) throw InvalidArgument("image is empty");
  const auto proj = projection_matrix(d, projection_seed);
  std::vector<RegionFeature> out;
  out.reserve(boxes.size());
  for (const BBox& box : boxes) {
    const auto crop = crop_resample(image, box);
    RegionFeature f;
    f.bbox = box;
    f.values.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0;
      const float* row = &proj[i * kCropValues];
      for (std::size_t j = 0; j < kCropValues; ++j) acc += static_cast<double>(row[j]) * crop[j];
      f.values[i] = static_cast<float>(acc);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<RegionFeature> extract_region_features(const FloorPlanRecord& record,
                                                   std::span<const BBox> boxes, std::size_t d,
                                                   std::uint64_t projection_seed) {
  if (!record.image_path) {
    throw DataError("record " + record.id +
                    " has no image; supply precomputed region features with --features-file");
  }
  return extract_region_features(read_pgm(*record.image_path), boxes, d, projection_seed);
}

FeatureMap parse_features(std::string_view text) {
  FeatureMap out;
  std::vector<std::vector<float>>* current = nullptr;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = detail::trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t p = 0;
    while (p < line.size()) {
      while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
      std::size_t q = p;
      while (q < line.size() && line[q] != ' ' && line[q] != '\t') ++q;
      if (q > p) fields.push_back(line.substr(p, q - p));
      p = q;
    }
    if (fields.size() == 1) {
      const std::string id(fields[0]);
      if (out.count(id)) throw DuplicateIdError(id);
      current = &out[id];
      width = 0;
    } else {
      if (!current) throw ParseError("feature row before any record id", line_no);
      std::vector<float> row;
      row.reserve(fields.size());
      for (auto f : fields) {
        auto v = detail::parse_float(f);
        if (!v || !std::isfinite(*v)) {
          throw ParseError("bad feature value '" + std::string(f) + "'", line_no);
        }
        row.push_back(*v);
      }
      if (width != 0 && row.size() != width) {
        throw ParseError("feature row has " + std::to_string(row.size()) + " values, expected " +
                             std::to_string(width),
                         line_no);
      }
      width = row.size();
      current->push_back(std::move(row));
    }
    if (end == text.size()) break;
  }
  return out;
}

FeatureMap read_features_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open features file " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_features(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_features_file(const std::filesystem::path& path, const FeatureMap& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write features file " + path.string(), path.string());
  for (const auto& [id, rows] : features) {
    out << id << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ' ';
        out << detail::format_number(row[i]);
      }
      out << '\n';
    }
  }
}

std::vector<RegionFeature> features_for_record(const FeatureMap& features,
                                               const FloorPlanRecord& record) {
  auto it = features.find(record.id);
  if (it == features.end()) {
    throw SchemaError("features file has no block for record " + record.id);
  }
  std::vector<RegionFeature> out;
  for (std::size_t i = 0; i < it->second.size(); ++i) {
    RegionFeature f;
    f.values = it->second[i];
    if (i < record.regions.size()) f.bbox = record.regions[i].bbox;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fpdesc
