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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpdesc/corpus.hpp"
#include "fpdesc/geometry.hpp"
#include "fpdesc/image.hpp"

namespace fpdesc {

struct RegionFeature {
  std::vector<float> values;
  BBox bbox;
};

inline constexpr std::size_t kCropSide = 32;
inline constexpr std::uint64_t kDefaultProjectionSeed = 0x5EEDF00Dull;

/// Indices of the k largest boxes by area; equal areas keep the lower index first. The
/// result is in ranking order.
std::vector<std::size_t> select_top_regions(std::span<const BBox> boxes, std::size_t k = 5);

/// Crops each box (clamped to the image), resamples it bilinearly to 32x32 with pixel
/// values scaled to [0, 1], and projects the 1024 values to d dimensions with a fixed
/// matrix drawn from projection_seed.
std::vector<RegionFeature> extract_region_features(const GrayImage& image,
                                                   std::span<const BBox> boxes, std::size_t d,
                                                   std::uint64_t projection_seed = kDefaultProjectionSeed);

/// Loads the record's image and extracts features. Throws DataError when the record has no
/// image.
std::vector<RegionFeature> extract_region_features(const FloorPlanRecord& record,
                                                   std::span<const BBox> boxes, std::size_t d,
                                                   std::uint64_t projection_seed = kDefaultProjectionSeed);

/// Per-record feature rows keyed by record id.
using FeatureMap = std::map<std::string, std::vector<std::vector<float>>>;

/// Text file: a line holding only a record id opens a block; each following line holds the
/// space-separated floats of one region (at least two values per row).
FeatureMap read_features_file(const std::filesystem::path& path);
FeatureMap parse_features(std::string_view text);
void write_features_file(const std::filesystem::path& path, const FeatureMap& features);

/// Pairs feature rows with the record's region boxes (rows follow the region order of the
/// record; surplus rows get empty boxes).
std::vector<RegionFeature> features_for_record(const FeatureMap& features,
                                               const FloorPlanRecord& record);

}  // namespace fpdesc
