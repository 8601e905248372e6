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

#include "fpdesc/error.hpp"
#include "fpdesc/features.hpp"
#include "fpdesc/image.hpp"
#include "test_util.hpp"

using namespace fpdesc;

namespace {

GrayImage flat(std::size_t w, std::size_t h, std::uint8_t value) {
  return GrayImage{w, h, std::vector<std::uint8_t>(w * h, value)};
}

}  // namespace

TEST_CASE("top regions by area with stable ties") {
  const std::vector<BBox> boxes{{0, 0, 1, 1}, {0, 0, 5, 5}, {0, 0, 2, 2}, {0, 0, 4, 4},
                                {0, 0, 3, 3}, {0, 0, 6, 1}, {0, 0, 2, 3}, {0, 0, 7, 7}};
  CHECK(select_top_regions(boxes) == std::vector<std::size_t>{7, 1, 3, 4, 5});
  CHECK(select_top_regions(boxes, 2) == std::vector<std::size_t>{7, 1});
  const std::vector<BBox> two{{0, 0, 2, 2}};
  CHECK(select_top_regions(two).size() == 1);

  const std::vector<BBox> same(3, BBox{1, 1, 2, 2});
  CHECK(select_top_regions(same) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("identical boxes give identical features") {
  GrayImage img = flat(40, 40, 0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i % 251);
  const std::vector<BBox> boxes{{3, 4, 10, 12}, {3, 4, 10, 12}};
  const auto f = extract_region_features(img, boxes, 16);
  REQUIRE(f.size() == 2);
  CHECK(f[0].values.size() == 16);
  CHECK(f[0].values == f[1].values);
  CHECK(f[0].bbox == boxes[0]);
}

TEST_CASE("white and black crops differ and black projects to zero") {
  const std::vector<BBox> box{{0, 0, 20, 20}};
  const auto white = extract_region_features(flat(20, 20, 255), box, 8);
  const auto black = extract_region_features(flat(20, 20, 0), box, 8);
  double diff = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(black[0].values[i] == 0.0f);
    diff += std::abs(white[0].values[i]);
  }
  CHECK(diff > 0.1);

  const auto other_seed = extract_region_features(flat(20, 20, 255), box, 8, 99);
  CHECK(other_seed[0].values != white[0].values);
  CHECK_THROWS_AS(extract_region_features(flat(20, 20, 0), box, 0), InvalidArgument);
  CHECK_THROWS_AS(extract_region_features(GrayImage{}, box, 8), InvalidArgument);
}

TEST_CASE("features come from the record image") {
  testutil::ScratchDir dir("features_pgm");
  write_pgm(dir / "a.pgm", flat(16, 16, 128));
  FloorPlanRecord rec;
  rec.id = "r";
  const std::vector<BBox> box{{0, 0, 8, 8}};
  CHECK_THROWS_AS(extract_region_features(rec, box, 4), DataError);
  rec.image_path = dir / "a.pgm";
  CHECK(extract_region_features(rec, box, 4)[0].values == extract_region_features(flat(16, 16, 128), box, 4)[0].values);
  const GrayImage back = read_pgm(dir / "a.pgm");
  CHECK(back.width == 16);
  CHECK(back.at(3, 3) == 128);
}

TEST_CASE("features file parsing") {
  const auto map = parse_features("# header\nplan_a\n1 2 3\n4 5 6\n\nplan_b\n-1.5 0 2e-1\n");
  REQUIRE(map.size() == 2);
  CHECK(map.at("plan_a").size() == 2);
  CHECK(map.at("plan_b")[0] == std::vector<float>{-1.5f, 0.0f, 0.2f});
  CHECK_THROWS_AS(parse_features("1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_features("a\n1 2\n1 2 3\n"), ParseError);
  CHECK_THROWS_AS(parse_features("a\n1 x\n"), ParseError);
  CHECK_THROWS_AS(parse_features("a\n1 2\na\n1 2\n"), DuplicateIdError);

  testutil::ScratchDir dir("features_file");
  write_features_file(dir / "f.txt", map);
  CHECK(read_features_file(dir / "f.txt") == map);
  CHECK_THROWS_AS(read_features_file(dir / "none.txt"), IoError);

  FloorPlanRecord rec;
  rec.id = "plan_a";
  rec.regions = {{BBox{1, 1, 2, 2}, "a hall"}};
  const auto rows = features_for_record(map, rec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bbox == BBox{1, 1, 2, 2});
  CHECK(rows[1].bbox == BBox{});
  rec.id = "plan_z";
  CHECK_THROWS_AS(features_for_record(map, rec), SchemaError);
}

TEST_CASE("toy features file matches the fixture records") {
  const auto map = read_features_file(testutil::fixture_dir() / "toy" / "features.txt");
  CHECK(map.size() == 10);
  for (const auto& [id, rows] : map) {
    for (const auto& r : rows) CHECK(r.size() == 8);
  }
}
