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

#include "fpdesc/error.hpp"
#include "fpdesc/template_desc.hpp"
#include "test_util.hpp"

using namespace fpdesc;
using namespace fpdesc::tmpl;

namespace {

std::string golden(const std::string& name) {
  return testutil::read_file(testutil::golden_dir() / "template" / name);
}

}  // namespace

TEST_CASE("count phrases and lists") {
  const auto g = TemplateGrammar::defaults();
  CHECK(count_phrase(2, g.noun("bedroom"), false) == "2 bedrooms");
  CHECK(count_phrase(1, g.noun("bathroom"), false) == "1 bathroom");
  CHECK(count_phrase(1, g.noun("sink"), true) == "a sink");
  CHECK(count_phrase(1, g.noun("oven"), true) == "an oven");
  CHECK(count_phrase(3, g.noun("chair"), true) == "3 chairs");
  CHECK(count_phrase(2, g.noun("bathtub"), true) == "2 bathtubs");
  CHECK(count_phrase(2, g.noun("washing_machine"), true) == "2 washing machines");
  CHECK(count_phrase(2, g.noun("stairs"), true) == "2 staircases");
  CHECK(g.noun("box").plural == "boxes");
  CHECK(g.noun("library").plural == "libraries");
  CHECK(g.noun("tray").plural == "trays");
  CHECK(join_list({"a"}) == "a");
  CHECK(join_list({"a", "b"}) == "a and b");
  CHECK(join_list({"a", "b", "c"}) == "a, b and c");
  CHECK(join_list({}).empty());
}

TEST_CASE("descriptions") {
  const auto g = TemplateGrammar::defaults();
  CHECK(generate_template_description(TemplateInput{}, g) == "No recognizable rooms were found.");

  TemplateInput one;
  one.rooms = {{RoomClass::Kitchen, BBox{0, 0, 10, 10}}};
  one.decors = {{"sink", BBox{1, 1, 2, 2}}};
  CHECK(generate_template_description(one, g) == "This house has 1 kitchen. The kitchen area contains a sink.");

  TemplateInput loose;
  loose.decors = {{"toilet", std::nullopt}, {"bed", std::nullopt}, {"toilet", std::nullopt}};
  CHECK(generate_template_description(loose, g) == "Other features include 2 toilets and a bed.");

  const auto only_fallback = TemplateGrammar::parse("opening: We see {count:room}.\nfallback: Nothing.\n");
  CHECK(generate_template_description(loose, only_fallback) == "Nothing.");
}

TEST_CASE("grammar parsing") {
  const auto g = TemplateGrammar::parse(TemplateGrammar::defaults().to_text());
  CHECK(g.to_text() == TemplateGrammar::defaults().to_text());
  CHECK_THROWS_AS(TemplateGrammar::parse("opening has no colon\n"), ParseError);
  CHECK_THROWS_AS(TemplateGrammar::parse("closing: Bye.\n"), ParseError);
  CHECK_THROWS_AS(TemplateGrammar::parse("room: The {room\n"), ParseError);
  CHECK_THROWS_AS(TemplateGrammar::parse("noun: tv = TV\n"), ParseError);
  CHECK_THROWS_AS(TemplateGrammar::parse("# nothing\n"), SchemaError);
  CHECK_THROWS_AS(TemplateGrammar::load(testutil::fixture_dir() / "malformed" / "unknown_slot.grammar"),
                  SchemaError);
  CHECK_THROWS_AS(TemplateGrammar::load(testutil::fixture_dir() / "none.grammar"), IoError);
}

TEST_CASE("template input parsing") {
  const auto in = parse_template_input(R"({"rooms":[{"class":"Hall"}],"decors":[{"label":"sofa","bbox":[1,2,3,4]}]})");
  REQUIRE(in.rooms.size() == 1);
  CHECK(in.rooms[0].room == RoomClass::Hall);
  CHECK_FALSE(in.rooms[0].bbox.has_value());
  CHECK(in.decors[0].bbox == BBox{1, 2, 3, 4});
  CHECK_THROWS_AS(parse_template_input(R"({"rooms":[{"class":"Attic"}]})"), UnknownLabelError);
  CHECK_THROWS_AS(parse_template_input(R"({"decors":[{"label":"piano"}]})"), UnknownLabelError);
  CHECK_THROWS_AS(parse_template_input(R"({"decors":[{"label":"sofa","bbox":[1,2]}]})"), SchemaError);
  CHECK_THROWS_AS(parse_template_input(R"({"rooms":)"), ParseError);
  CHECK_THROWS_AS(parse_template_input("[]"), SchemaError);
}

TEST_CASE("record input uses room labels and symbols") {
  FloorPlanRecord rec;
  rec.room_labels = {{BBox{0, 0, 10, 10}, RoomClass::Bedroom}};
  rec.symbols = {{BBox{2, 2, 2, 2}, "bed"}};
  const auto in = template_input_from_record(rec);
  CHECK(generate_template_description(in, TemplateGrammar::defaults()) ==
        "This house has 1 bedroom. The bedroom area contains a bed.");
}

TEST_CASE("golden descriptions") {
  for (const char* name : {"basic", "nested"}) {
    INFO(name);
    const auto in = parse_template_input(golden(std::string(name) + ".json"));
    CHECK(generate_template_description(in, TemplateGrammar::defaults()) + "\n" ==
          golden(std::string(name) + ".expected.txt"));
  }
  const auto grammar = TemplateGrammar::load(testutil::golden_dir() / "template" / "custom.grammar");
  CHECK(generate_template_description(parse_template_input(golden("custom.json")), grammar) + "\n" ==
        golden("custom.expected.txt"));
}
