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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpdesc/corpus.hpp"
#include "fpdesc/geometry.hpp"

namespace fpdesc::tmpl {

struct RoomInstance {
  RoomClass room = RoomClass::Bedroom;
  std::optional<BBox> bbox;
};

struct DecorInstance {
  std::string label;
  std::optional<BBox> bbox;
};

struct TemplateInput {
  std::vector<RoomInstance> rooms;
  std::vector<DecorInstance> decors;
  std::vector<std::pair<RoomClass, RoomClass>> adjacency;
};

struct Noun {
  std::string singular;
  std::string plural;
};

/// Line-oriented sentence templates.
///
///   opening: This house has {count:room}.
///   room: The {room} area contains {decors}.
///   unattached: Other features include {decors}.
///   adjacency: The {room_a} is next to the {room_b}.
///   fallback: No recognizable rooms were found.
///   noun: kitchen_bar = kitchen bar | kitchen bars
///
/// Blank lines and lines starting with '#' are ignored. A template that is absent is skipped.
struct TemplateGrammar {
  std::optional<std::string> opening;
  std::optional<std::string> room;
  std::optional<std::string> unattached;
  std::optional<std::string> adjacency;
  std::string fallback = "No recognizable rooms were found.";
  std::map<std::string, Noun> nouns;

  static TemplateGrammar defaults();
  static TemplateGrammar parse(std::string_view text);
  static TemplateGrammar load(const std::filesystem::path& path);
  std::string to_text() const;

  /// Noun forms for a room or decor label: overrides first, then "_" -> " " with regular
  /// English plurals.
  Noun noun(std::string_view label) const;
};

/// "2 bedrooms", "1 bathroom" for rooms; "a sink", "an oven", "3 chairs" for decors.
std::string count_phrase(std::size_t count, const Noun& noun, bool use_article);

/// "a", "a and b", "a, b and c".
std::string join_list(const std::vector<std::string>& items);

/// Rooms and decors are counted and ordered by (count desc, name asc). Each decor belongs to
/// the smallest room box containing its centre; the rest are listed as unattached.
std::string generate_template_description(const TemplateInput& input, const TemplateGrammar& grammar);

/// Room labels and symbols of a record.
TemplateInput template_input_from_record(const FloorPlanRecord& record);

/// {"rooms": [{"class", "bbox"?}], "decors": [{"label", "bbox"?}], "adjacency": [[a, b]]}.
/// Decor labels are checked against the class list.
TemplateInput parse_template_input(std::string_view json,
                                   const DecorClassList& classes = DecorClassList::defaults());

}  // namespace fpdesc::tmpl
