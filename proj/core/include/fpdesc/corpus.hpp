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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpdesc/geometry.hpp"

namespace fpdesc {

struct SymbolAnnotation {
  BBox bbox;
  std::string label;

  friend bool operator==(const SymbolAnnotation&, const SymbolAnnotation&) = default;
};

struct RegionCaption {
  BBox bbox;
  std::string phrase;

  friend bool operator==(const RegionCaption&, const RegionCaption&) = default;
};

enum class RoomClass { Bedroom, Bathroom, Kitchen, Hall, LivingRoom };

inline constexpr std::size_t kNumRoomClasses = 5;

/// "Bedroom", "Bathroom", "Kitchen", "Hall", "Living room".
std::string_view room_class_name(RoomClass room);
std::optional<RoomClass> parse_room_class(std::string_view name);

/// The room class a caption names, when it names exactly one.
std::optional<RoomClass> room_class_of_caption(std::string_view phrase);

struct RoomLabel {
  BBox bbox;
  RoomClass room = RoomClass::Bedroom;

  friend bool operator==(const RoomLabel&, const RoomLabel&) = default;
};

std::vector<RoomLabel> derive_room_labels(std::span<const RegionCaption> regions);

struct FloorPlanRecord {
  std::string id;
  std::optional<std::filesystem::path> image_path;
  std::vector<SymbolAnnotation> symbols;
  std::vector<RegionCaption> regions;
  std::string paragraph;
  std::vector<RoomLabel> room_labels;
};

/// The configured decor symbol classes (16 by default).
class DecorClassList {
 public:
  static const DecorClassList& defaults();
  /// One class name per line; blank lines and '#' comments are ignored.
  static DecorClassList load(const std::filesystem::path& path);
  explicit DecorClassList(std::vector<std::string> names);

  bool contains(std::string_view label) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
};

/// VOC-like XML: <annotation><object><name/><bndbox><xmin/>..<ymax/></bndbox></object>...
/// Labels are checked against the default class list.
std::vector<SymbolAnnotation> parse_symbol_xml(std::string_view bytes);
std::vector<SymbolAnnotation> parse_symbol_xml(std::string_view bytes,
                                               const DecorClassList& classes);
std::string write_symbol_xml(std::span<const SymbolAnnotation> symbols);

/// {"id": "...", "regions": [{"x","y","width","height","phrase"}, ...]}
std::vector<RegionCaption> parse_region_json(std::string_view bytes);
std::string write_region_json(std::string_view id, std::span<const RegionCaption> regions);

/// Loads every row of a tab-separated manifest (id, xml, json, paragraph[, image]).
/// Relative paths resolve against root.
std::vector<FloorPlanRecord> load_corpus(const std::filesystem::path& root,
                                         const std::filesystem::path& manifest);
std::vector<FloorPlanRecord> load_corpus(const std::filesystem::path& root,
                                         const std::filesystem::path& manifest,
                                         const DecorClassList& classes);

struct CorpusStats {
  std::size_t record_count = 0;
  double mean_paragraph_words = 0;
  double mean_sentences_per_paragraph = 0;
  std::size_t vocabulary_size_at_cutoff = 0;
};

/// Word counts use whitespace tokens; sentences split on '.', '!' and '?'. The vocabulary
/// size counts regular (non-special) tokens seen at least min_count times.
CorpusStats corpus_stats(std::span<const FloorPlanRecord> records, std::size_t min_count = 1);

std::string corpus_stats_to_json(const CorpusStats& stats);

/// Full in-memory corpus as one JSON document (used as the ingest cache).
std::string corpus_to_json(std::span<const FloorPlanRecord> records);

}  // namespace fpdesc
