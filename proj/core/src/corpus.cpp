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

#include "fpdesc/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "fpdesc/error.hpp"
#include "fpdesc/log.hpp"
#include "fpdesc/textprep.hpp"
#include "format_util.hpp"

namespace fpdesc {
namespace {

namespace pt = boost::property_tree;
using nlohmann::json;

struct RoomKeyword {
  RoomClass room;
  Tokens tokens;
};

const std::vector<RoomKeyword>& room_keywords() {
  static const std::vector<RoomKeyword> kKeywords = {
      {RoomClass::Bedroom, {"bedroom"}},
      {RoomClass::Bathroom, {"bathroom"}},
      {RoomClass::Kitchen, {"kitchen"}},
      {RoomClass::Hall, {"hall"}},
      {RoomClass::LivingRoom, {"living", "room"}},
  };
  return kKeywords;
}

bool matches_at(const Tokens& tokens, std::size_t start, const Tokens& keyword) {
  if (start + keyword.size() > tokens.size()) return false;
  for (std::size_t k = 0; k < keyword.size(); ++k) {
    const std::string& t = tokens[start + k];
    if (t == keyword[k]) continue;
    if (k + 1 == keyword.size() && t == keyword[k] + "s") continue;
    return false;
  }
  return true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double xml_coordinate(const pt::ptree& bndbox, const char* key, std::size_t index) {
  auto child = bndbox.get_optional<std::string>(key);
  if (!child) throw SchemaError("object " + std::to_string(index) + ": missing bndbox/" + key);
  auto value = detail::parse_double(detail::trim(*child));
  if (!value) {
    throw SchemaError("object " + std::to_string(index) + ": bndbox/" + key +
                      " is not a number");
  }
  return *value;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double json_number(const json& region, const char* key, std::size_t index) {
  auto it = region.find(key);
  if (it == region.end()) {
    throw SchemaError("region " + std::to_string(index) + ": missing field '" + key + "'");
  }
  if (!it->is_number()) {
    throw SchemaError("region " + std::to_string(index) + ": field '" + key +
                      "' is not a number");
  }
  return it->get<double>();
}

json number_json(double v) {
  if (v == static_cast<double>(static_cast<long long>(v))) return static_cast<long long>(v);
  return v;
}

json bbox_json(const BBox& b) {
  return json::array({number_json(b.x), number_json(b.y), number_json(b.w), number_json(b.h)});
}

std::size_t whitespace_word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

// Re-throws data errors with the offending file named, keeping the error class.
template <typename Fn>
auto with_file_context(const std::filesystem::path& path, Fn&& fn) {
  const std::string where = path.string() + ": ";
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(where + e.what(), e.line());
  } catch (const InvalidBoxError& e) {
    throw InvalidBoxError(where + e.what(), e.index());
  } catch (const UnknownLabelError& e) {
    throw UnknownLabelError(where + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(where + e.what());
  }
}

}  // namespace

std::string_view room_class_name(RoomClass room) {
  switch (room) {
    case RoomClass::Bedroom: return "Bedroom";
    case RoomClass::Bathroom: return "Bathroom";
    case RoomClass::Kitchen: return "Kitchen";
    case RoomClass::Hall: return "Hall";
    case RoomClass::LivingRoom: return "Living room";
  }
  return "Bedroom";
}

std::optional<RoomClass> parse_room_class(std::string_view name) {
  const std::string folded = normalize_whitespace(name);
  std::string lower;
  for (char c : folded) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "bedroom") return RoomClass::Bedroom;
  if (lower == "bathroom") return RoomClass::Bathroom;
  if (lower == "kitchen") return RoomClass::Kitchen;
  if (lower == "hall") return RoomClass::Hall;
  if (lower == "living room" || lower == "living_room" || lower == "livingroom") {
    return RoomClass::LivingRoom;
  }
  return std::nullopt;
}

std::optional<RoomClass> room_class_of_caption(std::string_view phrase) {
  const Tokens tokens = tokenize(phrase);
  std::set<RoomClass> found;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& kw : room_keywords()) {
      if (matches_at(tokens, i, kw.tokens)) found.insert(kw.room);
    }
  }
  if (found.size() != 1) return std::nullopt;
  return *found.begin();
}

std::vector<RoomLabel> derive_room_labels(std::span<const RegionCaption> regions) {
  std::vector<RoomLabel> labels;
  for (const auto& region : regions) {
    if (auto room = room_class_of_caption(region.phrase)) labels.push_back({region.bbox, *room});
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Decor classes

DecorClassList::DecorClassList(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw InvalidArgument("decor class list is empty");
}

const DecorClassList& DecorClassList::defaults() {
  static const DecorClassList kDefaults({"bathtub", "bed", "chair", "closet", "door",
                                         "kitchen_bar", "oven", "refrigerator", "shower",
                                         "sink", "sofa", "stairs", "table", "toilet", "tv",
                                         "washing_machine"});
  return kDefaults;
}

DecorClassList DecorClassList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open class list", path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view name = detail::trim(line);
    if (!name.empty()) names.emplace_back(name);
  }
  return DecorClassList(std::move(names));
}

bool DecorClassList::contains(std::string_view label) const {
  return std::find(names_.begin(), names_.end(), label) != names_.end();
}

// ---------------------------------------------------------------------------
// Symbol XML

std::vector<SymbolAnnotation> parse_symbol_xml(std::string_view bytes) {
  return parse_symbol_xml(bytes, DecorClassList::defaults());
}

std::vector<SymbolAnnotation> parse_symbol_xml(std::string_view bytes,
                                               const DecorClassList& classes) {
  pt::ptree tree;
  std::istringstream in{std::string(bytes)};
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), e.line());
  }
  auto annotation = tree.get_child_optional("annotation");
  if (!annotation) throw SchemaError("missing <annotation> root element");

  std::vector<SymbolAnnotation> symbols;
  std::size_t index = 0;
  for (const auto& [tag, object] : *annotation) {
    if (tag != "object") continue;
    auto name = object.get_optional<std::string>("name");
    if (!name || detail::trim(*name).empty()) {
      throw SchemaError("object " + std::to_string(index) + ": missing <name>");
    }
    auto bndbox = object.get_child_optional("bndbox");
    if (!bndbox) throw SchemaError("object " + std::to_string(index) + ": missing <bndbox>");
    const double xmin = xml_coordinate(*bndbox, "xmin", index);
    const double ymin = xml_coordinate(*bndbox, "ymin", index);
    const double xmax = xml_coordinate(*bndbox, "xmax", index);
    const double ymax = xml_coordinate(*bndbox, "ymax", index);
    if (xmax <= xmin) throw InvalidBoxError("xmax <= xmin", index);
    if (ymax <= ymin) throw InvalidBoxError("ymax <= ymin", index);
    SymbolAnnotation symbol{bbox_from_corners(xmin, ymin, xmax, ymax),
                            std::string(detail::trim(*name))};
    if (auto problem = bbox_problem(symbol.bbox); !problem.empty()) {
      throw InvalidBoxError(problem, index);
    }
    if (!classes.contains(symbol.label)) {
      throw UnknownLabelError("object " + std::to_string(index) + ": label '" + symbol.label +
                              "' is not in the decor class list");
    }
    symbols.push_back(std::move(symbol));
    ++index;
  }
  return symbols;
}

std::string write_symbol_xml(std::span<const SymbolAnnotation> symbols) {
  std::ostringstream out;
  out << "<annotation>\n";
  for (const auto& s : symbols) {
    out << "  <object>\n"
        << "    <name>" << xml_escape(s.label) << "</name>\n"
        << "    <bndbox>\n"
        << "      <xmin>" << detail::format_number(s.bbox.x) << "</xmin>\n"
        << "      <ymin>" << detail::format_number(s.bbox.y) << "</ymin>\n"
        << "      <xmax>" << detail::format_number(s.bbox.right()) << "</xmax>\n"
        << "      <ymax>" << detail::format_number(s.bbox.bottom()) << "</ymax>\n"
        << "    </bndbox>\n"
        << "  </object>\n";
  }
  out << "</annotation>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Region JSON

std::vector<RegionCaption> parse_region_json(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(),
                     detail::line_of_offset(bytes, e.byte));
  }
  if (!doc.is_object()) throw SchemaError("region file must be a JSON object");
  auto regions_it = doc.find("regions");
  if (regions_it == doc.end() || !regions_it->is_array()) {
    throw SchemaError("region file needs a 'regions' array");
  }

  std::vector<RegionCaption> regions;
  std::size_t index = 0;
  for (const auto& region : *regions_it) {
    if (!region.is_object()) {
      throw SchemaError("region " + std::to_string(index) + ": not an object");
    }
    auto phrase_it = region.find("phrase");
    if (phrase_it == region.end() || !phrase_it->is_string()) {
      throw SchemaError("region " + std::to_string(index) + ": missing field 'phrase'");
    }
    BBox box{json_number(region, "x", index), json_number(region, "y", index),
             json_number(region, "width", index), json_number(region, "height", index)};
    if (auto problem = bbox_problem(box); !problem.empty()) throw InvalidBoxError(problem, index);
    std::string phrase = normalize_whitespace(phrase_it->get<std::string>());
    if (phrase.empty()) {
      throw SchemaError("region " + std::to_string(index) + ": phrase is empty");
    }
    regions.push_back({box, std::move(phrase)});
    ++index;
  }
  return regions;
}

std::string write_region_json(std::string_view id, std::span<const RegionCaption> regions) {
  json doc;
  doc["id"] = std::string(id);
  doc["regions"] = json::array();
  for (const auto& r : regions) {
    doc["regions"].push_back({{"x", number_json(r.bbox.x)},
                              {"y", number_json(r.bbox.y)},
                              {"width", number_json(r.bbox.w)},
                              {"height", number_json(r.bbox.h)},
                              {"phrase", r.phrase}});
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<FloorPlanRecord> load_corpus(const std::filesystem::path& root,
                                         const std::filesystem::path& manifest) {
  return load_corpus(root, manifest, DecorClassList::defaults());
}

std::vector<FloorPlanRecord> load_corpus(const std::filesystem::path& root,
                                         const std::filesystem::path& manifest,
                                         const DecorClassList& classes) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest", manifest.string());
  auto resolve = [&root](std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_absolute() ? path : root / path;
  };

  std::vector<FloorPlanRecord> records;
  std::map<std::string, std::size_t> first_line_of_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;

    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.emplace_back(detail::trim(std::string_view(line).substr(
          start, tab == std::string::npos ? std::string::npos : tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 4 || cols.size() > 5) {
      throw ParseError("manifest rows need 4 or 5 tab-separated columns", line_no);
    }
    if (cols[0].empty()) throw ParseError("empty record id", line_no);
    if (auto [it, inserted] = first_line_of_id.emplace(cols[0], line_no); !inserted) {
      throw DuplicateIdError(cols[0] + " (manifest lines " + std::to_string(it->second) +
                             " and " + std::to_string(line_no) + ")");
    }

    FloorPlanRecord record;
    record.id = cols[0];
    const auto xml_path = resolve(cols[1]);
    const auto json_path = resolve(cols[2]);
    const std::string xml_bytes = read_file(xml_path);
    const std::string json_bytes = read_file(json_path);
    record.symbols =
        with_file_context(xml_path, [&] { return parse_symbol_xml(xml_bytes, classes); });
    record.regions = with_file_context(json_path, [&] { return parse_region_json(json_bytes); });
    record.paragraph = read_file(resolve(cols[3]));
    if (cols.size() == 5 && !cols[4].empty()) {
      const auto image = resolve(cols[4]);
      if (std::filesystem::exists(image)) {
        record.image_path = image;
      } else {
        log::warn("record " + record.id + ": image not found, continuing without it: " +
                  image.string());
      }
    }
    record.room_labels = derive_room_labels(record.regions);
    records.push_back(std::move(record));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Statistics

CorpusStats corpus_stats(std::span<const FloorPlanRecord> records, std::size_t min_count) {
  if (records.empty()) throw InvalidArgument("corpus_stats: empty corpus");
  if (min_count < 1) throw InvalidArgument("corpus_stats: min_count must be >= 1");
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::map<std::string, std::size_t> counts;
  for (const auto& record : records) {
    words += whitespace_word_count(record.paragraph);
    sentences += split_sentences(record.paragraph).size();
    for (auto& token : tokenize(record.paragraph)) ++counts[token];
  }
  CorpusStats stats;
  stats.record_count = records.size();
  stats.mean_paragraph_words = static_cast<double>(words) / static_cast<double>(records.size());
  stats.mean_sentences_per_paragraph =
      static_cast<double>(sentences) / static_cast<double>(records.size());
  stats.vocabulary_size_at_cutoff = static_cast<std::size_t>(std::count_if(
      counts.begin(), counts.end(), [&](const auto& kv) { return kv.second >= min_count; }));
  return stats;
}

std::string corpus_stats_to_json(const CorpusStats& stats) {
  json doc = {{"record_count", stats.record_count},
              {"mean_paragraph_words", stats.mean_paragraph_words},
              {"mean_sentences_per_paragraph", stats.mean_sentences_per_paragraph},
              {"vocabulary_size_at_cutoff", stats.vocabulary_size_at_cutoff}};
  return doc.dump(2) + "\n";
}

std::string corpus_to_json(std::span<const FloorPlanRecord> records) {
  json doc = json::array();
  for (const auto& r : records) {
    json rec;
    rec["id"] = r.id;
    rec["image_path"] = r.image_path ? json(r.image_path->string()) : json(nullptr);
    rec["symbols"] = json::array();
    for (const auto& s : r.symbols) {
      rec["symbols"].push_back({{"label", s.label}, {"bbox", bbox_json(s.bbox)}});
    }
    rec["regions"] = json::array();
    for (const auto& g : r.regions) {
      rec["regions"].push_back({{"phrase", g.phrase}, {"bbox", bbox_json(g.bbox)}});
    }
    rec["room_labels"] = json::array();
    for (const auto& l : r.room_labels) {
      rec["room_labels"].push_back(
          {{"room", std::string(room_class_name(l.room))}, {"bbox", bbox_json(l.bbox)}});
    }
    rec["paragraph"] = r.paragraph;
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

}  // namespace fpdesc
