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

#include "fpdesc/template_desc.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "format_util.hpp"
#include "fpdesc/error.hpp"

namespace fpdesc::tmpl {
namespace {

constexpr const char* kDefaultGrammar = R"(# Sentence templates for the semi-structured description baseline.
opening: This house has {count:room}.
room: The {room} area contains {decors}.
adjacency: The {room_a} is next to the {room_b}.
unattached: Other features include {decors}.
fallback: No recognizable rooms were found.
noun: stairs = staircase | staircases
noun: tv = TV | TVs
noun: living_room = living room | living rooms
)";

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string regular_plural(const std::string& word) {
  auto ends = [&](std::string_view suffix) {
    return word.size() >= suffix.size() && word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return word + "es";
  if (word.size() >= 2 && word.back() == 'y' && !std::strchr("aeiou", word[word.size() - 2])) {
    return word.substr(0, word.size() - 1) + "ies";
  }
  return word + "s";
}

const std::vector<std::string>& allowed_slots(const std::string& kind) {
  static const std::map<std::string, std::vector<std::string>> slots{
      {"opening", {"count:room"}},
      {"room", {"room", "decors"}},
      {"unattached", {"decors"}},
      {"adjacency", {"room_a", "room_b"}},
      {"fallback", {}}};
  return slots.at(kind);
}

void check_slots(const std::string& kind, const std::string& text, std::size_t line) {
  const auto& allowed = allowed_slots(kind);
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const std::size_t close = text.find('}', pos);
    if (close == std::string::npos) throw ParseError("unterminated slot in " + kind + " template", line);
    const std::string slot = text.substr(pos + 1, close - pos - 1);
    if (std::find(allowed.begin(), allowed.end(), slot) == allowed.end()) {
      throw SchemaError("template line " + std::to_string(line) + ": slot {" + slot +
                        "} cannot be filled in a " + kind + " template");
    }
    pos = close + 1;
  }
}

std::string fill(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [slot, value] : values) {
    const std::string key = "{" + slot + "}";
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
      text.replace(pos, key.size(), value);
      pos += value.size();
    }
  }
  return text;
}

std::string room_key(RoomClass room) {
  std::string name = lower(room_class_name(room));
  std::replace(name.begin(), name.end(), ' ', '_');
  return name;
}

/// (count desc, name asc) over a label -> count map.
std::vector<std::pair<std::string, std::size_t>> ranked(const std::map<std::string, std::size_t>& counts) {
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::string capitalize_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::optional<BBox> bbox_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.contains("bbox") || j.at("bbox").is_null()) return std::nullopt;
  const auto& b = j.at("bbox");
  if (!b.is_array() || b.size() != 4) throw SchemaError(where + ": bbox must be [x, y, w, h]");
  BBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  if (auto problem = bbox_problem(box); !problem.empty()) throw SchemaError(where + ": " + problem);
  return box;
}

RoomClass room_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": room class must be a string");
  auto room = parse_room_class(j.get<std::string>());
  if (!room) throw UnknownLabelError(where + ": unknown room class '" + j.get<std::string>() + "'");
  return *room;
}

}  // namespace

TemplateGrammar TemplateGrammar::defaults() { return parse(kDefaultGrammar); }

TemplateGrammar TemplateGrammar::parse(std::string_view text) {
  TemplateGrammar g;
  g.fallback.clear();
  bool saw_fallback = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line(detail::trim(raw));
    if (line.empty() || line.front() == '#') continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'kind: template'", line_no);
    const std::string kind(detail::trim(std::string_view(line).substr(0, colon)));
    const std::string body(detail::trim(std::string_view(line).substr(colon + 1)));
    if (kind == "noun") {
      const std::size_t eq = body.find('=');
      const std::size_t bar = body.find('|');
      if (eq == std::string::npos || bar == std::string::npos || bar < eq) {
        throw ParseError("noun lines read 'noun: label = singular | plural'", line_no);
      }
      const std::string label(detail::trim(std::string_view(body).substr(0, eq)));
      Noun n{std::string(detail::trim(std::string_view(body).substr(eq + 1, bar - eq - 1))),
             std::string(detail::trim(std::string_view(body).substr(bar + 1)))};
      if (label.empty() || n.singular.empty() || n.plural.empty()) {
        throw ParseError("noun override has an empty field", line_no);
      }
      g.nouns[lower(label)] = std::move(n);
      continue;
    }
    if (kind != "opening" && kind != "room" && kind != "unattached" && kind != "adjacency" &&
        kind != "fallback") {
      throw ParseError("unknown template kind '" + kind + "'", line_no);
    }
    if (body.empty()) throw ParseError(kind + " template is empty", line_no);
    check_slots(kind, body, line_no);
    if (kind == "opening") g.opening = body;
    if (kind == "room") g.room = body;
    if (kind == "unattached") g.unattached = body;
    if (kind == "adjacency") g.adjacency = body;
    if (kind == "fallback") {
      g.fallback = body;
      saw_fallback = true;
    }
  }
  if (!saw_fallback) g.fallback = "No recognizable rooms were found.";
  if (!g.opening && !g.room && !g.unattached && !g.adjacency) {
    throw SchemaError("template grammar defines no sentence templates");
  }
  return g;
}

TemplateGrammar TemplateGrammar::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template grammar " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string TemplateGrammar::to_text() const {
  std::string out;
  if (opening) out += "opening: " + *opening + "\n";
  if (room) out += "room: " + *room + "\n";
  if (adjacency) out += "adjacency: " + *adjacency + "\n";
  if (unattached) out += "unattached: " + *unattached + "\n";
  out += "fallback: " + fallback + "\n";
  for (const auto& [label, n] : nouns) out += "noun: " + label + " = " + n.singular + " | " + n.plural + "\n";
  return out;
}

Noun TemplateGrammar::noun(std::string_view label) const {
  std::string key = lower(label);
  std::replace(key.begin(), key.end(), ' ', '_');
  if (auto it = nouns.find(key); it != nouns.end()) return it->second;
  std::string singular = key;
  std::replace(singular.begin(), singular.end(), '_', ' ');
  return Noun{singular, regular_plural(singular)};
}

std::string count_phrase(std::size_t count, const Noun& noun, bool use_article) {
  if (count == 1) {
    if (!use_article) return "1 " + noun.singular;
    const char first = static_cast<char>(std::tolower(static_cast<unsigned char>(noun.singular.front())));
    return std::string(std::strchr("aeiou", first) ? "an " : "a ") + noun.singular;
  }
  return std::to_string(count) + " " + noun.plural;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string generate_template_description(const TemplateInput& input, const TemplateGrammar& grammar) {
  if (input.rooms.empty() && input.decors.empty()) return grammar.fallback;

  std::map<std::string, std::size_t> room_counts;
  for (const auto& r : input.rooms) ++room_counts[room_key(r.room)];

  std::map<std::string, std::map<std::string, std::size_t>> decors_by_room;
  std::map<std::string, std::size_t> unattached;
  for (const auto& d : input.decors) {
    const RoomInstance* home = nullptr;
    if (d.bbox) {
      for (const auto& r : input.rooms) {
        if (!r.bbox || !r.bbox->contains_point(d.bbox->center_x(), d.bbox->center_y())) continue;
        if (!home || r.bbox->area() < home->bbox->area()) home = &r;
      }
    }
    if (home) {
      ++decors_by_room[room_key(home->room)][lower(d.label)];
    } else {
      ++unattached[lower(d.label)];
    }
  }

  auto decor_list = [&](const std::map<std::string, std::size_t>& counts) {
    std::vector<std::string> items;
    for (const auto& [label, n] : ranked(counts)) items.push_back(count_phrase(n, grammar.noun(label), true));
    return join_list(items);
  };

  std::vector<std::string> sentences;
  const auto rooms = ranked(room_counts);
  if (grammar.opening && !rooms.empty()) {
    std::vector<std::string> items;
    for (const auto& [room, n] : rooms) items.push_back(count_phrase(n, grammar.noun(room), false));
    sentences.push_back(fill(*grammar.opening, {{"count:room", join_list(items)}}));
  }
  if (grammar.room) {
    for (const auto& [room, n] : rooms) {
      auto it = decors_by_room.find(room);
      if (it == decors_by_room.end()) continue;
      sentences.push_back(fill(*grammar.room, {{"room", grammar.noun(room).singular}, {"decors", decor_list(it->second)}}));
    }
  }
  if (grammar.adjacency) {
    for (const auto& [a, b] : input.adjacency) {
      if (!room_counts.count(room_key(a)) || !room_counts.count(room_key(b))) continue;
      sentences.push_back(fill(*grammar.adjacency, {{"room_a", grammar.noun(room_key(a)).singular},
                                                    {"room_b", grammar.noun(room_key(b)).singular}}));
    }
  }
  if (grammar.unattached && !unattached.empty()) {
    sentences.push_back(fill(*grammar.unattached, {{"decors", decor_list(unattached)}}));
  }
  if (sentences.empty()) return grammar.fallback;
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += capitalize_first(s);
  }
  return out;
}

TemplateInput template_input_from_record(const FloorPlanRecord& record) {
  TemplateInput in;
  for (const auto& r : record.room_labels) in.rooms.push_back(RoomInstance{r.room, r.bbox});
  for (const auto& s : record.symbols) in.decors.push_back(DecorInstance{s.label, s.bbox});
  return in;
}

TemplateInput parse_template_input(std::string_view json, const DecorClassList& classes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("template input: ") + e.what(),
                     detail::line_of_offset(json, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw SchemaError("template input must be a JSON object");
  TemplateInput in;
  try {
    if (doc.contains("rooms")) {
      std::size_t i = 0;
      for (const auto& r : doc.at("rooms")) {
        const std::string where = "rooms[" + std::to_string(i++) + "]";
        if (!r.is_object() || !r.contains("class")) throw SchemaError(where + ": needs a class");
        in.rooms.push_back(RoomInstance{room_from_json(r.at("class"), where), bbox_from_json(r, where)});
      }
    }
    if (doc.contains("decors")) {
      std::size_t i = 0;
      for (const auto& d : doc.at("decors")) {
        const std::string where = "decors[" + std::to_string(i++) + "]";
        if (!d.is_object() || !d.contains("label")) throw SchemaError(where + ": needs a label");
        const std::string label = d.at("label").get<std::string>();
        if (!classes.contains(label)) throw UnknownLabelError(where + ": unknown decor class '" + label + "'");
        in.decors.push_back(DecorInstance{label, bbox_from_json(d, where)});
      }
    }
    if (doc.contains("adjacency")) {
      std::size_t i = 0;
      for (const auto& pair : doc.at("adjacency")) {
        const std::string where = "adjacency[" + std::to_string(i++) + "]";
        if (!pair.is_array() || pair.size() != 2) throw SchemaError(where + ": expected [room, room]");
        in.adjacency.emplace_back(room_from_json(pair[0], where), room_from_json(pair[1], where));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("template input: ") + e.what());
  }
  return in;
}

}  // namespace fpdesc::tmpl
