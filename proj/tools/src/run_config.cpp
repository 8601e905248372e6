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

#include "run_config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fpdesc/error.hpp"
#include "fpdesc/version.hpp"

namespace fpdesc::cli {
namespace {

constexpr std::array<std::string_view, 5> kSections = {"dsic", "tbdg", "captioner", "skipgram", "train"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void require_exists(const std::string& path, const char* what) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw IoError(std::string(what) + " does not exist", path);
}

}  // namespace

const ConfigMap& ConfigSections::section(const std::string& name) const {
  static const ConfigMap kEmpty;
  auto it = sections.find(name);
  return it == sections.end() ? kEmpty : it->second;
}

void ConfigSections::set(std::string_view qualified_key, std::string value) {
  const auto dot = qualified_key.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == qualified_key.size()) {
    throw InvalidArgument("config key '" + std::string(qualified_key) + "' must look like section.key");
  }
  const std::string_view section = qualified_key.substr(0, dot);
  bool known = false;
  for (auto s : kSections) known = known || s == section;
  if (!known) {
    throw InvalidArgument("unknown config section '" + std::string(section) +
                          "' (expected dsic, tbdg, captioner, skipgram or train)");
  }
  sections[std::string(section)][std::string(qualified_key.substr(dot + 1))] = std::move(value);
}

ConfigSections parse_config_text(std::string_view text) {
  ConfigSections config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value' in config", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("empty key or value in config", line_no);
    config.set(key, std::string(value));
  }
  return config;
}

ConfigSections load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() {
  require_exists(manifest, "manifest");
  require_exists(root, "corpus root");
  require_exists(config_file, "config file");
  require_exists(vocab, "vocabulary file");
  require_exists(keywords, "keyword list");
  require_exists(features_file, "features file");
  require_exists(detections, "detections file");
  require_exists(pairs, "pairs file");
  require_exists(model_dir, "model directory");
  require_exists(classes, "class list");
  require_exists(grammar, "grammar file");
  require_exists(input, "input file");
  if (!config_file.empty()) config = load_config_file(config_file);
  if (epochs) config.sections["train"]["epochs"] = std::to_string(*epochs);
}

fs::path RunConfig::corpus_root() const {
  if (!root.empty()) return root;
  const fs::path parent = fs::path(manifest).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

ConfigMap RunConfig::train_section() const { return config.section("train"); }

RunRecord::RunRecord(const RunConfig& config) : config_(config) {}

void RunRecord::set_config(const std::string& section, const ConfigMap& values) {
  auto& entry = config_json_[section];
  entry = nlohmann::ordered_json::object();
  for (const auto& [k, v] : values) entry[k] = v;
}

void RunRecord::add_output(const fs::path& path) { outputs_.push_back(path.filename().string()); }

void RunRecord::add_input(const std::string& name, const std::string& value) {
  if (!value.empty()) inputs_[name] = value;
}

void RunRecord::write() const {
  if (config_.out.empty()) return;
  nlohmann::ordered_json doc;
  doc["command"] = config_.command;
  doc["seed"] = config_.seed;
  doc["inputs"] = inputs_;
  doc["config"] = config_json_;
  doc["outputs"] = outputs_;
  doc["versions"] = {{"fpdesc", kVersion}, {"checkpoint_format", kCheckpointFormatVersion}};
  std::string name = config_.command;
  for (char& c : name) {
    if (c == ' ') c = '_';
  }
  write_text_file(fs::path(config_.out) / (name + ".run.json"), doc.dump(2) + "\n");
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file", path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed", path.string());
}

void write_loss_history(const fs::path& path, const std::vector<double>& losses) {
  std::string text;
  for (double l : losses) text += format_number(l) + "\n";
  write_text_file(path, text);
}

}  // namespace fpdesc::cli
