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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fpdesc::cli {

namespace fs = std::filesystem;

using ConfigMap = std::map<std::string, std::string>;

/// Hyperparameters grouped by section ("dsic", "tbdg", "captioner", "skipgram", "train").
struct ConfigSections {
  std::map<std::string, ConfigMap> sections;

  const ConfigMap& section(const std::string& name) const;
  void set(std::string_view qualified_key, std::string value);
};

/// Lines of `section.key = value`; '#' starts a comment.
ConfigSections parse_config_text(std::string_view text);
ConfigSections load_config_file(const fs::path& path);

/// Everything one invocation needs. Empty strings mean "not given".
struct RunConfig {
  std::string command;  // e.g. "train tbdg"
  std::string manifest;
  std::string root;
  std::string out;
  std::string config_file;
  std::string vocab;
  std::string keywords;
  std::string features_file;
  std::string detections;
  std::string pairs;
  std::string model_dir;
  std::string classes;
  std::string grammar;
  std::string input;
  std::string embeddings;
  std::uint64_t seed = 0;
  std::optional<std::size_t> epochs;
  double iou_thresh = 0.5;
  std::size_t min_count = 1;
  ConfigSections config;

  /// Throws IoError for input paths that do not exist and loads the config file.
  void validate();
  fs::path corpus_root() const;
  ConfigMap train_section() const;
};

/// Reproducibility record written as <out>/<command>.run.json.
class RunRecord {
 public:
  explicit RunRecord(const RunConfig& config);
  void set_config(const std::string& section, const ConfigMap& values);
  void add_output(const fs::path& path);
  void add_input(const std::string& name, const std::string& value);
  void write() const;

 private:
  const RunConfig& config_;
  nlohmann::ordered_json config_json_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::object();
  std::vector<std::string> outputs_;
};

std::string format_number(double value);

void write_text_file(const fs::path& path, std::string_view text);
/// One value per line, shortest round-trip form.
void write_loss_history(const fs::path& path, const std::vector<double>& losses);

}  // namespace fpdesc::cli
