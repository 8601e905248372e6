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
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace testutil {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(FPDESC_FIXTURE_DIR); }
inline fs::path golden_dir() { return fs::path(FPDESC_GOLDEN_DIR); }

/// Fresh directory under the build tree, emptied on construction.
class ScratchDir {
 public:
  explicit ScratchDir(std::string_view name) : path_(fs::path(FPDESC_SCRATCH_DIR) / std::string(name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view child) const { return path_ / std::string(child); }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
