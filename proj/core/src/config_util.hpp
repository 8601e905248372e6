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

#include <map>
#include <string>

#include "format_util.hpp"
#include "fpdesc/error.hpp"

namespace fpdesc::detail {

using ConfigMap = std::map<std::string, std::string>;

inline void reject_unknown_keys(const ConfigMap& values, const ConfigMap& known, const char* model) {
  for (const auto& entry : values) {
    if (!known.count(entry.first)) {
      throw InvalidArgument(std::string("unknown ") + model + " config key '" + entry.first + "'");
    }
  }
}

inline std::size_t get_size(const ConfigMap& m, const std::string& key, std::size_t fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  auto v = parse_size(it->second);
  if (!v) throw InvalidArgument("config " + key + " must be a non-negative integer, got '" + it->second + "'");
  return *v;
}

inline double get_double(const ConfigMap& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  auto v = parse_double(it->second);
  if (!v) throw InvalidArgument("config " + key + " must be a number, got '" + it->second + "'");
  return *v;
}

}  // namespace fpdesc::detail
