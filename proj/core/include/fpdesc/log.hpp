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

#include <functional>
#include <string>
#include <string_view>

namespace fpdesc::log {

using Sink = std::function<void(std::string_view)>;

/// Routes warnings somewhere other than stderr. Passing an empty function restores stderr.
void set_warning_sink(Sink sink);

void warn(std::string_view message);

/// Installs a sink for the lifetime of the object, then restores stderr.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(Sink sink) { set_warning_sink(std::move(sink)); }
  ~ScopedWarningSink() { set_warning_sink({}); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;
};

}  // namespace fpdesc::log
