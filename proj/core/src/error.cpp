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

#include "fpdesc/error.hpp"

#include <utility>

namespace fpdesc {

ParseError::ParseError(const std::string& what, std::size_t line)
    : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

InvalidBoxError::InvalidBoxError(const std::string& what, std::size_t index)
    : DataError("invalid box at index " + std::to_string(index) + ": " + what),
      index_(index) {}

DuplicateIdError::DuplicateIdError(const std::string& id)
    : DataError("duplicate record id: " + id), id_(id) {}

IoError::IoError(const std::string& what, std::string path)
    : DataError(what + ": " + path), path_(std::move(path)) {}

}  // namespace fpdesc
