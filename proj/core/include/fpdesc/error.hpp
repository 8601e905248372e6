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
#include <stdexcept>
#include <string>

namespace fpdesc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with input data (files, annotations). The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidBoxError : public DataError {
 public:
  InvalidBoxError(const std::string& what, std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class UnknownLabelError : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(const std::string& id);
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class IoError : public DataError {
 public:
  IoError(const std::string& what, std::string path);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A caller broke an operation's precondition (bad sizes, empty inputs, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A loss or gradient became NaN/Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class NonDeterministicError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpdesc
