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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpdesc/nn/tensor.hpp"

namespace fpdesc::nn {

struct CheckpointMeta {
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::map<std::string, std::string> config;
};

struct CheckpointEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::uint64_t byte_offset = 0;
};

struct CheckpointManifest {
  CheckpointMeta meta;
  std::vector<CheckpointEntry> entries;
};

std::filesystem::path manifest_path(const std::filesystem::path& prefix);
std::filesystem::path blob_path(const std::filesystem::path& prefix);

/// Writes prefix.manifest (text) and prefix.bin (little-endian float32, parameters back to
/// back in the given order).
void save_checkpoint(const std::filesystem::path& prefix, const CheckpointMeta& meta,
                     std::span<const NamedTensor> params);

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& prefix);

/// Fills already-shaped tensors from a checkpoint. Names, order and shapes must match and
/// the model tag must equal expected_model.
CheckpointMeta load_checkpoint(const std::filesystem::path& prefix,
                               const std::string& expected_model,
                               std::span<const NamedTensor> params);

/// Raw little-endian float32 I/O shared with the embedding checkpoint.
void write_f32_le(std::ostream& out, std::span<const float> values);
void read_f32_le(std::istream& in, std::span<float> values, const std::filesystem::path& path);

}  // namespace fpdesc::nn
