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

#include "fpdesc/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "../format_util.hpp"
#include "fpdesc/error.hpp"

namespace fpdesc::nn {
namespace {

constexpr const char* kFormatLine = "format fpdesc-checkpoint 1";

std::string shape_text(const std::vector<std::size_t>& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

std::vector<std::size_t> parse_shape(const std::string& text, std::size_t line) {
  std::vector<std::size_t> shape;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    auto v = detail::parse_double(part);
    if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw ParseError("bad shape '" + text + "'", line);
    }
    shape.push_back(static_cast<std::size_t>(*v));
  }
  if (shape.empty()) throw ParseError("empty shape", line);
  return shape;
}

std::uint64_t parse_u64(const std::string& text, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected an unsigned integer, got '" + text + "'", line);
  }
  return v;
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".manifest");
}

std::filesystem::path blob_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".bin");
}

void write_f32_le(std::ostream& out, std::span<const float> values) {
  std::vector<char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) buf[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_f32_le(std::istream& in, std::span<float> values, const std::filesystem::path& path) {
  std::vector<unsigned char> buf(values.size() * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw IoError("truncated float data in " + path.string(), path.string());
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buf[i * 4 + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
}

void save_checkpoint(const std::filesystem::path& prefix, const CheckpointMeta& meta,
                     std::span<const NamedTensor> params) {
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  std::ofstream manifest(manifest_path(prefix), std::ios::binary);
  std::ofstream blob(blob_path(prefix), std::ios::binary);
  if (!manifest || !blob) {
    throw IoError("cannot write checkpoint " + prefix.string(), prefix.string());
  }
  manifest << kFormatLine << '\n';
  manifest << "model " << meta.model << '\n';
  manifest << "seed " << meta.seed << '\n';
  manifest << "step " << meta.step << '\n';
  for (const auto& [key, value] : meta.config) manifest << "config " << key << ' ' << value << '\n';
  std::uint64_t offset = 0;
  for (const auto& p : params) {
    manifest << "param " << p.name << ' ' << shape_text(p.tensor->shape()) << ' ' << offset << '\n';
    write_f32_le(blob, p.tensor->data());
    offset += p.tensor->numel() * 4;
  }
  if (!manifest || !blob) {
    throw IoError("failed writing checkpoint " + prefix.string(), prefix.string());
  }
}

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& prefix) {
  const auto path = manifest_path(prefix);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint manifest " + path.string(), path.string());
  CheckpointManifest out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_format = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format") {
      if (line != kFormatLine) throw ParseError("unsupported checkpoint format: " + line, line_no);
      saw_format = true;
    } else if (key == "model") {
      ss >> out.meta.model;
    } else if (key == "seed" || key == "step") {
      std::string v;
      ss >> v;
      (key == "seed" ? out.meta.seed : out.meta.step) = parse_u64(v, line_no);
    } else if (key == "config") {
      std::string k;
      ss >> k;
      std::string rest;
      std::getline(ss, rest);
      out.meta.config[k] = std::string(detail::trim(rest));
    } else if (key == "param") {
      CheckpointEntry e;
      std::string shape, offset;
      ss >> e.name >> shape >> offset;
      if (e.name.empty() || shape.empty() || offset.empty()) {
        throw ParseError("param line needs name, shape and offset", line_no);
      }
      e.shape = parse_shape(shape, line_no);
      e.byte_offset = parse_u64(offset, line_no);
      out.entries.push_back(std::move(e));
    } else {
      throw ParseError("unknown checkpoint key '" + key + "'", line_no);
    }
  }
  if (!saw_format) throw ParseError("missing format line in " + path.string(), 1);
  return out;
}

CheckpointMeta load_checkpoint(const std::filesystem::path& prefix,
                               const std::string& expected_model,
                               std::span<const NamedTensor> params) {
  auto manifest = read_checkpoint_manifest(prefix);
  if (manifest.meta.model != expected_model) {
    throw SchemaError("checkpoint " + prefix.string() + " holds model '" + manifest.meta.model +
                      "', expected '" + expected_model + "'");
  }
  if (manifest.entries.size() != params.size()) {
    throw SchemaError("checkpoint " + prefix.string() + " has " +
                      std::to_string(manifest.entries.size()) + " parameters, model expects " +
                      std::to_string(params.size()));
  }
  const auto bin = blob_path(prefix);
  std::ifstream blob(bin, std::ios::binary);
  if (!blob) throw IoError("cannot open checkpoint data " + bin.string(), bin.string());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = manifest.entries[i];
    Tensor& t = *params[i].tensor;
    if (e.name != params[i].name || e.shape != t.shape()) {
      throw SchemaError("checkpoint parameter " + e.name + " [" + shape_text(e.shape) +
                        "] does not match " + params[i].name + " [" + shape_text(t.shape()) +
                        "]");
    }
    blob.seekg(static_cast<std::streamoff>(e.byte_offset));
    read_f32_le(blob, t.data(), bin);
  }
  return manifest.meta;
}

}  // namespace fpdesc::nn
