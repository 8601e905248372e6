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

#include "fpdesc/image.hpp"

#include <fstream>
#include <iterator>
#include <cctype>
#include <string>

#include "fpdesc/error.hpp"

namespace fpdesc {
namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

std::size_t parse_dim(const std::string& token, const std::string& path) {
  try {
    std::size_t used = 0;
    long long value = std::stoll(token, &used);
    if (used != token.size() || value <= 0) throw std::invalid_argument(token);
    return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw IoError("malformed PGM header", path);
  }
}

std::size_t parse_sample(const std::string& token, std::size_t maxval,
                         const std::string& path) {
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(token, &used);
  } catch (const std::exception&) {
    throw IoError("malformed PGM sample", path);
  }
  if (used != token.size() || value > maxval) throw IoError("malformed PGM sample", path);
  return value;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image", path.string());
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("not a PGM image", path.string());

  GrayImage image;
  image.width = parse_dim(next_token(in), path.string());
  image.height = parse_dim(next_token(in), path.string());
  const std::size_t maxval = parse_dim(next_token(in), path.string());
  if (maxval > 65535) throw IoError("unsupported PGM maxval", path.string());

  const std::size_t count = image.width * image.height;
  image.pixels.resize(count);
  auto rescale = [maxval](std::size_t v) {
    return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  };

  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      std::string token = next_token(in);
      if (token.empty()) throw IoError("truncated PGM data", path.string());
      image.pixels[i] = rescale(parse_sample(token, maxval, path.string()));
    }
    return image;
  }

  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError("truncated PGM data", path.string());
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t v = bytes_per_sample == 2 ? (std::size_t{raw[2 * i]} << 8) | raw[2 * i + 1]
                                          : raw[i];
    image.pixels[i] = rescale(v);
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image", path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace fpdesc
