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
#include <span>
#include <vector>

#include "fpdesc/textprep.hpp"

namespace fpdesc {

/// Row-major vocab_size x dim matrix of word vectors.
struct EmbeddingTable {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<float> data;

  std::span<const float> row(TokenId id) const {
    return std::span<const float>(data).subspan(static_cast<std::size_t>(id) * dim, dim);
  }
  std::span<float> row(TokenId id) {
    return std::span<float>(data).subspan(static_cast<std::size_t>(id) * dim, dim);
  }
};

struct SkipgramConfig {
  std::size_t dim = 150;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  double learning_rate = 0.025;
};

struct SkipgramResult {
  EmbeddingTable table;
  /// Mean negative-sampling loss per epoch, measured before each pair's update.
  std::vector<double> loss_history;
};

/// Skip-gram with negative sampling. Negatives are drawn from unigram counts raised to
/// 0.75; the learning rate decays linearly to zero over all epochs. PAD ids never act as
/// centre, context or negative words.
SkipgramResult train_skipgram(std::span<const std::vector<TokenId>> corpus, std::size_t vocab_size,
                              const SkipgramConfig& config);

/// Seeded initialization: entries uniform in [-0.5/dim, 0.5/dim).
EmbeddingTable init_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// prefix.manifest holds vocab_size, dim and seed; prefix.bin the little-endian floats.
void save_embeddings(const std::filesystem::path& prefix, const EmbeddingTable& table);
EmbeddingTable load_embeddings(const std::filesystem::path& prefix);

}  // namespace fpdesc
