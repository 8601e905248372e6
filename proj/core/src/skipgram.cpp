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

#include "fpdesc/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "format_util.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/nn/checkpoint.hpp"
#include "fpdesc/rng.hpp"

namespace fpdesc {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0;
    for (std::uint64_t c : counts) {
      total += c == 0 ? 0.0 : std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
  }

  TokenId sample(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<TokenId>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

EmbeddingTable init_embeddings(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidArgument("embedding dim must be at least 2");
  EmbeddingTable table;
  table.vocab_size = vocab_size;
  table.dim = dim;
  table.seed = seed;
  table.data.resize(vocab_size * dim);
  Rng rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (float& v : table.data) v = static_cast<float>(rng.uniform(-half, half));
  return table;
}

SkipgramResult train_skipgram(std::span<const std::vector<TokenId>> corpus, std::size_t vocab_size,
                              const SkipgramConfig& config) {
  if (config.dim < 2) throw InvalidArgument("skip-gram dim must be at least 2");
  if (corpus.empty()) throw InvalidArgument("skip-gram corpus is empty");
  if (vocab_size < config.negatives + 1) {
    throw InvalidArgument("vocabulary of " + std::to_string(vocab_size) +
                          " is smaller than negatives+1 = " +
                          std::to_string(config.negatives + 1));
  }
  if (config.window < 1) throw InvalidArgument("skip-gram window must be at least 1");

  std::vector<std::uint64_t> counts(vocab_size, 0);
  std::uint64_t total_tokens = 0;
  for (const auto& sentence : corpus) {
    for (TokenId id : sentence) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
        throw InvalidArgument("token id " + std::to_string(id) + " outside vocabulary of " +
                              std::to_string(vocab_size));
      }
      if (id == kPadId) continue;
      ++counts[id];
      ++total_tokens;
    }
  }
  if (total_tokens == 0) throw InvalidArgument("skip-gram corpus has no non-pad tokens");

  SkipgramResult result;
  result.table = init_embeddings(vocab_size, config.dim, config.seed);
  if (config.epochs == 0) return result;

  const std::size_t dim = config.dim;
  std::vector<double> in(result.table.data.begin(), result.table.data.end());
  std::vector<double> out(vocab_size * dim, 0.0);
  std::vector<double> grad_in(dim);
  NegativeSampler sampler(counts);
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ull);

  const double total_work = static_cast<double>(total_tokens) * static_cast<double>(config.epochs);
  double processed = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0;
    std::uint64_t pairs = 0;
    for (const auto& sentence : corpus) {
      for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
        const TokenId centre = sentence[pos];
        if (centre == kPadId) continue;
        const double lr =
            config.learning_rate * std::max(1e-4, 1.0 - processed / total_work);
        processed += 1;
        double* v = &in[static_cast<std::size_t>(centre) * dim];
        const std::size_t lo = pos >= config.window ? pos - config.window : 0;
        const std::size_t hi = std::min(sentence.size(), pos + config.window + 1);
        for (std::size_t cpos = lo; cpos < hi; ++cpos) {
          const TokenId context = sentence[cpos];
          if (cpos == pos || context == kPadId) continue;
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          double pair_loss = 0;
          for (std::size_t k = 0; k <= config.negatives; ++k) {
            TokenId target = context;
            double label = 1;
            if (k > 0) {
              target = sampler.sample(rng);
              if (target == context) continue;
              label = 0;
            }
            double* u = &out[static_cast<std::size_t>(target) * dim];
            double score = 0;
            for (std::size_t d = 0; d < dim; ++d) score += v[d] * u[d];
            pair_loss -= label > 0 ? log_sigmoid(score) : log_sigmoid(-score);
            const double g = lr * (label - sigmoid(score));
            for (std::size_t d = 0; d < dim; ++d) {
              grad_in[d] += g * u[d];
              u[d] += g * v[d];
            }
          }
          for (std::size_t d = 0; d < dim; ++d) v[d] += grad_in[d];
          loss_sum += pair_loss;
          ++pairs;
        }
      }
    }
    result.loss_history.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  for (std::size_t i = 0; i < in.size(); ++i) result.table.data[i] = static_cast<float>(in[i]);
  return result;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_similarity: vectors differ in length");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

void save_embeddings(const std::filesystem::path& prefix, const EmbeddingTable& table) {
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  std::ofstream manifest(nn::manifest_path(prefix), std::ios::binary);
  std::ofstream blob(nn::blob_path(prefix), std::ios::binary);
  if (!manifest || !blob) throw IoError("cannot write embeddings " + prefix.string(), prefix.string());
  manifest << "format fpdesc-embeddings 1\n";
  manifest << "vocab_size " << table.vocab_size << '\n';
  manifest << "dim " << table.dim << '\n';
  manifest << "seed " << table.seed << '\n';
  nn::write_f32_le(blob, table.data);
  if (!manifest || !blob) throw IoError("failed writing embeddings " + prefix.string(), prefix.string());
}

EmbeddingTable load_embeddings(const std::filesystem::path& prefix) {
  const auto mpath = nn::manifest_path(prefix);
  std::ifstream manifest(mpath);
  if (!manifest) throw IoError("cannot open " + mpath.string(), mpath.string());
  EmbeddingTable table;
  bool have_vocab = false, have_dim = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string key, value;
    ss >> key >> value;
    if (key == "format") continue;
    auto number = detail::parse_double(value);
    if (!number || *number < 0) throw ParseError("bad value for " + key, line_no);
    if (key == "vocab_size") {
      table.vocab_size = static_cast<std::size_t>(*number);
      have_vocab = true;
    } else if (key == "dim") {
      table.dim = static_cast<std::size_t>(*number);
      have_dim = true;
    } else if (key == "seed") {
      std::from_chars(value.data(), value.data() + value.size(), table.seed);
    } else {
      throw ParseError("unknown embedding manifest key '" + key + "'", line_no);
    }
  }
  if (!have_vocab || !have_dim) throw SchemaError(mpath.string() + ": needs vocab_size and dim");
  table.data.resize(table.vocab_size * table.dim);
  const auto bpath = nn::blob_path(prefix);
  std::ifstream blob(bpath, std::ios::binary);
  if (!blob) throw IoError("cannot open " + bpath.string(), bpath.string());
  nn::read_f32_le(blob, table.data, bpath);
  return table;
}

}  // namespace fpdesc
