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

#include "fpdesc/dsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "config_util.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/rng.hpp"

namespace fpdesc::dsic {
namespace {

using nn::LstmWeights;
using nn::Param;
using nn::Tape;
using nn::Tensor;
using nn::Var;

struct Bound {
  Param pool_M, pool_b;
  LstmWeights sentence;
  Param stop_W, stop_b;
  Param fc1_W, fc1_b, fc2_W, fc2_b;
  Param embed;
  LstmWeights word1, word2;
  Param out_W, out_b;
};

template <typename P>
Bound bind_all(Tape& tape, P& p) {
  Bound b;
  b.pool_M = tape.bind(p.pool.M);
  b.pool_b = tape.bind(p.pool.bias);
  b.sentence = p.sentence.bind(tape);
  b.stop_W = tape.bind(p.stop_W);
  b.stop_b = tape.bind(p.stop_b);
  b.fc1_W = tape.bind(p.fc1_W);
  b.fc1_b = tape.bind(p.fc1_b);
  b.fc2_W = tape.bind(p.fc2_W);
  b.fc2_b = tape.bind(p.fc2_b);
  b.embed = tape.bind(p.embed);
  b.word1 = p.word1.bind(tape);
  b.word2 = p.word2.bind(tape);
  b.out_W = tape.bind(p.out_W);
  b.out_b = tape.bind(p.out_b);
  return b;
}

Var topic_vector(Tape& tape, const Bound& b, Var h) {
  Var hidden = tape.tanh(tape.affine(b.fc1_W, h, b.fc1_b));
  return tape.affine(b.fc2_W, hidden, b.fc2_b);
}

template <typename P>
Var loss_impl(Tape& tape, P& params, Var pooled, const Paragraph& K) {
  const HierarchicalConfig& cfg = params.config;
  validate_target(K, cfg);
  if (tape.dim(pooled) != cfg.pooled_dim) {
    throw DimensionError("dsic_loss: pooled vector has length " + std::to_string(tape.dim(pooled)) +
                         ", expected " + std::to_string(cfg.pooled_dim));
  }
  const Bound b = bind_all(tape, params);
  const std::size_t steps = std::min(K.size() + 1, cfg.sent_max);

  std::vector<Var> sentence_terms;
  std::vector<Var> word_terms;
  Var h = tape.zeros(cfg.sentence_hidden);
  Var c = tape.zeros(cfg.sentence_hidden);
  for (std::size_t i = 0; i < steps; ++i) {
    auto s = tape.lstm(b.sentence, pooled, h, c);
    h = s.h;
    c = s.c;
    Var stop_logits = tape.affine(b.stop_W, h, b.stop_b);
    sentence_terms.push_back(tape.softmax_cross_entropy(stop_logits, i < K.size() ? kContinue : kStop));
    if (i >= K.size()) break;

    Var topic = topic_vector(tape, b, h);
    Var h1 = tape.zeros(cfg.word_hidden), c1 = tape.zeros(cfg.word_hidden);
    Var h2 = tape.zeros(cfg.word_hidden), c2 = tape.zeros(cfg.word_hidden);
    TokenId prev = kBosId;
    const auto& sentence = K[i];
    for (std::size_t j = 0; j <= sentence.size(); ++j) {
      const TokenId target = j < sentence.size() ? sentence[j] : kEosId;
      Var x = tape.concat({topic, tape.row(b.embed, static_cast<std::size_t>(prev))});
      auto l1 = tape.lstm(b.word1, x, h1, c1);
      h1 = l1.h;
      c1 = l1.c;
      auto l2 = tape.lstm(b.word2, h1, h2, c2);
      h2 = l2.h;
      c2 = l2.c;
      Var logits = tape.affine(b.out_W, h2, b.out_b);
      word_terms.push_back(tape.softmax_cross_entropy(logits, static_cast<std::size_t>(target)));
      prev = target;
    }
  }
  Var sent_sum = tape.add_scalars(sentence_terms);
  Var word_sum = tape.add_scalars(word_terms);
  return tape.add(tape.scale(sent_sum, cfg.beta_sent), tape.scale(word_sum, cfg.beta_word));
}

std::size_t masked_argmax(const nn::Vec& logits) {
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (id == kPadId || id == kBosId) continue;
    if (logits(i) > best_value) {
      best_value = logits(i);
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

}  // namespace

void HierarchicalConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw InvalidArgument(std::string("dsic config: ") + name + " must be positive");
  };
  positive(feature_dim, "feature_dim");
  positive(pooled_dim, "pooled_dim");
  positive(sentence_hidden, "sentence_hidden");
  positive(word_hidden, "word_hidden");
  positive(fc_width, "fc_width");
  positive(topic_dim, "topic_dim");
  positive(embed_dim, "embed_dim");
  positive(sent_max, "sent_max");
  positive(word_max, "word_max");
  positive(top_regions, "top_regions");
  if (vocab_size <= kNumSpecialTokens) {
    throw InvalidArgument("dsic config: vocab_size must exceed the 4 special tokens");
  }
  if (!(threshold > 0 && threshold < 1)) {
    throw InvalidArgument("dsic config: threshold must lie strictly between 0 and 1");
  }
  if (!(beta_sent >= 0) || !(beta_word >= 0)) {
    throw InvalidArgument("dsic config: loss weights must be non-negative");
  }
}

std::map<std::string, std::string> HierarchicalConfig::to_map() const {
  return {
      {"vocab_size", std::to_string(vocab_size)},
      {"feature_dim", std::to_string(feature_dim)},
      {"pooled_dim", std::to_string(pooled_dim)},
      {"sentence_hidden", std::to_string(sentence_hidden)},
      {"word_hidden", std::to_string(word_hidden)},
      {"fc_width", std::to_string(fc_width)},
      {"topic_dim", std::to_string(topic_dim)},
      {"embed_dim", std::to_string(embed_dim)},
      {"sent_max", std::to_string(sent_max)},
      {"word_max", std::to_string(word_max)},
      {"top_regions", std::to_string(top_regions)},
      {"threshold", detail::format_number(threshold)},
      {"beta_sent", detail::format_number(beta_sent)},
      {"beta_word", detail::format_number(beta_word)},
  };
}

HierarchicalConfig HierarchicalConfig::from_map(const std::map<std::string, std::string>& values) {
  HierarchicalConfig c;
  detail::reject_unknown_keys(values, c.to_map(), "dsic");
  c.vocab_size = detail::get_size(values, "vocab_size", c.vocab_size);
  c.feature_dim = detail::get_size(values, "feature_dim", c.feature_dim);
  c.pooled_dim = detail::get_size(values, "pooled_dim", c.pooled_dim);
  c.sentence_hidden = detail::get_size(values, "sentence_hidden", c.sentence_hidden);
  c.word_hidden = detail::get_size(values, "word_hidden", c.word_hidden);
  c.fc_width = detail::get_size(values, "fc_width", c.fc_width);
  c.topic_dim = detail::get_size(values, "topic_dim", c.topic_dim);
  c.embed_dim = detail::get_size(values, "embed_dim", c.embed_dim);
  c.sent_max = detail::get_size(values, "sent_max", c.sent_max);
  c.word_max = detail::get_size(values, "word_max", c.word_max);
  c.top_regions = detail::get_size(values, "top_regions", c.top_regions);
  c.threshold = detail::get_double(values, "threshold", c.threshold);
  c.beta_sent = detail::get_double(values, "beta_sent", c.beta_sent);
  c.beta_word = detail::get_double(values, "beta_word", c.beta_word);
  return c;
}

DsicParams DsicParams::init(const HierarchicalConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const auto& c = config;
  DsicParams p;
  p.config = config;
  p.pool.M = Tensor::uniform({c.pooled_dim, c.feature_dim}, c.feature_dim, rng);
  p.pool.bias = Tensor::uniform({c.pooled_dim}, c.feature_dim, rng);
  p.sentence = nn::LstmParams::init(c.pooled_dim, c.sentence_hidden, rng);
  p.stop_W = Tensor::uniform({2, c.sentence_hidden}, c.sentence_hidden, rng);
  p.stop_b = Tensor::uniform({2}, c.sentence_hidden, rng);
  p.fc1_W = Tensor::uniform({c.fc_width, c.sentence_hidden}, c.sentence_hidden, rng);
  p.fc1_b = Tensor::uniform({c.fc_width}, c.sentence_hidden, rng);
  p.fc2_W = Tensor::uniform({c.topic_dim, c.fc_width}, c.fc_width, rng);
  p.fc2_b = Tensor::uniform({c.topic_dim}, c.fc_width, rng);
  p.embed = Tensor::uniform({c.vocab_size, c.embed_dim}, c.embed_dim, rng);
  p.word1 = nn::LstmParams::init(c.topic_dim + c.embed_dim, c.word_hidden, rng);
  p.word2 = nn::LstmParams::init(c.word_hidden, c.word_hidden, rng);
  p.out_W = Tensor::uniform({c.vocab_size, c.word_hidden}, c.word_hidden, rng);
  p.out_b = Tensor::uniform({c.vocab_size}, c.word_hidden, rng);
  return p;
}

std::vector<nn::NamedTensor> DsicParams::parameters() {
  std::vector<nn::NamedTensor> out{{"pool.M", &pool.M}, {"pool.bias", &pool.bias}};
  sentence.collect("sentence", out);
  out.push_back({"stop.W", &stop_W});
  out.push_back({"stop.b", &stop_b});
  out.push_back({"fc1.W", &fc1_W});
  out.push_back({"fc1.b", &fc1_b});
  out.push_back({"fc2.W", &fc2_W});
  out.push_back({"fc2.b", &fc2_b});
  out.push_back({"embed", &embed});
  word1.collect("word1", out);
  word2.collect("word2", out);
  out.push_back({"out.W", &out_W});
  out.push_back({"out.b", &out_b});
  return out;
}

std::vector<float> pool_regions(const PoolingParams& params, std::span<const RegionFeature> regions) {
  Tape tape;
  std::vector<Var> xs;
  for (const auto& r : regions) xs.push_back(tape.constant(std::span<const float>(r.values)));
  const Var P = pool_regions(tape, tape.bind(params.M), tape.bind(params.bias), xs);
  return nn::to_float(tape.value(P));
}

Var pool_regions(Tape& tape, Param M, Param bias, std::span<const Var> regions) {
  if (regions.empty()) throw InvalidArgument("pool_regions: no regions");
  const auto d = static_cast<std::size_t>(tape.param_value(M).cols());
  std::vector<Var> projected;
  projected.reserve(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (tape.dim(regions[i]) != d) {
      throw DimensionError("pool_regions: region " + std::to_string(i) + " has dimension " +
                           std::to_string(tape.dim(regions[i])) + ", expected " + std::to_string(d));
    }
    projected.push_back(tape.affine(M, regions[i], bias));
  }
  return tape.max_pool(projected);
}

Paragraph prepare_paragraph(std::string_view text, const Vocabulary& vocab,
                            const HierarchicalConfig& config) {
  Paragraph out;
  for (const auto& sentence : split_sentences(text)) {
    if (out.size() == config.sent_max) break;
    Tokens tokens = tokenize(sentence);
    if (tokens.empty()) continue;
    if (tokens.size() > config.word_max - 1) tokens.resize(config.word_max - 1);
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(vocab.id(t));
    out.push_back(std::move(ids));
  }
  return out;
}

void validate_target(const Paragraph& K, const HierarchicalConfig& config) {
  if (K.empty()) throw InvalidArgument("dsic target paragraph has no sentences");
  if (K.size() > config.sent_max) {
    throw InvalidArgument("dsic target has " + std::to_string(K.size()) +
                          " sentences, more than sent_max " + std::to_string(config.sent_max));
  }
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (K[i].size() + 1 > config.word_max) {
      throw InvalidArgument("dsic target sentence " + std::to_string(i) + " has " +
                            std::to_string(K[i].size()) + " tokens; at most word_max-1 = " +
                            std::to_string(config.word_max - 1) + " fit together with EOS");
    }
    for (TokenId id : K[i]) {
      if (id < 0 || static_cast<std::size_t>(id) >= config.vocab_size) {
        throw InvalidArgument("dsic target token id " + std::to_string(id) + " is outside the vocabulary");
      }
    }
  }
}

Var dsic_loss(Tape& tape, DsicParams& params, Var P, const Paragraph& K) {
  return loss_impl(tape, params, P, K);
}

double dsic_loss(const DsicParams& params, std::span<const float> P, const Paragraph& K) {
  Tape tape;
  return tape.scalar(loss_impl(tape, params, tape.constant(P), K));
}

Var dsic_record_loss(Tape& tape, DsicParams& params, std::span<const RegionFeature> regions,
                     const Paragraph& K) {
  std::vector<Var> xs;
  for (const auto& r : regions) xs.push_back(tape.constant(std::span<const float>(r.values)));
  const Var P = pool_regions(tape, tape.bind(params.pool.M), tape.bind(params.pool.bias), xs);
  return loss_impl(tape, params, P, K);
}

std::size_t sentences_from_probs(std::span<const double> continue_probs, double threshold,
                                 std::size_t sent_max) {
  std::size_t n = 0;
  while (n < continue_probs.size() && n < sent_max && continue_probs[n] >= threshold) ++n;
  return n;
}

Generation dsic_generate(const DsicParams& params, std::span<const float> P) {
  const HierarchicalConfig& cfg = params.config;
  if (P.size() != cfg.pooled_dim) {
    throw DimensionError("dsic_generate: pooled vector has length " + std::to_string(P.size()) +
                         ", expected " + std::to_string(cfg.pooled_dim));
  }
  Tape tape;
  const Bound b = bind_all(tape, params);
  const Var pooled = tape.constant(P);
  Generation gen;
  Var h = tape.zeros(cfg.sentence_hidden);
  Var c = tape.zeros(cfg.sentence_hidden);
  for (std::size_t i = 0; i < cfg.sent_max; ++i) {
    auto s = tape.lstm(b.sentence, pooled, h, c);
    h = s.h;
    c = s.c;
    const nn::Vec& logits = tape.value(tape.affine(b.stop_W, h, b.stop_b));
    const double mx = logits.maxCoeff();
    const double e0 = std::exp(logits(0) - mx), e1 = std::exp(logits(1) - mx);
    const double p_continue = e1 / (e0 + e1);
    gen.continue_probs.push_back(p_continue);
    if (sentences_from_probs(gen.continue_probs, cfg.threshold, cfg.sent_max) <= i) break;

    Var topic = topic_vector(tape, b, h);
    Var h1 = tape.zeros(cfg.word_hidden), c1 = tape.zeros(cfg.word_hidden);
    Var h2 = tape.zeros(cfg.word_hidden), c2 = tape.zeros(cfg.word_hidden);
    TokenId prev = kBosId;
    std::vector<TokenId> sentence;
    for (std::size_t j = 0; j < cfg.word_max; ++j) {
      Var x = tape.concat({topic, tape.row(b.embed, static_cast<std::size_t>(prev))});
      auto l1 = tape.lstm(b.word1, x, h1, c1);
      h1 = l1.h;
      c1 = l1.c;
      auto l2 = tape.lstm(b.word2, h1, h2, c2);
      h2 = l2.h;
      c2 = l2.c;
      const auto next = static_cast<TokenId>(masked_argmax(tape.value(tape.affine(b.out_W, h2, b.out_b))));
      if (next == kEosId) break;
      sentence.push_back(next);
      prev = next;
    }
    gen.sentences.push_back(std::move(sentence));
  }
  return gen;
}

std::vector<RegionFeature> top_regions(std::span<const RegionFeature> regions, std::size_t k) {
  std::vector<BBox> boxes;
  boxes.reserve(regions.size());
  for (const auto& r : regions) boxes.push_back(r.bbox);
  std::vector<RegionFeature> out;
  for (std::size_t i : select_top_regions(boxes, k)) out.push_back(regions[i]);
  return out;
}

Generation dsic_generate(const DsicParams& params, std::span<const RegionFeature> regions) {
  const auto chosen = top_regions(regions, params.config.top_regions);
  return dsic_generate(params, pool_regions(params.pool, chosen));
}

TrainResult dsic_train(std::span<const Sample> corpus, const HierarchicalConfig& config,
                       const TrainConfig& train) {
  config.validate();
  if (train.batch_size == 0) throw InvalidArgument("dsic_train: batch_size must be positive");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].regions.empty()) {
      throw InvalidArgument("dsic_train: sample " + std::to_string(i) + " has no regions");
    }
    validate_target(corpus[i].target, config);
  }
  std::vector<std::vector<RegionFeature>> chosen;
  chosen.reserve(corpus.size());
  for (const auto& s : corpus) chosen.push_back(top_regions(s.regions, config.top_regions));

  TrainResult result{DsicParams::init(config, train.seed), {}};
  if (train.epochs == 0 || corpus.empty()) return result;
  auto params = result.params.parameters();
  auto state = nn::OptimizerState::for_params(params, train.adam);
  Rng rng(train.seed ^ 0xD51Cull);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < train.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += train.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + train.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      nn::zero_grads(params);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        Tape tape;
        Var loss = dsic_record_loss(tape, result.params, chosen[idx], corpus[idx].target);
        const double value = tape.scalar(loss);
        if (!std::isfinite(value)) {
          throw NonFiniteError("dsic_train: non-finite loss at epoch " + std::to_string(epoch) +
                               " batch " + std::to_string(batch));
        }
        epoch_loss += value;
        tape.backward(tape.scale(loss, inv));
      }
      nn::clip_grad_norm(params, train.clip_norm);
      adam_step(state, params);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(corpus.size()));
  }
  return result;
}

}  // namespace fpdesc::dsic
