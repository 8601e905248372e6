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

#include "fpdesc/captioner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "config_util.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/rng.hpp"

namespace fpdesc::tbdg {
namespace {

using nn::Param;
using nn::Tape;
using nn::Tensor;
using nn::Var;

struct Bound {
  Param feat_W, feat_b, embed, out_W, out_b;
  nn::LstmWeights lstm;
};

template <typename P>
Bound bind_all(Tape& tape, P& p) {
  return Bound{tape.bind(p.feat_W), tape.bind(p.feat_b), tape.bind(p.embed),
               tape.bind(p.out_W),  tape.bind(p.out_b),  p.lstm.bind(tape)};
}

void check_feature(const CaptionerConfig& cfg, std::span<const float> feature) {
  if (feature.size() != cfg.feature_dim) {
    throw DimensionError("captioner: feature has length " + std::to_string(feature.size()) +
                         ", expected " + std::to_string(cfg.feature_dim));
  }
}

void check_caption(const CaptionerConfig& cfg, std::span<const TokenId> caption) {
  if (caption.size() > cfg.max_len) {
    throw InvalidArgument("captioner: caption of " + std::to_string(caption.size()) +
                          " tokens exceeds max_len " + std::to_string(cfg.max_len));
  }
  for (TokenId id : caption) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw InvalidArgument("captioner: token id " + std::to_string(id) + " outside the vocabulary");
    }
  }
}

template <typename P>
Var loss_impl(Tape& tape, P& params, std::span<const float> feature, std::span<const TokenId> caption) {
  const auto& cfg = params.config;
  check_feature(cfg, feature);
  check_caption(cfg, caption);
  const Bound b = bind_all(tape, params);
  Var h = tape.tanh(tape.affine(b.feat_W, tape.constant(feature), b.feat_b));
  Var c = tape.zeros(cfg.hidden);
  std::vector<Var> terms;
  TokenId prev = kBosId;
  for (std::size_t t = 0; t <= caption.size(); ++t) {
    const TokenId target = t < caption.size() ? caption[t] : kEosId;
    auto s = tape.lstm(b.lstm, tape.row(b.embed, static_cast<std::size_t>(prev)), h, c);
    h = s.h;
    c = s.c;
    terms.push_back(tape.softmax_cross_entropy(tape.affine(b.out_W, h, b.out_b),
                                               static_cast<std::size_t>(target)));
    prev = target;
  }
  return tape.scale(tape.add_scalars(terms), 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

void CaptionerConfig::validate() const {
  if (vocab_size <= kNumSpecialTokens) {
    throw InvalidArgument("captioner config: vocab_size must exceed the 4 special tokens");
  }
  if (feature_dim == 0 || embed_dim == 0 || hidden == 0 || max_len == 0) {
    throw InvalidArgument("captioner config: dimensions and max_len must be positive");
  }
}

std::map<std::string, std::string> CaptionerConfig::to_map() const {
  return {{"vocab_size", std::to_string(vocab_size)}, {"feature_dim", std::to_string(feature_dim)},
          {"embed_dim", std::to_string(embed_dim)},   {"hidden", std::to_string(hidden)},
          {"max_len", std::to_string(max_len)}};
}

CaptionerConfig CaptionerConfig::from_map(const std::map<std::string, std::string>& values) {
  CaptionerConfig c;
  detail::reject_unknown_keys(values, c.to_map(), "captioner");
  c.vocab_size = detail::get_size(values, "vocab_size", c.vocab_size);
  c.feature_dim = detail::get_size(values, "feature_dim", c.feature_dim);
  c.embed_dim = detail::get_size(values, "embed_dim", c.embed_dim);
  c.hidden = detail::get_size(values, "hidden", c.hidden);
  c.max_len = detail::get_size(values, "max_len", c.max_len);
  return c;
}

CaptionerParams CaptionerParams::init(const CaptionerConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const auto& c = config;
  CaptionerParams p;
  p.config = config;
  p.feat_W = Tensor::uniform({c.hidden, c.feature_dim}, c.feature_dim, rng);
  p.feat_b = Tensor::uniform({c.hidden}, c.feature_dim, rng);
  p.embed = Tensor::uniform({c.vocab_size, c.embed_dim}, c.embed_dim, rng);
  p.lstm = nn::LstmParams::init(c.embed_dim, c.hidden, rng);
  p.out_W = Tensor::uniform({c.vocab_size, c.hidden}, c.hidden, rng);
  p.out_b = Tensor::uniform({c.vocab_size}, c.hidden, rng);
  return p;
}

std::vector<nn::NamedTensor> CaptionerParams::parameters() {
  std::vector<nn::NamedTensor> out{{"feat.W", &feat_W}, {"feat.b", &feat_b}, {"embed", &embed}};
  lstm.collect("lstm", out);
  out.push_back({"out.W", &out_W});
  out.push_back({"out.b", &out_b});
  return out;
}

Var captioner_loss(Tape& tape, CaptionerParams& params, std::span<const float> feature,
                   std::span<const TokenId> caption) {
  return loss_impl(tape, params, feature, caption);
}

double captioner_loss(const CaptionerParams& params, std::span<const float> feature,
                      std::span<const TokenId> caption) {
  Tape tape;
  return tape.scalar(loss_impl(tape, params, feature, caption));
}

Caption captioner_generate(const CaptionerParams& params, std::span<const float> feature) {
  const auto& cfg = params.config;
  check_feature(cfg, feature);
  Tape tape;
  const Bound b = bind_all(tape, params);
  Var h = tape.tanh(tape.affine(b.feat_W, tape.constant(feature), b.feat_b));
  Var c = tape.zeros(cfg.hidden);
  Caption out;
  double log_prob_sum = 0;
  std::size_t emitted = 0;
  TokenId prev = kBosId;
  for (std::size_t t = 0; t < cfg.max_len; ++t) {
    auto s = tape.lstm(b.lstm, tape.row(b.embed, static_cast<std::size_t>(prev)), h, c);
    h = s.h;
    c = s.c;
    const nn::Vec& logits = tape.value(tape.affine(b.out_W, h, b.out_b));
    const double mx = logits.maxCoeff();
    const double log_z = mx + std::log((logits.array() - mx).exp().sum());
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      if (i == kPadId || i == kBosId) continue;
      if (best < 0 || logits(i) > logits(best)) best = i;
    }
    log_prob_sum += logits(best) - log_z;
    ++emitted;
    const auto next = static_cast<TokenId>(best);
    if (next == kEosId) break;
    out.tokens.push_back(next);
    prev = next;
  }
  out.score = log_prob_sum / static_cast<double>(emitted);
  return out;
}

CaptionerTrainResult captioner_train(std::span<const CaptionPair> pairs, const CaptionerConfig& config,
                                     const TrainConfig& train) {
  config.validate();
  if (train.batch_size == 0) throw InvalidArgument("captioner_train: batch_size must be positive");
  for (const auto& p : pairs) {
    check_feature(config, p.feature);
    check_caption(config, p.caption);
  }
  CaptionerTrainResult result{CaptionerParams::init(config, train.seed), {}};
  if (train.epochs == 0 || pairs.empty()) return result;
  auto params = result.params.parameters();
  auto state = nn::OptimizerState::for_params(params, train.adam);
  Rng rng(train.seed ^ 0xCA97ull);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < train.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += train.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + train.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      nn::zero_grads(params);
      for (std::size_t k = start; k < end; ++k) {
        const auto& pair = pairs[order[k]];
        Tape tape;
        Var loss = captioner_loss(tape, result.params, pair.feature, pair.caption);
        const double value = tape.scalar(loss);
        if (!std::isfinite(value)) {
          throw NonFiniteError("captioner_train: non-finite loss at epoch " + std::to_string(epoch) +
                               " batch " + std::to_string(batch));
        }
        total += value;
        tape.backward(tape.scale(loss, inv));
      }
      nn::clip_grad_norm(params, train.clip_norm);
      adam_step(state, params);
    }
    result.loss_history.push_back(total / static_cast<double>(pairs.size()));
  }
  return result;
}

}  // namespace fpdesc::tbdg
