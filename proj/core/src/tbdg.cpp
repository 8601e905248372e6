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

#include "fpdesc/tbdg.hpp"

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
  Param embed, bridge_W, bridge_b, out_W, out_b;
  nn::LstmWeights enc_fwd, enc_bwd, decoder;
  std::optional<Param> align_W;
};

template <typename P>
Bound bind_all(Tape& tape, P& p) {
  Bound b;
  b.embed = tape.bind(p.embed);
  b.enc_fwd = p.enc_fwd.bind(tape);
  b.enc_bwd = p.enc_bwd.bind(tape);
  b.bridge_W = tape.bind(p.bridge_W);
  b.bridge_b = tape.bind(p.bridge_b);
  b.decoder = p.decoder.bind(tape);
  if (p.config.align == AlignMode::General) b.align_W = tape.bind(p.align_W);
  b.out_W = tape.bind(p.out_W);
  b.out_b = tape.bind(p.out_b);
  return b;
}

void check_ids(const TbdgConfig& cfg, std::span<const TokenId> ids, const char* what) {
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw InvalidArgument(std::string("tbdg: ") + what + " token id " + std::to_string(id) +
                            " outside the vocabulary");
    }
  }
}

struct Encoded {
  std::vector<Var> states;
  Var h0;
};

Encoded encode(Tape& tape, const Bound& b, const TbdgConfig& cfg, std::span<const TokenId> W_e) {
  check_ids(cfg, W_e, "input");
  const std::size_t n = std::min(non_pad_length(W_e), cfg.input_len);
  if (n == 0) throw InvalidArgument("tbdg: input sequence is empty");
  std::vector<Var> xs;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(tape.row(b.embed, static_cast<std::size_t>(W_e[i])));
  Encoded e;
  e.states = nn::bilstm_encode(tape, b.enc_fwd, b.enc_bwd, xs);
  const std::size_t He = cfg.encoder_hidden;
  Var summary = tape.concat({tape.slice(e.states.back(), 0, He), tape.slice(e.states.front(), He, He)});
  e.h0 = tape.tanh(tape.affine(b.bridge_W, summary, b.bridge_b));
  return e;
}

template <typename P>
Var loss_impl(Tape& tape, P& params, std::span<const TokenId> W_e, std::span<const TokenId> T_e) {
  const auto& cfg = params.config;
  check_ids(cfg, T_e, "target");
  if (T_e.empty() || T_e[0] != kBosId) throw InvalidArgument("tbdg: target must start with BOS");
  const std::size_t target_len = std::min(non_pad_length(T_e), cfg.output_len);
  if (target_len < 2) throw InvalidArgument("tbdg: target holds no token after BOS");
  const Bound b = bind_all(tape, params);
  const Encoded enc = encode(tape, b, cfg, W_e);
  Var h = enc.h0;
  Var c = tape.zeros(cfg.decoder_hidden);
  std::vector<Var> terms;
  for (std::size_t t = 1; t < target_len; ++t) {
    const auto att = attention_step(tape, h, enc.states, cfg.align, b.align_W);
    Var x = tape.concat({tape.row(b.embed, static_cast<std::size_t>(T_e[t - 1])), att.context});
    auto s = tape.lstm(b.decoder, x, h, c);
    h = s.h;
    c = s.c;
    terms.push_back(tape.softmax_cross_entropy(tape.affine(b.out_W, h, b.out_b),
                                               static_cast<std::size_t>(T_e[t])));
  }
  return tape.scale(tape.add_scalars(terms), 1.0 / static_cast<double>(terms.size()));
}

}  // namespace

void TbdgConfig::validate() const {
  if (vocab_size <= kNumSpecialTokens) {
    throw InvalidArgument("tbdg config: vocab_size must exceed the 4 special tokens");
  }
  if (input_len == 0 || output_len < 2 || embed_dim == 0 || decoder_hidden == 0 || encoder_hidden == 0) {
    throw InvalidArgument("tbdg config: lengths and dimensions must be positive (output_len >= 2)");
  }
  if (align == AlignMode::Dot && decoder_hidden != 2 * encoder_hidden) {
    throw InvalidArgument("tbdg config: dot alignment needs decoder_hidden (" +
                          std::to_string(decoder_hidden) + ") == 2 * encoder_hidden (" +
                          std::to_string(encoder_hidden) + ")");
  }
}

std::map<std::string, std::string> TbdgConfig::to_map() const {
  return {{"vocab_size", std::to_string(vocab_size)},
          {"input_len", std::to_string(input_len)},
          {"output_len", std::to_string(output_len)},
          {"embed_dim", std::to_string(embed_dim)},
          {"decoder_hidden", std::to_string(decoder_hidden)},
          {"encoder_hidden", std::to_string(encoder_hidden)},
          {"align", std::string(align_mode_name(align))}};
}

TbdgConfig TbdgConfig::from_map(const std::map<std::string, std::string>& values) {
  TbdgConfig c;
  detail::reject_unknown_keys(values, c.to_map(), "tbdg");
  c.vocab_size = detail::get_size(values, "vocab_size", c.vocab_size);
  c.input_len = detail::get_size(values, "input_len", c.input_len);
  c.output_len = detail::get_size(values, "output_len", c.output_len);
  c.embed_dim = detail::get_size(values, "embed_dim", c.embed_dim);
  c.decoder_hidden = detail::get_size(values, "decoder_hidden", c.decoder_hidden);
  c.encoder_hidden = detail::get_size(values, "encoder_hidden", c.encoder_hidden);
  if (auto it = values.find("align"); it != values.end()) c.align = parse_align_mode(it->second);
  return c;
}

TbdgParams TbdgParams::init(const TbdgConfig& config, std::uint64_t seed, const EmbeddingTable* embeddings) {
  config.validate();
  const auto& c = config;
  Rng rng(seed);
  TbdgParams p;
  p.config = config;
  const std::size_t enc_out = 2 * c.encoder_hidden;
  p.embed = Tensor::uniform({c.vocab_size, c.embed_dim}, c.embed_dim, rng);
  p.enc_fwd = nn::LstmParams::init(c.embed_dim, c.encoder_hidden, rng);
  p.enc_bwd = nn::LstmParams::init(c.embed_dim, c.encoder_hidden, rng);
  p.bridge_W = Tensor::uniform({c.decoder_hidden, enc_out}, enc_out, rng);
  p.bridge_b = Tensor::uniform({c.decoder_hidden}, enc_out, rng);
  p.decoder = nn::LstmParams::init(c.embed_dim + enc_out, c.decoder_hidden, rng);
  p.align_W = Tensor::uniform({c.decoder_hidden, enc_out}, enc_out, rng);
  p.out_W = Tensor::uniform({c.vocab_size, c.decoder_hidden}, c.decoder_hidden, rng);
  p.out_b = Tensor::uniform({c.vocab_size}, c.decoder_hidden, rng);
  if (embeddings) {
    if (embeddings->vocab_size != c.vocab_size || embeddings->dim != c.embed_dim) {
      throw DimensionError("tbdg: pretrained embeddings are " + std::to_string(embeddings->vocab_size) +
                           "x" + std::to_string(embeddings->dim) + ", expected " +
                           std::to_string(c.vocab_size) + "x" + std::to_string(c.embed_dim));
    }
    std::copy(embeddings->data.begin(), embeddings->data.end(), p.embed.data().begin());
  }
  return p;
}

std::vector<nn::NamedTensor> TbdgParams::parameters() {
  std::vector<nn::NamedTensor> out{{"embed", &embed}};
  enc_fwd.collect("enc_fwd", out);
  enc_bwd.collect("enc_bwd", out);
  out.push_back({"bridge.W", &bridge_W});
  out.push_back({"bridge.b", &bridge_b});
  decoder.collect("decoder", out);
  if (config.align == AlignMode::General) out.push_back({"align.W", &align_W});
  out.push_back({"out.W", &out_W});
  out.push_back({"out.b", &out_b});
  return out;
}

Var tbdg_loss(Tape& tape, TbdgParams& params, std::span<const TokenId> W_e, std::span<const TokenId> T_e) {
  return loss_impl(tape, params, W_e, T_e);
}

double tbdg_loss(const TbdgParams& params, std::span<const TokenId> W_e, std::span<const TokenId> T_e) {
  Tape tape;
  return tape.scalar(loss_impl(tape, params, W_e, T_e));
}

TbdgOutput tbdg_generate(const TbdgParams& params, std::span<const TokenId> W_e) {
  const auto& cfg = params.config;
  Tape tape;
  const Bound b = bind_all(tape, params);
  const Encoded enc = encode(tape, b, cfg, W_e);
  Var h = enc.h0;
  Var c = tape.zeros(cfg.decoder_hidden);
  TbdgOutput out;
  TokenId prev = kBosId;
  for (std::size_t t = 1; t < cfg.output_len; ++t) {
    const auto att = attention_step(tape, h, enc.states, cfg.align, b.align_W);
    const nn::Vec& alpha = tape.value(att.alpha);
    out.attention.emplace_back(alpha.data(), alpha.data() + alpha.size());
    Var x = tape.concat({tape.row(b.embed, static_cast<std::size_t>(prev)), att.context});
    auto s = tape.lstm(b.decoder, x, h, c);
    h = s.h;
    c = s.c;
    const nn::Vec& logits = tape.value(tape.affine(b.out_W, h, b.out_b));
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      if (i == kPadId || i == kBosId) continue;
      if (best < 0 || logits(i) > logits(best)) best = i;
    }
    const auto next = static_cast<TokenId>(best);
    if (next == kEosId) break;
    out.tokens.push_back(next);
    prev = next;
  }
  return out;
}

TbdgTrainResult tbdg_train(std::span<const TbdgSample> corpus, const TbdgConfig& config,
                           const TrainConfig& train, const EmbeddingTable* embeddings) {
  config.validate();
  if (train.batch_size == 0) throw InvalidArgument("tbdg_train: batch_size must be positive");
  TbdgTrainResult result{TbdgParams::init(config, train.seed, embeddings), {}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].input.size() != config.input_len || corpus[i].target.size() != config.output_len) {
      throw InvalidArgument("tbdg_train: sample " + std::to_string(i) + " is not encoded to lengths " +
                            std::to_string(config.input_len) + "/" + std::to_string(config.output_len));
    }
  }
  if (train.epochs == 0 || corpus.empty()) return result;
  auto params = result.params.parameters();
  auto state = nn::OptimizerState::for_params(params, train.adam);
  Rng rng(train.seed ^ 0x7BD6ull);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < train.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += train.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + train.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      nn::zero_grads(params);
      for (std::size_t k = start; k < end; ++k) {
        const auto& sample = corpus[order[k]];
        Tape tape;
        Var loss = tbdg_loss(tape, result.params, sample.input, sample.target);
        const double value = tape.scalar(loss);
        if (!std::isfinite(value)) {
          throw NonFiniteError("tbdg_train: non-finite loss at epoch " + std::to_string(epoch) +
                               " batch " + std::to_string(batch) + " (sample " +
                               std::to_string(order[k]) + ")");
        }
        total += value;
        tape.backward(tape.scale(loss, inv));
      }
      nn::clip_grad_norm(params, train.clip_norm);
      adam_step(state, params);
    }
    result.loss_history.push_back(total / static_cast<double>(corpus.size()));
  }
  return result;
}

}  // namespace fpdesc::tbdg
