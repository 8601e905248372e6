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

#include "fpdesc/gradient_suite.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fpdesc/attention.hpp"
#include "fpdesc/captioner.hpp"
#include "fpdesc/dsic.hpp"
#include "fpdesc/nn/lstm.hpp"
#include "fpdesc/rng.hpp"
#include "fpdesc/tbdg.hpp"

namespace fpdesc {
namespace {

using nn::NamedTensor;
using nn::Tape;
using nn::Tensor;
using nn::Var;

constexpr std::size_t kDim = 8;
constexpr std::size_t kHidden = 8;
constexpr std::size_t kVocab = 12;

std::vector<float> random_vector(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return v;
}

/// Smallest gap between the largest and second-largest projected value over all pooled
/// coordinates.
double pooling_margin(const Tensor& M, const Tensor& b, const std::vector<std::vector<float>>& regions) {
  double margin = INFINITY;
  for (std::size_t d = 0; d < M.rows(); ++d) {
    std::vector<double> v;
    for (const auto& r : regions) {
      double acc = b[d];
      for (std::size_t k = 0; k < M.cols(); ++k) acc += static_cast<double>(M.at(d, k)) * r[k];
      v.push_back(acc);
    }
    std::sort(v.rbegin(), v.rend());
    if (v.size() > 1) margin = std::min(margin, v[0] - v[1]);
  }
  return margin;
}

std::vector<TokenId> random_ids(std::size_t n, Rng& rng) {
  std::vector<TokenId> ids(n);
  for (auto& id : ids) id = static_cast<TokenId>(kNumSpecialTokens + rng.below(kVocab - kNumSpecialTokens));
  return ids;
}

}  // namespace

std::vector<GradientCase> run_gradient_suite(std::uint64_t seed, double tolerance, double step) {
  std::vector<GradientCase> cases;
  Rng rng(seed);

  {
    auto p = nn::LstmParams::init(kDim, kHidden, rng);
    const auto x = random_vector(kDim, rng), h = random_vector(kHidden, rng), c = random_vector(kHidden, rng);
    std::vector<NamedTensor> params;
    p.collect("lstm", params);
    auto loss = [&](Tape& t) {
      auto out = t.lstm(p.bind(t), t.constant(x), t.constant(h), t.constant(c));
      return t.add(t.sum(out.h), t.scale(t.sum(out.c), 0.5));
    };
    cases.push_back({"lstm_step", nn::grad_check(loss, params, tolerance, step)});
  }

  {
    auto fwd = nn::LstmParams::init(kDim, kHidden, rng);
    auto bwd = nn::LstmParams::init(kDim, kHidden, rng);
    std::vector<std::vector<float>> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(random_vector(kDim, rng));
    const auto probe = random_vector(2 * kHidden, rng);
    std::vector<NamedTensor> params;
    fwd.collect("fwd", params);
    bwd.collect("bwd", params);
    auto loss = [&](Tape& t) {
      std::vector<Var> in;
      for (const auto& x : xs) in.push_back(t.constant(std::span<const float>(x)));
      auto out = nn::bilstm_encode(t, fwd.bind(t), bwd.bind(t), in);
      std::vector<Var> terms;
      for (Var o : out) terms.push_back(t.dot(o, t.constant(std::span<const float>(probe))));
      return t.add_scalars(terms);
    };
    cases.push_back({"bilstm_encode", nn::grad_check(loss, params, tolerance, step)});
  }

  {
    Tensor M, b;
    std::vector<std::vector<float>> regions;
    do {
      M = Tensor::uniform({kDim, kDim}, kDim, rng);
      b = Tensor::uniform({kDim}, kDim, rng);
      regions.clear();
      for (int i = 0; i < 3; ++i) regions.push_back(random_vector(kDim, rng));
    } while (pooling_margin(M, b, regions) < 0.05);
    const auto probe = random_vector(kDim, rng);
    std::vector<NamedTensor> params{{"pool.M", &M}, {"pool.bias", &b}};
    auto loss = [&](Tape& t) {
      std::vector<Var> in;
      for (const auto& r : regions) in.push_back(t.constant(std::span<const float>(r)));
      Var P = dsic::pool_regions(t, t.bind(M), t.bind(b), in);
      return t.dot(P, t.constant(std::span<const float>(probe)));
    };
    cases.push_back({"pool_regions", nn::grad_check(loss, params, tolerance, step)});
  }

  for (auto mode : {tbdg::AlignMode::Dot, tbdg::AlignMode::General}) {
    Tensor query = Tensor::uniform({kHidden}, 1, rng);
    Tensor states = Tensor::uniform({5, kHidden}, 1, rng);
    Tensor W = Tensor::uniform({kHidden, kHidden}, kHidden, rng);
    const auto probe = random_vector(kHidden, rng);
    std::vector<NamedTensor> params{{"h_t", &query}, {"h_s", &states}};
    if (mode == tbdg::AlignMode::General) params.push_back({"W_a", &W});
    auto loss = [&, mode](Tape& t) {
      const nn::Param hs = t.bind(states);
      std::vector<Var> enc;
      for (std::size_t j = 0; j < states.rows(); ++j) enc.push_back(t.row(hs, j));
      std::optional<nn::Param> w;
      if (mode == tbdg::AlignMode::General) w = t.bind(W);
      auto out = tbdg::attention_step(t, t.param_vector(t.bind(query)), enc, mode, w);
      return t.dot(out.context, t.constant(std::span<const float>(probe)));
    };
    cases.push_back({std::string("attention_step/") + std::string(tbdg::align_mode_name(mode)),
                     nn::grad_check(loss, params, tolerance, step)});
  }

  {
    dsic::HierarchicalConfig cfg;
    cfg.vocab_size = kVocab;
    cfg.feature_dim = kDim;
    cfg.pooled_dim = kDim;
    cfg.sentence_hidden = kHidden;
    cfg.word_hidden = kHidden;
    cfg.fc_width = kHidden;
    cfg.topic_dim = kHidden;
    cfg.embed_dim = kHidden;
    cfg.sent_max = 3;
    cfg.word_max = 6;
    dsic::DsicParams p;
    std::vector<RegionFeature> regions;
    do {
      p = dsic::DsicParams::init(cfg, rng.next());
      regions.clear();
      for (int i = 0; i < 3; ++i) regions.push_back(RegionFeature{random_vector(kDim, rng), {}});
      std::vector<std::vector<float>> raw;
      for (const auto& r : regions) raw.push_back(r.values);
      if (pooling_margin(p.pool.M, p.pool.bias, raw) >= 0.05) break;
    } while (true);
    const dsic::Paragraph K{random_ids(3, rng), random_ids(2, rng)};
    auto params = p.parameters();
    auto loss = [&](Tape& t) { return dsic::dsic_record_loss(t, p, regions, K); };
    cases.push_back({"dsic_loss", nn::grad_check(loss, params, tolerance, step)});
  }

  {
    tbdg::CaptionerConfig cfg;
    cfg.vocab_size = kVocab;
    cfg.feature_dim = kDim;
    cfg.embed_dim = kHidden;
    cfg.hidden = kHidden;
    cfg.max_len = 6;
    auto p = tbdg::CaptionerParams::init(cfg, rng.next());
    const auto feature = random_vector(kDim, rng);
    const auto caption = random_ids(4, rng);
    auto params = p.parameters();
    auto loss = [&](Tape& t) { return tbdg::captioner_loss(t, p, feature, caption); };
    cases.push_back({"captioner_loss", nn::grad_check(loss, params, tolerance, step)});
  }

  for (auto mode : {tbdg::AlignMode::Dot, tbdg::AlignMode::General}) {
    tbdg::TbdgConfig cfg;
    cfg.vocab_size = kVocab;
    cfg.input_len = 8;
    cfg.output_len = 7;
    cfg.embed_dim = kHidden;
    cfg.encoder_hidden = kHidden / 2;
    cfg.decoder_hidden = kHidden;
    cfg.align = mode;
    auto p = tbdg::TbdgParams::init(cfg, rng.next());
    std::vector<TokenId> input = random_ids(5, rng);
    input.resize(cfg.input_len, kPadId);
    std::vector<TokenId> target{kBosId};
    for (TokenId id : random_ids(4, rng)) target.push_back(id);
    target.push_back(kEosId);
    target.resize(cfg.output_len, kPadId);
    auto params = p.parameters();
    auto loss = [&](Tape& t) { return tbdg::tbdg_loss(t, p, input, target); };
    cases.push_back({std::string("tbdg_loss/") + std::string(tbdg::align_mode_name(mode)),
                     nn::grad_check(loss, params, tolerance, step)});
  }
  return cases;
}

std::string gradient_suite_json(const std::vector<GradientCase>& cases) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    nlohmann::ordered_json entry;
    entry["case"] = c.name;
    entry["passed"] = c.report.passed();
    entry["max_relative_error"] = c.report.max_relative_error();
    entry["report"] = nlohmann::ordered_json::parse(nn::to_json(c.report));
    doc.push_back(std::move(entry));
  }
  return doc.dump(2);
}

}  // namespace fpdesc
