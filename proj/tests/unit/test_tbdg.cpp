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

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <numeric>

#include "fpdesc/attention.hpp"
#include "fpdesc/captioner.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/pipeline.hpp"
#include "fpdesc/rng.hpp"
#include "fpdesc/skipgram.hpp"
#include "fpdesc/tbdg.hpp"
#include "test_util.hpp"

using namespace fpdesc;
using namespace fpdesc::tbdg;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return v;
}

TbdgConfig tiny_tbdg(AlignMode mode = AlignMode::Dot) {
  TbdgConfig c;
  c.vocab_size = 12;
  c.input_len = 8;
  c.output_len = 7;
  c.embed_dim = 6;
  c.encoder_hidden = 4;
  c.decoder_hidden = 8;
  c.align = mode;
  return c;
}

CaptionerConfig tiny_captioner() {
  CaptionerConfig c;
  c.vocab_size = 12;
  c.feature_dim = 4;
  c.embed_dim = 6;
  c.hidden = 8;
  c.max_len = 6;
  return c;
}

}  // namespace

TEST_CASE("attention weights") {
  const std::vector<std::vector<float>> same(4, std::vector<float>{0.3f, -0.2f});
  const std::vector<float> q{1.0f, 2.0f};
  const auto r = attention_step(q, same, AlignMode::Dot);
  for (double a : r.alpha) CHECK(a == doctest::Approx(0.25));
  CHECK(r.context[0] == doctest::Approx(0.3));

  const std::vector<std::vector<float>> one{{5.0f, 1.0f}};
  const auto single = attention_step(q, one, AlignMode::Dot);
  CHECK(single.alpha == std::vector<double>{1.0});
  CHECK(single.scores[0] == doctest::Approx(7.0));

  const std::vector<std::vector<float>> peaked{{100, 0}, {0, 0}};
  const auto p = attention_step(std::vector<float>{1, 0}, peaked, AlignMode::Dot);
  CHECK(p.alpha[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(p.alpha[1]));

  Rng rng(4);
  nn::Tensor W({3, 2});
  for (std::size_t i = 0; i < W.numel(); ++i) W[i] = static_cast<float>(rng.uniform(-1, 1));
  std::vector<std::vector<float>> hs;
  for (int j = 0; j < 5; ++j) hs.push_back(random_vec(2, rng));
  const auto h = random_vec(3, rng);
  const auto g = attention_step(h, hs, AlignMode::General, &W);
  double total = 0;
  for (std::size_t j = 0; j < hs.size(); ++j) {
    double e = 0;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 2; ++b) e += h[a] * double(W.at(a, b)) * hs[j][b];
    }
    CHECK(g.scores[j] == doctest::Approx(e).epsilon(1e-6));
    total += g.alpha[j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(attention_step(h, hs, AlignMode::Dot), DimensionError);
  CHECK_THROWS_AS(attention_step(h, hs, AlignMode::General), InvalidArgument);
  CHECK_THROWS_AS(attention_step(q, std::vector<std::vector<float>>{}, AlignMode::Dot), InvalidArgument);
  CHECK(parse_align_mode("general") == AlignMode::General);
  CHECK_THROWS_AS(parse_align_mode("additive"), InvalidArgument);
}

TEST_CASE("captioner") {
  const auto cfg = tiny_captioner();
  Rng rng(6);
  const auto p = CaptionerParams::init(cfg, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = captioner_generate(p, random_vec(cfg.feature_dim, rng));
    CHECK(c.score <= 0);
    CHECK(c.tokens.size() <= cfg.max_len);
    for (TokenId id : c.tokens) {
      CHECK(id != kPadId);
      CHECK(id != kBosId);
    }
  }
  const std::vector<TokenId> caption{4, 5, 6};
  const double l = captioner_loss(p, random_vec(cfg.feature_dim, rng), caption);
  CHECK(l == doctest::Approx(std::log(12.0)).epsilon(0.2));
  CHECK_THROWS_AS(captioner_loss(p, std::vector<float>(3), caption), DimensionError);
  CHECK_THROWS_AS(captioner_loss(p, random_vec(4, rng), std::vector<TokenId>(7, 4)), InvalidArgument);

  std::vector<CaptionPair> pairs{{random_vec(4, rng), {4, 5}}, {random_vec(4, rng), {6, 7, 8}}};
  TrainConfig tc;
  tc.epochs = 150;
  tc.seed = 1;
  const auto trained = captioner_train(pairs, cfg, tc);
  CHECK(trained.loss_history.back() < 0.2 * trained.loss_history.front());
  CHECK(captioner_generate(trained.params, pairs[1].feature).tokens == std::vector<TokenId>{6, 7, 8});
  const auto again = captioner_train(pairs, cfg, tc);
  CHECK(again.loss_history == trained.loss_history);
}

TEST_CASE("tbdg loss starts near log V and generation is bounded") {
  for (auto mode : {AlignMode::Dot, AlignMode::General}) {
    const auto cfg = tiny_tbdg(mode);
    const auto p = TbdgParams::init(cfg, 9);
    const std::vector<TokenId> input{4, 5, 6, 7, kPadId, kPadId, kPadId, kPadId};
    const std::vector<TokenId> target{kBosId, 8, 9, kEosId, kPadId, kPadId, kPadId};
    CHECK(tbdg_loss(p, input, target) == doctest::Approx(std::log(12.0)).epsilon(0.2));

    const auto out = tbdg_generate(p, input);
    CHECK(out.tokens.size() <= cfg.output_len - 1);
    CHECK(out.attention.size() >= out.tokens.size());
    for (const auto& row : out.attention) {
      CHECK(row.size() == 4);
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(tbdg_loss(p, input, std::vector<TokenId>{8, 9, kEosId}), InvalidArgument);
    CHECK_THROWS_AS(tbdg_loss(p, input, std::vector<TokenId>{kBosId, kPadId}), InvalidArgument);
    CHECK_THROWS_AS(tbdg_loss(p, std::vector<TokenId>(8, kPadId), target), InvalidArgument);
  }
  auto bad = tiny_tbdg();
  bad.decoder_hidden = 6;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.align = AlignMode::General;
  CHECK_NOTHROW(bad.validate());
  const auto cfg = tiny_tbdg(AlignMode::General);
  CHECK(TbdgConfig::from_map(cfg.to_map()).to_map() == cfg.to_map());
}

TEST_CASE("input padding is not encoded") {
  const auto cfg = tiny_tbdg();
  const auto p = TbdgParams::init(cfg, 2);
  const std::vector<TokenId> target{kBosId, 8, 9, kEosId, kPadId, kPadId, kPadId};
  const std::vector<TokenId> a{4, 5, kPadId, kPadId, kPadId, kPadId, kPadId, kPadId};
  auto b = a;
  b.resize(5, kPadId);
  CHECK(tbdg_loss(p, a, target) == tbdg_loss(p, b, target));
}

TEST_CASE("tbdg training memorizes a tiny corpus") {
  const auto cfg = tiny_tbdg();
  std::vector<TbdgSample> corpus{{{4, 5, 0, 0, 0, 0, 0, 0}, {kBosId, 8, 9, kEosId, 0, 0, 0}},
                                 {{6, 7, 0, 0, 0, 0, 0, 0}, {kBosId, 10, 11, 8, kEosId, 0, 0}}};
  TrainConfig tc;
  tc.epochs = 250;
  tc.seed = 3;
  const auto r = tbdg_train(corpus, cfg, tc);
  CHECK(r.loss_history.back() < 0.1);
  CHECK(tbdg_generate(r.params, corpus[1].input).tokens == std::vector<TokenId>{10, 11, 8});
  CHECK(tbdg_train(corpus, cfg, tc).loss_history == r.loss_history);
  corpus[0].input.pop_back();
  CHECK_THROWS_AS(tbdg_train(corpus, cfg, tc), InvalidArgument);
}

TEST_CASE("pipeline") {
  const auto records = load_corpus(testutil::fixture_dir() / "toy", testutil::fixture_dir() / "toy" / "manifest.tsv");
  std::vector<Tokens> text;
  for (const auto& r : records) {
    text.push_back(tokenize(r.paragraph));
    for (const auto& g : r.regions) text.push_back(tokenize(g.phrase));
  }
  const Vocabulary vocab = build_vocab(text, 1);
  auto ccfg = tiny_captioner();
  ccfg.vocab_size = vocab.size();
  ccfg.max_len = 12;
  auto tcfg = tiny_tbdg();
  tcfg.vocab_size = vocab.size();
  tcfg.input_len = 40;
  tcfg.output_len = 20;
  const auto captioner = CaptionerParams::init(ccfg, 1);
  const auto model = TbdgParams::init(tcfg, 1);

  FeatureMap features;
  for (const auto& r : records) features[r.id] = std::vector<std::vector<float>>(r.regions.size(), {0.1f, 0.2f, 0.3f, 0.4f});
  const auto result = tbdg_pipeline(records[0], &features, captioner, model, vocab);
  CHECK(result.attention_rows >= result.tokens.size());
  CHECK(result.tokens.size() <= tcfg.output_len - 1);
  CHECK(result.captions.size() == std::min<std::size_t>(records[0].regions.size(), kFusedCaptions));

  const auto from_image = tbdg_pipeline(records[0], nullptr, captioner, model, vocab);
  CHECK(from_image.captions.size() == result.captions.size());

  FloorPlanRecord empty = records[0];
  empty.regions.clear();
  try {
    tbdg_pipeline(empty, &features, captioner, model, vocab);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("no regions") != std::string::npos);
  }

  const auto gt = ground_truth_captions(records[0]);
  REQUIRE(gt.size() == records[0].regions.size());
  CHECK(gt[0].score == records[0].regions[0].bbox.area());
  const auto sample = make_tbdg_sample(fuse_captions(gt, kFusedCaptions), records[0].paragraph, vocab,
                                       KeywordSet::defaults(), tcfg);
  CHECK(sample.input.size() == tcfg.input_len);
  CHECK(sample.target.size() == tcfg.output_len);
  CHECK(sample.target[0] == kBosId);
}

TEST_CASE("skip-gram") {
  const Vocabulary v = Vocabulary::from_tokens({"bed", "room", "sink", "kitchen", "the", "has", "a", "big",
                                                "oven", "small"});
  std::vector<std::vector<TokenId>> corpus;
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const bool bedroom = rng.below(2) == 0;
    Tokens s = bedroom ? Tokens{"the", "room", "has", "a", "big", "bed"}
                       : Tokens{"the", "kitchen", "has", "a", "small", "sink", "oven"};
    corpus.push_back(encode(s, v, s.size(), false).ids);
  }
  SkipgramConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 10;
  cfg.seed = 4;
  const auto r = train_skipgram(corpus, v.size(), cfg);
  CHECK(r.table.dim == 16);
  CHECK(r.table.vocab_size == v.size());
  CHECK(r.loss_history.size() == 10);
  CHECK(r.loss_history.back() < r.loss_history.front());
  const double related = cosine_similarity(r.table.row(v.id("bed")), r.table.row(v.id("room")));
  const double unrelated = cosine_similarity(r.table.row(v.id("bed")), r.table.row(v.id("oven")));
  CHECK(related > unrelated);

  cfg.epochs = 0;
  const auto untouched = train_skipgram(corpus, v.size(), cfg);
  CHECK(untouched.table.data == init_embeddings(v.size(), 16, 4).data);

  cfg.epochs = 1;
  CHECK_THROWS_AS(train_skipgram(corpus, 3, cfg), InvalidArgument);
  cfg.dim = 1;
  CHECK_THROWS_AS(train_skipgram(corpus, v.size(), cfg), InvalidArgument);

  testutil::ScratchDir dir("skipgram");
  save_embeddings(dir / "emb", r.table);
  const auto back = load_embeddings(dir / "emb");
  CHECK(back.data == r.table.data);
  CHECK(back.seed == 4);

  auto tcfg = tiny_tbdg();
  tcfg.vocab_size = v.size();
  tcfg.embed_dim = 16;
  const auto seeded = TbdgParams::init(tcfg, 1, &r.table);
  CHECK(std::equal(r.table.data.begin(), r.table.data.end(), seeded.embed.data().begin()));
  tcfg.embed_dim = 8;
  CHECK_THROWS_AS(TbdgParams::init(tcfg, 1, &r.table), DimensionError);
  CHECK(cosine_similarity(std::vector<float>{1, 0}, std::vector<float>{0, 2}) == doctest::Approx(0.0));
}
