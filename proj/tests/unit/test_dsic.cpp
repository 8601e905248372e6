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

#include <algorithm>

#include "fpdesc/dsic.hpp"
#include "fpdesc/error.hpp"
#include "fpdesc/rng.hpp"

using namespace fpdesc;
using namespace fpdesc::dsic;

namespace {

HierarchicalConfig tiny_config() {
  HierarchicalConfig c;
  c.vocab_size = 10;
  c.feature_dim = 4;
  c.pooled_dim = 6;
  c.sentence_hidden = 6;
  c.word_hidden = 8;
  c.fc_width = 8;
  c.topic_dim = 5;
  c.embed_dim = 5;
  c.sent_max = 3;
  c.word_max = 5;
  return c;
}

std::vector<RegionFeature> random_regions(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<RegionFeature> out(n);
  for (auto& r : out) {
    r.values.resize(d);
    for (auto& v : r.values) v = static_cast<float>(rng.uniform(-1, 1));
  }
  return out;
}

bool same_tensors(DsicParams& a, DsicParams& b) {
  auto pa = a.parameters(), pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const auto da = pa[i].tensor->data(), db = pb[i].tensor->data();
    if (!std::equal(da.begin(), da.end(), db.begin(), db.end())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("pooling takes the per-coordinate maximum") {
  PoolingParams p{nn::Tensor({2, 2}, {1, 0, 0, 1}), nn::Tensor({2}, {0, 0})};
  const std::vector<RegionFeature> regions{{{1, 2}, {}}, {{3, 0}, {}}};
  CHECK(pool_regions(p, regions) == std::vector<float>{3, 2});

  PoolingParams shifted{nn::Tensor({2, 2}, {1, 0, 0, 1}), nn::Tensor({2}, {0.5f, -1})};
  CHECK(pool_regions(shifted, regions) == std::vector<float>{3.5f, 1});
  const std::vector<RegionFeature> one{{{-4, 7}, {}}};
  CHECK(pool_regions(p, one) == std::vector<float>{-4, 7});
  CHECK_THROWS_AS(pool_regions(p, std::vector<RegionFeature>{}), InvalidArgument);
  const std::vector<RegionFeature> wrong{{{1, 2, 3}, {}}};
  CHECK_THROWS_AS(pool_regions(p, wrong), DimensionError);
}

TEST_CASE("sentence count from continue probabilities") {
  CHECK(sentences_from_probs(std::vector<double>{0.9, 0.8, 0.3}, 0.5, 5) == 2);
  CHECK(sentences_from_probs(std::vector<double>{0.4}, 0.5, 5) == 0);
  CHECK(sentences_from_probs(std::vector<double>{0.9, 0.9, 0.9, 0.9, 0.9, 0.9}, 0.5, 5) == 5);
  CHECK(sentences_from_probs(std::vector<double>{0.5, 0.49}, 0.5, 5) == 1);
}

TEST_CASE("loss is linear in the two weights") {
  const auto cfg = tiny_config();
  DsicParams p = DsicParams::init(cfg, 4);
  Rng rng(8);
  std::vector<float> P(cfg.pooled_dim);
  for (auto& v : P) v = static_cast<float>(rng.uniform(-1, 1));
  const Paragraph K{{4, 5, 6}, {7, 8}};

  auto loss_with = [&](double bs, double bw) {
    p.config.beta_sent = bs;
    p.config.beta_word = bw;
    return dsic_loss(p, P, K);
  };
  const double sent = loss_with(1, 0), word = loss_with(0, 1);
  CHECK(sent > 0);
  CHECK(word > 0);
  CHECK(loss_with(0, 0) == 0);
  CHECK(loss_with(5, 1) == doctest::Approx(5 * sent + word).epsilon(1e-12));
  CHECK(loss_with(2, 3) == doctest::Approx(2 * sent + 3 * word).epsilon(1e-12));
  p.config.beta_sent = 5;
  p.config.beta_word = 1;

  const Paragraph full{{4}, {5}, {6}};
  CHECK_NOTHROW(dsic_loss(p, P, full));
  CHECK_THROWS_AS(dsic_loss(p, P, Paragraph{{4}, {5}, {6}, {7}}), InvalidArgument);
  CHECK_THROWS_AS(dsic_loss(p, P, Paragraph{{4, 5, 6, 7, 8}}), InvalidArgument);
  CHECK_THROWS_AS(dsic_loss(p, P, Paragraph{}), InvalidArgument);
  CHECK_THROWS_AS(dsic_loss(p, P, Paragraph{{42}}), InvalidArgument);
  CHECK_THROWS_AS(dsic_loss(p, std::vector<float>(3), K), DimensionError);
}

TEST_CASE("prepare_paragraph clips sentences and words") {
  const auto cfg = tiny_config();
  const Vocabulary v = Vocabulary::from_tokens({"a", "b", "c", "d", "e", "f"});
  const auto K = prepare_paragraph("A b c d e f. B. C. D. E.", v, cfg);
  REQUIRE(K.size() == 3);
  CHECK(K[0].size() == cfg.word_max - 1);
  CHECK(K[1] == std::vector<TokenId>{v.id("b")});
  CHECK_NOTHROW(validate_target(K, cfg));
}

TEST_CASE("generation respects the configured bounds") {
  auto cfg = tiny_config();
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const DsicParams p = DsicParams::init(cfg, rng.next());
    const auto regions = random_regions(1 + rng.below(6), cfg.feature_dim, rng);
    const auto g = dsic_generate(p, regions);
    CHECK(g.sentences.size() <= cfg.sent_max);
    CHECK(g.continue_probs.size() >= g.sentences.size());
    CHECK(g.sentences.size() == sentences_from_probs(g.continue_probs, cfg.threshold, cfg.sent_max));
    for (const auto& s : g.sentences) {
      CHECK(s.size() <= cfg.word_max);
      for (TokenId id : s) {
        CHECK(id != kPadId);
        CHECK(id != kBosId);
        CHECK(id != kEosId);
        CHECK(id < static_cast<TokenId>(cfg.vocab_size));
      }
    }
  }
}

TEST_CASE("top_regions keeps the largest boxes") {
  std::vector<RegionFeature> r{{{1}, BBox{0, 0, 1, 1}}, {{2}, BBox{0, 0, 3, 3}}, {{3}, BBox{0, 0, 2, 2}}};
  const auto top = top_regions(r, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].values[0] == 2);
  CHECK(top[1].values[0] == 3);
}

TEST_CASE("training") {
  const auto cfg = tiny_config();
  Rng rng(5);
  std::vector<Sample> corpus;
  for (int i = 0; i < 3; ++i) {
    corpus.push_back(Sample{random_regions(3, cfg.feature_dim, rng),
                            Paragraph{{TokenId(4 + i), 5}, {TokenId(6 + i)}}});
  }
  TrainConfig tc;
  tc.seed = 13;
  tc.epochs = 0;
  auto untouched = dsic_train(corpus, cfg, tc);
  auto init = DsicParams::init(cfg, 13);
  CHECK(untouched.loss_history.empty());
  CHECK(same_tensors(untouched.params, init));

  tc.epochs = 80;
  auto a = dsic_train(corpus, cfg, tc);
  auto b = dsic_train(corpus, cfg, tc);
  REQUIRE(a.loss_history.size() == 80);
  CHECK(a.loss_history == b.loss_history);
  CHECK(same_tensors(a.params, b.params));
  CHECK(a.loss_history.back() < 0.5 * a.loss_history.front());

  tc.batch_size = 0;
  CHECK_THROWS_AS(dsic_train(corpus, cfg, tc), InvalidArgument);
  tc.batch_size = 1;
  corpus[1].regions.clear();
  CHECK_THROWS_AS(dsic_train(corpus, cfg, tc), InvalidArgument);
}

TEST_CASE("config map round trip and validation") {
  auto cfg = tiny_config();
  cfg.threshold = 0.25;
  const auto back = HierarchicalConfig::from_map(cfg.to_map());
  CHECK(back.to_map() == cfg.to_map());
  CHECK(back.threshold == 0.25);
  CHECK_THROWS_AS(HierarchicalConfig::from_map({{"bogus", "1"}}), InvalidArgument);
  cfg.threshold = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = tiny_config();
  cfg.vocab_size = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
