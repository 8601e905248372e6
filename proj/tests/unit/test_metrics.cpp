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
#include <cmath>

#include "fpdesc/error.hpp"
#include "fpdesc/metrics.hpp"
#include "fpdesc/rng.hpp"
#include "oracles.hpp"

using namespace fpdesc;
using namespace fpdesc::metrics;

namespace {

constexpr double kTol = 1e-9;

Tokens words(const std::string& s) { return tokenize(s); }

Tokens random_tokens(Rng& rng, std::size_t max_len, std::size_t alphabet) {
  static const char* kWords[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  Tokens t(rng.below(max_len + 1));
  for (auto& w : t) w = kWords[rng.below(alphabet)];
  return t;
}

}  // namespace

TEST_CASE("ngram counts") {
  const auto one = ngram_counts({"a", "b", "a"}, 1);
  CHECK(one.at({"a"}) == 2);
  CHECK(one.at({"b"}) == 1);
  CHECK(ngram_counts({"a", "b", "c"}, 2).size() == 2);
  CHECK(ngram_counts({"a"}, 2).empty());
  CHECK_THROWS_AS(ngram_counts({"a"}, 0), InvalidArgument);
}

TEST_CASE("bleu worked examples") {
  const std::vector<Tokens> same{words("the cat sat on the mat")};
  const auto id = bleu(same[0], same, 4);
  CHECK(std::abs(id.bleu - 1.0) <= kTol);
  CHECK(id.brevity_penalty == 1.0);

  const std::vector<Tokens> cat{words("the cat")};
  const auto r = bleu(words("the the the the"), cat, 1);
  CHECK(std::abs(r.precisions[0] - 0.25) <= kTol);
  CHECK(r.matches[0] == 1);
  CHECK(r.totals[0] == 4);

  CHECK(std::abs(brevity_penalty(8, 10) - std::exp(-0.25)) <= kTol);
  CHECK(std::abs(brevity_penalty(8, 10) - 0.7788007831) <= 1e-9);
  CHECK(brevity_penalty(11, 10) == 1.0);
  CHECK(brevity_penalty(0, 10) == 0.0);

  const std::vector<Tokens> refs{words("a b c d e"), words("a b c")};
  CHECK(closest_reference_length(4, refs) == 3);
  CHECK(closest_reference_length(5, refs) == 5);

  const auto empty = bleu(Tokens{}, cat, 4);
  CHECK(empty.empty_candidate);
  CHECK(empty.bleu == 0);

  const auto zero = bleu(words("the dog"), cat, 2);
  CHECK(zero.bleu == 0);
  CHECK(zero.precisions[0] == doctest::Approx(0.5));
  CHECK(uniform_weights(4) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("rouge worked examples") {
  const std::vector<Tokens> ref{words("the cat sat")};
  CHECK(std::abs(rouge_n(words("the cat"), ref, 1).score - 2.0 / 3) <= kTol);
  CHECK(rouge_n(ref[0], ref, 1).score == 1.0);
  CHECK(rouge_n(words("dog"), ref, 1).score == 0.0);
  CHECK(rouge_n(words("the cat"), ref, 4).degenerate);

  const auto l = rouge_l({"a", "c"}, {"a", "b", "c"});
  CHECK(l.lcs == 2);
  CHECK(std::abs(l.precision - 1.0) <= kTol);
  CHECK(std::abs(l.recall - 2.0 / 3) <= kTol);
  CHECK(std::abs(l.f1 - 0.8) <= kTol);
  const auto same = rouge_l(words("a b c d e"), words("a b c d e"));
  CHECK(same.f1 == 1.0);
  const auto disjoint = rouge_l({"a"}, {"b"});
  CHECK(disjoint.f1 == 0.0);
  CHECK(rouge_l({}, {}).degenerate);
}

TEST_CASE("meteor worked examples") {
  const Tokens ten = words("one two three four five six seven eight nine ten");
  const auto m = meteor(ten, ten);
  CHECK(m.matched == 10);
  CHECK(m.chunks == 1);
  CHECK(std::abs(m.penalty - 0.05) <= kTol);
  CHECK(std::abs(m.score - 0.95) <= kTol);
  CHECK(meteor({"a"}, {"b"}).score == 0);

  const auto swapped = meteor({"a", "b"}, {"b", "a"});
  CHECK(swapped.matched == 2);
  CHECK(swapped.chunks == 2);
  CHECK(std::abs(swapped.penalty - 0.5) <= kTol);
  CHECK(std::abs(swapped.score - 0.5) <= kTol);

  CHECK(count_chunks({{0, 0}, {1, 1}, {3, 2}}) == 2);
  CHECK(count_chunks({}) == 0);
}

TEST_CASE("corpus evaluation") {
  const std::vector<PairText> pairs{{"1", "One two three four five six seven eight nine ten.",
                                     "One two three four five six seven eight nine ten."}};
  const auto r = evaluate_corpus(pairs);
  for (double b : r.mean_bleu) CHECK(std::abs(b - 1.0) <= kTol);
  CHECK(std::abs(r.mean_rouge1 - 1.0) <= kTol);
  CHECK(std::abs(r.mean_rouge_l_f1 - 1.0) <= kTol);
  CHECK(std::abs(r.mean_meteor - 0.95) <= kTol);
  CHECK(to_json(r).find("0.25") != std::string::npos);

  const std::vector<PairText> mixed{{"a", "the bed", "the big bed"}, {"b", "a sink", "the sink is white"},
                                    {"c", "kitchen", "a kitchen"}};
  std::vector<PairText> reversed(mixed.rbegin(), mixed.rend());
  const auto x = evaluate_corpus(mixed), y = evaluate_corpus(reversed);
  CHECK(x.mean_meteor == doctest::Approx(y.mean_meteor).epsilon(1e-15));
  CHECK(x.mean_rouge2 == doctest::Approx(y.mean_rouge2).epsilon(1e-15));
  CHECK(x.corpus_bleu[0] == doctest::Approx(y.corpus_bleu[0]).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate_corpus(std::vector<PairText>{}), InvalidArgument);

  const auto parsed = parse_pairs("{\"id\":\"x\",\"candidate\":\"a b\",\"reference\":\"a b c\"}\n");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].reference == "a b c");
  CHECK_THROWS_AS(parse_pairs("{\"id\":\"x\"}\n"), SchemaError);
  CHECK_THROWS_AS(parse_pairs("{\"id\":\n"), ParseError);
}

TEST_CASE("random instances agree with the brute-force oracles") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tokens cand = random_tokens(rng, 12, 4);
    std::vector<Tokens> refs;
    const auto n_refs = 1 + rng.below(3);
    for (std::uint64_t k = 0; k < n_refs; ++k) refs.push_back(random_tokens(rng, 12, 4));

    for (std::size_t n = 1; n <= 3; ++n) {
      const auto got = rouge_n(cand, refs, n);
      const auto [m, t] = oracle::rouge_n_counts(cand, refs, n);
      CHECK(got.matched == m);
      CHECK(got.total == t);
      if (t > 0) CHECK(std::abs(got.score - double(m) / double(t)) <= kTol);
    }
    if (!cand.empty()) {
      for (std::size_t N = 1; N <= 4; ++N) {
        const auto b = bleu(cand, refs, N);
        CHECK(std::abs(b.bleu - double(oracle::bleu(cand, refs, N))) <= kTol);
        for (std::size_t n = 1; n <= N; ++n) CHECK(b.matches[n - 1] == oracle::bleu_clipped(cand, refs, n).matched);
      }
    }

    const Tokens a = random_tokens(rng, 15, 4), bt = random_tokens(rng, 15, 4);
    CHECK(lcs_length(a, bt) == oracle::lcs_table(a, bt));
    const Tokens small = random_tokens(rng, 10, 3);
    CHECK(lcs_length(small, bt) == oracle::lcs_by_subsets(small, bt));

    const Tokens mc = random_tokens(rng, 8, 3), mr = random_tokens(rng, 8, 3);
    const auto got = meteor(mc, mr);
    const auto want = oracle::meteor_alignment(mc, mr);
    CHECK(got.matched == want.matched);
    CHECK(got.chunks == want.chunks);
    CHECK(std::abs(got.score - double(oracle::meteor_score(mc, mr))) <= kTol);
    CHECK(got.score >= 0);
    CHECK(got.score <= 1);
  }
}

TEST_CASE("replacing a miss with a match never lowers p1") {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Tokens cand = random_tokens(rng, 8, 6);
    const std::vector<Tokens> refs{random_tokens(rng, 8, 6)};
    if (cand.empty() || refs[0].empty()) continue;
    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (std::find(refs[0].begin(), refs[0].end(), cand[i]) == refs[0].end()) misses.push_back(i);
    }
    if (misses.empty()) continue;
    const double before = bleu(cand, refs, 1).precisions[0];
    cand[misses[rng.below(misses.size())]] = refs[0][rng.below(refs[0].size())];
    CHECK(bleu(cand, refs, 1).precisions[0] >= before);
    ++checked;
  }
  CHECK(checked > 100);
}
