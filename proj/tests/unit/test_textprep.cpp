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

#include "fpdesc/error.hpp"
#include "fpdesc/log.hpp"
#include "fpdesc/textprep.hpp"
#include "test_util.hpp"

using namespace fpdesc;

TEST_CASE("tokenize lowercases and drops punctuation") {
  CHECK(tokenize("3 Bedrooms,  2 Baths.") == Tokens{"3", "bedrooms", "2", "baths"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("It's large") == Tokens{"it", "'s", "large"});
  CHECK(tokenize("don't") == Tokens{"do", "n't"});
  CHECK(tokenize("caf\xc3\xa9 table") == Tokens{"caf", "table"});
}

TEST_CASE("split_sentences keeps one terminator per sentence") {
  CHECK(split_sentences("A house. It is big.") == std::vector<std::string>{"A house.", "It is big."});
  CHECK(split_sentences("  Wow!!  Really?  no end") ==
        std::vector<std::string>{"Wow!", "Really?", "no end"});
  CHECK(split_sentences("").empty());
}

TEST_CASE("vocabulary cutoff and ordering") {
  const std::vector<Tokens> corpus{{"a", "a", "b"}};
  const Vocabulary v2 = build_vocab(corpus, 2);
  CHECK(v2.size() == kNumSpecialTokens + 1);
  CHECK(v2.contains("a"));
  CHECK(v2.id("b") == kUnkId);

  const Vocabulary v1 = build_vocab(corpus, 1);
  CHECK(v1.contains("a"));
  CHECK(v1.contains("b"));

  const Vocabulary tie = build_vocab(std::vector<Tokens>{{"zeta", "alpha"}}, 1);
  CHECK(tie.id("alpha") < tie.id("zeta"));
  CHECK(tie.token(kPadId) == "<pad>");
}

TEST_CASE("vocabulary file round trip") {
  testutil::ScratchDir dir("textprep_vocab");
  const Vocabulary v = build_vocab(std::vector<Tokens>{{"the", "bed", "the", "sofa"}}, 1);
  v.save(dir / "vocab.txt");
  const Vocabulary back = Vocabulary::load(dir / "vocab.txt");
  CHECK(back.tokens() == v.tokens());
  CHECK_THROWS_AS(Vocabulary::load(dir / "missing.txt"), IoError);
}

TEST_CASE("encode pads, truncates and maps OOV to UNK") {
  const Vocabulary v = Vocabulary::from_tokens({"a", "b"});
  const TokenId a = v.id("a"), b = v.id("b");
  CHECK(encode({"a", "b"}, v, 4, false).ids == std::vector<TokenId>{a, b, kPadId, kPadId});
  CHECK(encode({"a", "zzz"}, v, 2, false).ids == std::vector<TokenId>{a, kUnkId});
  CHECK(encode({"a", "b"}, v, 5, true).ids == std::vector<TokenId>{kBosId, a, b, kEosId, kPadId});

  Tokens hundred(100, "a");
  hundred[79] = "b";
  const auto enc = encode(hundred, v, 80, false);
  CHECK(enc.length() == 80);
  CHECK(enc.ids[79] == b);
  CHECK(decode(enc.ids, v).size() == 80);
  CHECK(non_pad_length(encode({"a"}, v, 4, false).ids) == 1);
}

TEST_CASE("keyword_filter keeps keyword sentences in order") {
  const KeywordSet k = KeywordSet::defaults();
  CHECK(keyword_filter("The sky is blue. The kitchen is open.", k) == "The kitchen is open.");
  CHECK(keyword_filter("Nothing to see. Move along.", k).empty());
  const std::string all = "A bedroom here. Another bedroom there.";
  CHECK(keyword_filter(all, k) == all);
  CHECK(contains_keyword({"two", "bathtubs"}, k));
  CHECK(contains_keyword({"a", "kitchen", "bar"}, k));
  CHECK_FALSE(contains_keyword({"bathtubby"}, k));
}

TEST_CASE("keyword file parsing") {
  testutil::ScratchDir dir("textprep_keywords");
  testutil::write_file(dir / "k.txt", "# rooms\nroom: attic\nobject: piano\n");
  const KeywordSet k = KeywordSet::load(dir / "k.txt");
  CHECK(k.all() == std::vector<std::string>{"attic", "piano"});
  testutil::write_file(dir / "bad.txt", "attic\n");
  CHECK_THROWS_AS(KeywordSet::load(dir / "bad.txt"), ParseError);
}

TEST_CASE("fuse_captions orders by score and warns when short") {
  const std::vector<ScoredCaption> caps{{{"c0"}, 0.9}, {{"c1"}, 0.2}, {{"c2"}, 0.8}};
  CHECK(fuse_captions(caps, 2) == Tokens{"c0", "c2"});
  CHECK(fuse_captions(caps, 1) == Tokens{"c0"});

  std::vector<ScoredCaption> five;
  for (std::size_t len : {3, 4, 2, 5, 1}) five.push_back({Tokens(len, "w"), 1.0});
  CHECK(fuse_captions(five, 5).size() == 15);

  std::string warning;
  {
    log::ScopedWarningSink sink([&](std::string_view m) { warning = std::string(m); });
    CHECK(fuse_captions(caps, 5).size() == 3);
  }
  CHECK_FALSE(warning.empty());
}

TEST_CASE("detokenize joins clitics and closes with a period") {
  CHECK(detokenize({"it", "'s", "a", "bed"}) == "It's a bed.");
  CHECK(detokenize({}).empty());
  CHECK(min_sequence_length(std::vector<Tokens>{{"a", "b"}, {"c"}}) == 1);
}
