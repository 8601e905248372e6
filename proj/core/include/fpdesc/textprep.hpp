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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fpdesc {

using TokenId = std::int32_t;
using Tokens = std::vector<std::string>;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kBosId = 2;
inline constexpr TokenId kEosId = 3;
inline constexpr std::size_t kNumSpecialTokens = 4;

/// Lowercased PTB-style tokens with punctuation and non-alphanumeric symbols removed.
///
/// Contractions are split the way the Penn Treebank does it: "don't" -> "do" "n't",
/// "it's" -> "it" "'s". Any byte outside [A-Za-z0-9'] (including non-ASCII) separates
/// tokens.
Tokens tokenize(std::string_view text);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Splits on '.', '!' and '?'. Each returned sentence is whitespace-normalized and keeps a
/// single terminator; a trailing fragment without terminator is returned as is.
std::vector<std::string> split_sentences(std::string_view text);

/// Token <-> id bijection. Ids 0..3 are PAD, UNK, BOS, EOS.
class Vocabulary {
 public:
  /// Keeps tokens seen at least min_count times, ordered by (frequency desc, token asc).
  static Vocabulary build(std::span<const Tokens> corpus, std::size_t min_count);

  /// Vocabulary with the given regular tokens in the given order.
  static Vocabulary from_tokens(const std::vector<std::string>& regular_tokens);

  /// Text file: the four special tokens, one per line, then one token per line in id order.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const noexcept { return id_to_token_.size(); }
  std::size_t min_count() const noexcept { return min_count_; }
  bool contains(std::string_view token) const;
  /// UNK for tokens outside the vocabulary.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

  static bool is_special(TokenId id) noexcept {
    return id >= 0 && id < static_cast<TokenId>(kNumSpecialTokens);
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::size_t min_count_ = 1;
};

inline Vocabulary build_vocab(std::span<const Tokens> corpus, std::size_t min_count) {
  return Vocabulary::build(corpus, min_count);
}

struct TokenSequence {
  std::vector<TokenId> ids;
  std::size_t length() const noexcept { return ids.size(); }
};

/// Maps tokens to ids (OOV -> UNK), then truncates or PAD-extends to fixed_len. With
/// add_bos_eos the sequence is BOS, up to fixed_len-2 tokens, EOS, then padding.
TokenSequence encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t fixed_len,
                     bool add_bos_eos);

/// Inverse of encode on regular tokens: specials and padding are dropped.
Tokens decode(std::span<const TokenId> ids, const Vocabulary& vocab);

/// Number of leading ids before the first PAD.
std::size_t non_pad_length(std::span<const TokenId> ids);

/// Room and object keywords used to shorten target paragraphs.
struct KeywordSet {
  std::vector<std::string> rooms;
  std::vector<std::string> objects;

  static KeywordSet defaults();
  /// Lines of the form "room: <keyword>" or "object: <keyword>"; '#' starts a comment.
  static KeywordSet load(const std::filesystem::path& path);
  std::vector<std::string> all() const;
};

/// True when a keyword occurs in the tokens on token boundaries. The last keyword token
/// may carry a plural "s"/"es" ("bathtubs" matches "bathtub").
bool contains_keyword(const Tokens& sentence_tokens, const KeywordSet& keywords);

/// Keeps the sentences that mention a keyword, in their original order, joined by one space.
std::string keyword_filter(std::string_view paragraph, const KeywordSet& keywords);

struct ScoredCaption {
  Tokens tokens;
  double score = 0;
};

/// Concatenation of the k best captions (score desc, original index asc). Warns when fewer
/// than k captions are available.
Tokens fuse_captions(std::span<const ScoredCaption> captions, std::size_t k);

/// Shortest fused length over a set of samples. Reported during preprocessing only; sequences
/// are padded or truncated to a fixed length instead.
std::size_t min_sequence_length(std::span<const Tokens> sequences);

/// Joins tokens for display: re-attaches clitics, capitalizes the first word and ends with
/// a period.
std::string detokenize(const Tokens& tokens);

}  // namespace fpdesc
