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

#include "fpdesc/textprep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>

#include "fpdesc/error.hpp"
#include "fpdesc/log.hpp"

namespace fpdesc {
namespace {

constexpr std::array<const char*, kNumSpecialTokens> kSpecialTokens = {"<pad>", "<unk>",
                                                                       "<bos>", "<eos>"};

bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Lowercases ASCII and folds typographic apostrophes to '\''.
std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(ascii_lower(static_cast<char>(c)));
  }
  return out;
}

std::string strip_apostrophes(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '\'') out.push_back(c);
  }
  return out;
}

void split_chunk(std::string_view chunk, Tokens& out) {
  while (!chunk.empty() && chunk.front() == '\'') chunk.remove_prefix(1);
  const bool negation = chunk.size() > 3 && chunk.ends_with("n't");
  if (!negation) {
    while (!chunk.empty() && chunk.back() == '\'') chunk.remove_suffix(1);
  }
  if (chunk.empty()) return;

  if (negation) {
    std::string stem = strip_apostrophes(chunk.substr(0, chunk.size() - 3));
    if (!stem.empty()) out.push_back(std::move(stem));
    out.emplace_back("n't");
    return;
  }

  static constexpr std::array<std::string_view, 6> kClitics = {"s", "re", "ve", "ll", "d", "m"};
  const auto apos = chunk.rfind('\'');
  if (apos != std::string_view::npos && apos > 0) {
    const std::string_view suffix = chunk.substr(apos + 1);
    if (std::find(kClitics.begin(), kClitics.end(), suffix) != kClitics.end()) {
      std::string stem = strip_apostrophes(chunk.substr(0, apos));
      if (!stem.empty()) out.push_back(std::move(stem));
      out.push_back("'" + std::string(suffix));
      return;
    }
  }
  std::string word = strip_apostrophes(chunk);
  if (!word.empty()) out.push_back(std::move(word));
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Tokens tokenize(std::string_view text) {
  const std::string folded = fold(text);
  Tokens tokens;
  std::size_t i = 0;
  while (i < folded.size()) {
    while (i < folded.size() && !is_token_char(folded[i])) ++i;
    std::size_t j = i;
    while (j < folded.size() && is_token_char(folded[j])) ++j;
    if (j > i) split_chunk(std::string_view(folded).substr(i, j - i), tokens);
    i = j;
  }
  return tokens;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (!is_terminator(c)) {
      current.push_back(c);
      ++i;
      continue;
    }
    std::string body = normalize_whitespace(current);
    if (!body.empty()) sentences.push_back(body + c);
    current.clear();
    while (i < text.size() && is_terminator(text[i])) ++i;
  }
  std::string tail = normalize_whitespace(current);
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::build(std::span<const Tokens> corpus, std::size_t min_count) {
  if (min_count < 1) throw InvalidArgument("build_vocab: min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++counts[token];
  }
  if (counts.empty()) throw InvalidArgument("build_vocab: empty corpus");

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> regular;
  regular.reserve(kept.size());
  for (auto& [token, count] : kept) regular.push_back(token);
  Vocabulary vocab = from_tokens(regular);
  vocab.min_count_ = min_count;
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& regular_tokens) {
  Vocabulary vocab;
  for (const char* special : kSpecialTokens) vocab.id_to_token_.emplace_back(special);
  for (const auto& token : regular_tokens) vocab.id_to_token_.push_back(token);
  for (std::size_t i = 0; i < vocab.id_to_token_.size(); ++i) {
    auto [it, inserted] =
        vocab.token_to_id_.emplace(vocab.id_to_token_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw InvalidArgument("vocabulary: duplicate token '" + vocab.id_to_token_[i] + "'");
    }
  }
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary", path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.size() < kNumSpecialTokens) {
    throw ParseError("vocabulary header needs " + std::to_string(kNumSpecialTokens) + " lines",
                     lines.size() + 1);
  }
  for (std::size_t i = 0; i < kNumSpecialTokens; ++i) {
    if (lines[i] != kSpecialTokens[i]) {
      throw ParseError(std::string("expected special token ") + kSpecialTokens[i], i + 1);
    }
  }
  std::vector<std::string> regular(lines.begin() + kNumSpecialTokens, lines.end());
  while (!regular.empty() && regular.back().empty()) regular.pop_back();
  for (std::size_t i = 0; i < regular.size(); ++i) {
    if (regular[i].empty()) throw ParseError("empty token", i + kNumSpecialTokens + 1);
  }
  return from_tokens(regular);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary", path.string());
  for (const auto& token : id_to_token_) out << token << '\n';
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.find(std::string(token)) != token_to_id_.end();
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw InvalidArgument("vocabulary: id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

TokenSequence encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t fixed_len,
                     bool add_bos_eos) {
  if (add_bos_eos && fixed_len < 2) {
    throw InvalidArgument("encode: fixed_len must be >= 2 with BOS/EOS");
  }
  TokenSequence seq;
  seq.ids.reserve(fixed_len);
  const std::size_t room = add_bos_eos ? fixed_len - 2 : fixed_len;
  if (add_bos_eos) seq.ids.push_back(kBosId);
  for (std::size_t i = 0; i < tokens.size() && i < room; ++i) {
    seq.ids.push_back(vocab.id(tokens[i]));
  }
  if (add_bos_eos) seq.ids.push_back(kEosId);
  seq.ids.resize(fixed_len, kPadId);
  return seq;
}

Tokens decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  Tokens out;
  for (TokenId id : ids) {
    if (Vocabulary::is_special(id)) continue;
    out.push_back(vocab.token(id));
  }
  return out;
}

std::size_t non_pad_length(std::span<const TokenId> ids) {
  auto it = std::find(ids.begin(), ids.end(), kPadId);
  return static_cast<std::size_t>(it - ids.begin());
}

// ---------------------------------------------------------------------------
// Keywords

KeywordSet KeywordSet::defaults() {
  KeywordSet set;
  set.rooms = {"bedroom", "bathroom", "kitchen", "porch", "garage", "hall", "living"};
  set.objects = {"stairs", "bathtub", "kitchen bar", "closet", "fireplace", "deck"};
  return set;
}

KeywordSet KeywordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keyword file", path.string());
  KeywordSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim_copy(line);
    if (trimmed.empty()) continue;
    const auto colon = trimmed.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'room:' or 'object:'", line_no);
    const std::string kind = trim_copy(trimmed.substr(0, colon));
    std::string keyword = normalize_whitespace(fold(trimmed.substr(colon + 1)));
    if (keyword.empty()) throw ParseError("empty keyword", line_no);
    if (kind == "room") {
      set.rooms.push_back(std::move(keyword));
    } else if (kind == "object") {
      set.objects.push_back(std::move(keyword));
    } else {
      throw ParseError("unknown keyword kind '" + kind + "'", line_no);
    }
  }
  return set;
}

std::vector<std::string> KeywordSet::all() const {
  std::vector<std::string> out = rooms;
  out.insert(out.end(), objects.begin(), objects.end());
  return out;
}

bool contains_keyword(const Tokens& sentence_tokens, const KeywordSet& keywords) {
  for (const auto& keyword : keywords.all()) {
    const Tokens kw = tokenize(keyword);
    if (kw.empty() || kw.size() > sentence_tokens.size()) continue;
    for (std::size_t start = 0; start + kw.size() <= sentence_tokens.size(); ++start) {
      bool match = true;
      for (std::size_t k = 0; k < kw.size() && match; ++k) {
        const std::string& tok = sentence_tokens[start + k];
        if (tok == kw[k]) continue;
        const bool last = k + 1 == kw.size();
        match = last && (tok == kw[k] + "s" || tok == kw[k] + "es");
      }
      if (match) return true;
    }
  }
  return false;
}

std::string keyword_filter(std::string_view paragraph, const KeywordSet& keywords) {
  std::string out;
  for (auto& sentence : split_sentences(paragraph)) {
    if (!contains_keyword(tokenize(sentence), keywords)) continue;
    if (!is_terminator(sentence.back())) sentence.push_back('.');
    if (!out.empty()) out.push_back(' ');
    out += sentence;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Captions

Tokens fuse_captions(std::span<const ScoredCaption> captions, std::size_t k) {
  if (k < 1) throw InvalidArgument("fuse_captions: k must be >= 1");
  if (captions.size() < k) {
    log::warn("fuse_captions: only " + std::to_string(captions.size()) +
              " captions available, fusing all of them (k=" + std::to_string(k) + ")");
  }
  std::vector<std::size_t> order(captions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return captions[a].score > captions[b].score;
  });
  Tokens fused;
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    const auto& tokens = captions[order[i]].tokens;
    fused.insert(fused.end(), tokens.begin(), tokens.end());
  }
  return fused;
}

std::size_t min_sequence_length(std::span<const Tokens> sequences) {
  if (sequences.empty()) return 0;
  std::size_t best = sequences.front().size();
  for (const auto& s : sequences) best = std::min(best, s.size());
  return best;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  bool capitalize = true;
  for (const auto& token : tokens) {
    if (token.empty()) continue;
    const bool clitic = token.front() == '\'' || token == "n't";
    const bool terminator = token.size() == 1 && is_terminator(token.front());
    if (!out.empty() && !clitic && !terminator) out.push_back(' ');
    std::string word = token;
    if (capitalize && !clitic && !terminator) {
      word.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(word.front())));
      capitalize = false;
    }
    out += word;
    if (terminator) capitalize = true;
  }
  if (!out.empty() && !is_terminator(out.back())) out.push_back('.');
  return out;
}

}  // namespace fpdesc
