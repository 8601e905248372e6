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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpdesc/textprep.hpp"

namespace fpdesc::metrics {

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

/// Contiguous n-grams with multiplicity. Throws InvalidArgument for n < 1.
NgramCounts ngram_counts(const Tokens& tokens, std::size_t n);

struct BleuResult {
  std::vector<double> precisions;  // p_1 .. p_N
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::vector<double> weights;
  double brevity_penalty = 0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
  double bleu = 0;
  bool empty_candidate = false;
};

/// Uniform weights 1/N.
std::vector<double> uniform_weights(std::size_t N);

/// exp(1 - r/c) when c <= r, else 1; 0 for an empty candidate.
double brevity_penalty(std::size_t c, std::size_t r);

/// Reference length closest to c; ties go to the shorter reference.
std::size_t closest_reference_length(std::size_t c, std::span<const Tokens> references);

/// Clipped modified precisions combined geometrically, times the brevity penalty. Empty
/// weights mean uniform. Any zero precision gives bleu 0 (precisions are still reported).
BleuResult bleu(const Tokens& candidate, std::span<const Tokens> references, std::size_t N,
                std::span<const double> weights = {});

/// Pools clipped matches, totals and lengths over the corpus before combining.
BleuResult corpus_bleu(std::span<const Tokens> candidates,
                       std::span<const std::vector<Tokens>> references, std::size_t N,
                       std::span<const double> weights = {});

struct RougeNResult {
  double score = 0;
  std::size_t matched = 0;
  std::size_t total = 0;
  /// Set when no reference holds an n-gram of this order.
  bool degenerate = false;
};

/// Sum over references of clipped co-occurrence counts over the sum of reference n-gram counts.
RougeNResult rouge_n(const Tokens& candidate, std::span<const Tokens> references, std::size_t n);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

struct RougeLResult {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t lcs = 0;
  bool degenerate = false;
};

RougeLResult rouge_l(const Tokens& candidate, const Tokens& reference);

struct MeteorResult {
  double precision = 0;
  double recall = 0;
  double fmean = 0;
  std::size_t matched = 0;
  std::size_t chunks = 0;
  double penalty = 0;
  double score = 0;
  /// False when the chunk search hit its node budget and the best alignment found is used.
  bool chunk_search_exact = true;
};

/// A matched pair (candidate position, reference position).
using Alignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Runs of alignment pairs that are adjacent in both strings.
std::size_t count_chunks(Alignment alignment);

/// Exact unigram matching. The alignment has the maximum number of matches and, among those,
/// the fewest chunks. PN = 0.5 * chunks / matched; score = 10PR/(R+9P) * (1 - PN).
MeteorResult meteor(const Tokens& candidate, const Tokens& reference,
                    std::size_t node_budget = 2'000'000);

struct PairText {
  std::string id;
  std::string candidate;
  std::string reference;
};

struct RecordScores {
  std::string id;
  std::vector<double> bleu;  // BLEU-1 .. BLEU-N
  double rouge1 = 0;
  double rouge2 = 0;
  RougeLResult rouge_l;
  MeteorResult meteor;
};

struct MetricReport {
  std::size_t max_order = 4;
  std::vector<RecordScores> records;
  std::vector<double> mean_bleu;
  std::vector<double> corpus_bleu;
  double mean_rouge1 = 0;
  double mean_rouge2 = 0;
  double mean_rouge_l_precision = 0;
  double mean_rouge_l_recall = 0;
  double mean_rouge_l_f1 = 0;
  double mean_meteor = 0;
};

struct EvalConfig {
  std::size_t max_order = 4;
  std::size_t meteor_node_budget = 2'000'000;
};

/// Tokenizes both sides and scores every pair. Throws InvalidArgument on an empty list.
MetricReport evaluate_corpus(std::span<const PairText> pairs, const EvalConfig& config = {});

std::string to_json(const MetricReport& report);

/// One JSON object per line: {"id", "candidate", "reference"}.
std::vector<PairText> parse_pairs(std::string_view text);
std::vector<PairText> read_pairs(const std::filesystem::path& path);

}  // namespace fpdesc::metrics
