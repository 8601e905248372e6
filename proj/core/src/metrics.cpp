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

#include "fpdesc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "fpdesc/error.hpp"

namespace fpdesc::metrics {
namespace {

std::vector<double> resolve_weights(std::size_t N, std::span<const double> weights) {
  if (N < 1) throw InvalidArgument("bleu: N must be at least 1");
  if (weights.empty()) return uniform_weights(N);
  if (weights.size() != N) {
    throw InvalidArgument("bleu: " + std::to_string(weights.size()) + " weights for N = " + std::to_string(N));
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("bleu: weights must sum to 1");
  return {weights.begin(), weights.end()};
}

/// Clipped matches and candidate n-gram total for order n.
std::pair<std::size_t, std::size_t> clipped(const Tokens& candidate, std::span<const Tokens> references,
                                            std::size_t n) {
  const NgramCounts cand = ngram_counts(candidate, n);
  NgramCounts max_ref;
  for (const auto& ref : references) {
    for (const auto& [gram, count] : ngram_counts(ref, n)) {
      auto& slot = max_ref[gram];
      slot = std::max(slot, count);
    }
  }
  std::size_t matches = 0, total = 0;
  for (const auto& [gram, count] : cand) {
    total += count;
    auto it = max_ref.find(gram);
    if (it != max_ref.end()) matches += std::min(count, it->second);
  }
  return {matches, total};
}

void combine(BleuResult& r) {
  r.precisions.assign(r.matches.size(), 0.0);
  bool any_zero = false;
  double log_sum = 0;
  for (std::size_t k = 0; k < r.matches.size(); ++k) {
    r.precisions[k] = r.totals[k] ? static_cast<double>(r.matches[k]) / static_cast<double>(r.totals[k]) : 0.0;
    if (r.precisions[k] == 0) {
      any_zero = true;
    } else {
      log_sum += r.weights[k] * std::log(r.precisions[k]);
    }
  }
  r.brevity_penalty = brevity_penalty(r.candidate_length, r.reference_length);
  r.bleu = any_zero || r.empty_candidate ? 0.0 : std::clamp(r.brevity_penalty * std::exp(log_sum), 0.0, 1.0);
}

/// Alignment with the maximum number of matches found by repeatedly taking the longest
/// common run of unmatched tokens.
std::vector<long> greedy_tiling(const std::vector<int>& c, const std::vector<int>& r) {
  const std::size_t n = c.size(), m = r.size();
  std::vector<long> assign(n, -1);
  std::vector<bool> used_r(m, false);
  std::vector<std::size_t> run((n + 1) * (m + 1));
  for (;;) {
    std::fill(run.begin(), run.end(), 0);
    std::size_t best = 0, bi = 0, bj = 0;
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = m; j-- > 0;) {
        if (assign[i] < 0 && !used_r[j] && c[i] == r[j]) {
          run[i * (m + 1) + j] = 1 + run[(i + 1) * (m + 1) + j + 1];
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (run[i * (m + 1) + j] > best) {
          best = run[i * (m + 1) + j];
          bi = i;
          bj = j;
        }
      }
    }
    if (best == 0) break;
    for (std::size_t k = 0; k < best; ++k) {
      assign[bi + k] = static_cast<long>(bj + k);
      used_r[bj + k] = true;
    }
  }
  return assign;
}

std::size_t links_of(const std::vector<long>& assign) {
  std::size_t links = 0;
  for (std::size_t i = 1; i < assign.size(); ++i) {
    if (assign[i] >= 0 && assign[i - 1] >= 0 && assign[i] == assign[i - 1] + 1) ++links;
  }
  return links;
}

class ChunkSearch {
 public:
  ChunkSearch(const std::vector<int>& c, const std::vector<int>& r, std::size_t matches,
              std::size_t budget)
      : c_(c), r_(r), matches_(matches), budget_(budget), assign_(c.size(), -1), used_(r.size(), false) {
    int vocab = 0;
    for (int v : c_) vocab = std::max(vocab, v + 1);
    for (int v : r_) vocab = std::max(vocab, v + 1);
    std::vector<std::size_t> pc(vocab, 0), pr(vocab, 0);
    for (int v : c_) ++pc[v];
    for (int v : r_) ++pr[v];
    skips_.resize(vocab);
    for (int v = 0; v < vocab; ++v) skips_[v] = pc[v] - std::min(pc[v], pr[v]);
    positions_.resize(vocab);
    for (std::size_t j = 0; j < r_.size(); ++j) positions_[r_[j]].push_back(j);
    // Remaining cand positions whose bigram with the previous token also occurs in the reference.
    potential_.assign(c_.size() + 1, 0);
    for (std::size_t i = c_.size(); i-- > 0;) {
      bool possible = false;
      if (i > 0) {
        for (std::size_t j = 1; j < r_.size() && !possible; ++j) {
          possible = r_[j] == c_[i] && r_[j - 1] == c_[i - 1];
        }
      }
      potential_[i] = potential_[i + 1] + (possible ? 1 : 0);
    }
  }

  void seed(const std::vector<long>& assign) {
    best_assign_ = assign;
    best_links_ = links_of(assign);
  }

  void run() { dfs(0, 0, 0); }

  const std::vector<long>& best() const { return best_assign_; }
  bool exhausted() const { return exhausted_; }

 private:
  bool done() const { return exhausted_ || (matches_ > 0 && best_links_ + 1 == matches_); }

  void dfs(std::size_t i, std::size_t matched, std::size_t links) {
    if (done()) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (i == c_.size()) {
      if (matched == matches_ && links > best_links_) {
        best_links_ = links;
        best_assign_ = assign_;
      }
      return;
    }
    if (links + std::min(matches_ - matched, potential_[i]) <= best_links_) return;
    const int w = c_[i];
    const long prev = i > 0 ? assign_[i - 1] : -1;
    const long preferred = prev >= 0 ? prev + 1 : -1;
    if (preferred >= 0 && static_cast<std::size_t>(preferred) < r_.size() && !used_[preferred] &&
        r_[preferred] == w) {
      take(i, preferred, matched, links + 1);
    }
    for (std::size_t j : positions_[w]) {
      if (done()) return;
      if (used_[j] || static_cast<long>(j) == preferred) continue;
      take(i, static_cast<long>(j), matched, links);
    }
    if (skips_[w] > 0 && !done()) {
      --skips_[w];
      dfs(i + 1, matched, links);
      ++skips_[w];
    }
  }

  void take(std::size_t i, long j, std::size_t matched, std::size_t links) {
    used_[j] = true;
    assign_[i] = j;
    dfs(i + 1, matched + 1, links);
    assign_[i] = -1;
    used_[j] = false;
  }

  const std::vector<int>& c_;
  const std::vector<int>& r_;
  std::size_t matches_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  std::vector<long> assign_;
  std::vector<bool> used_;
  std::vector<std::size_t> skips_;
  std::vector<std::vector<std::size_t>> positions_;
  std::vector<std::size_t> potential_;
  std::vector<long> best_assign_;
  std::size_t best_links_ = 0;
};

double mean_of(const std::vector<RecordScores>& rows, double (*get)(const RecordScores&)) {
  double sum = 0;
  for (const auto& r : rows) sum += get(r);
  return sum / static_cast<double>(rows.size());
}

nlohmann::ordered_json meteor_json(const MeteorResult& m) {
  nlohmann::ordered_json j;
  j["score"] = m.score;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["fmean"] = m.fmean;
  j["matched"] = m.matched;
  j["chunks"] = m.chunks;
  j["penalty"] = m.penalty;
  j["chunk_search_exact"] = m.chunk_search_exact;
  return j;
}

nlohmann::ordered_json rouge_l_json(const RougeLResult& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  return j;
}

}  // namespace

NgramCounts ngram_counts(const Tokens& tokens, std::size_t n) {
  if (n < 1) throw InvalidArgument("ngram_counts: n must be at least 1");
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

std::vector<double> uniform_weights(std::size_t N) {
  return std::vector<double>(N, 1.0 / static_cast<double>(N));
}

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c == 0) return 0.0;
  if (c > r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

std::size_t closest_reference_length(std::size_t c, std::span<const Tokens> references) {
  std::size_t best = 0;
  bool have = false;
  for (const auto& ref : references) {
    const std::size_t len = ref.size();
    const auto dist = [c](std::size_t l) { return l > c ? l - c : c - l; };
    if (!have || dist(len) < dist(best) || (dist(len) == dist(best) && len < best)) {
      best = len;
      have = true;
    }
  }
  return best;
}

BleuResult bleu(const Tokens& candidate, std::span<const Tokens> references, std::size_t N,
                std::span<const double> weights) {
  BleuResult r;
  r.weights = resolve_weights(N, weights);
  r.candidate_length = candidate.size();
  r.reference_length = closest_reference_length(candidate.size(), references);
  r.empty_candidate = candidate.empty();
  for (std::size_t n = 1; n <= N; ++n) {
    auto [m, t] = clipped(candidate, references, n);
    r.matches.push_back(m);
    r.totals.push_back(t);
  }
  combine(r);
  return r;
}

BleuResult corpus_bleu(std::span<const Tokens> candidates, std::span<const std::vector<Tokens>> references,
                       std::size_t N, std::span<const double> weights) {
  if (candidates.size() != references.size()) {
    throw InvalidArgument("corpus_bleu: candidate and reference counts differ");
  }
  BleuResult r;
  r.weights = resolve_weights(N, weights);
  r.matches.assign(N, 0);
  r.totals.assign(N, 0);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    r.candidate_length += candidates[k].size();
    r.reference_length += closest_reference_length(candidates[k].size(), references[k]);
    for (std::size_t n = 1; n <= N; ++n) {
      auto [m, t] = clipped(candidates[k], references[k], n);
      r.matches[n - 1] += m;
      r.totals[n - 1] += t;
    }
  }
  r.empty_candidate = r.candidate_length == 0;
  combine(r);
  return r;
}

RougeNResult rouge_n(const Tokens& candidate, std::span<const Tokens> references, std::size_t n) {
  const NgramCounts cand = ngram_counts(candidate, n);
  RougeNResult r;
  for (const auto& ref : references) {
    for (const auto& [gram, count] : ngram_counts(ref, n)) {
      r.total += count;
      auto it = cand.find(gram);
      if (it != cand.end()) r.matched += std::min(count, it->second);
    }
  }
  if (r.total == 0) {
    r.degenerate = true;
    return r;
  }
  r.score = static_cast<double>(r.matched) / static_cast<double>(r.total);
  return r;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeLResult rouge_l(const Tokens& candidate, const Tokens& reference) {
  RougeLResult r;
  if (candidate.empty() && reference.empty()) {
    r.degenerate = true;
    return r;
  }
  r.lcs = lcs_length(candidate, reference);
  r.precision = candidate.empty() ? 0.0 : static_cast<double>(r.lcs) / static_cast<double>(candidate.size());
  r.recall = reference.empty() ? 0.0 : static_cast<double>(r.lcs) / static_cast<double>(reference.size());
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

std::size_t count_chunks(Alignment alignment) {
  if (alignment.empty()) return 0;
  std::sort(alignment.begin(), alignment.end());
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < alignment.size(); ++k) {
    const bool adjacent = alignment[k].first == alignment[k - 1].first + 1 &&
                          alignment[k].second == alignment[k - 1].second + 1;
    if (!adjacent) ++chunks;
  }
  return chunks;
}

MeteorResult meteor(const Tokens& candidate, const Tokens& reference, std::size_t node_budget) {
  MeteorResult m;
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const Tokens& tokens) {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(ids.emplace(t, static_cast<int>(ids.size())).first->second);
    return out;
  };
  const std::vector<int> c = intern(candidate);
  const std::vector<int> r = intern(reference);
  std::vector<std::size_t> cc(ids.size(), 0), rc(ids.size(), 0);
  for (int v : c) ++cc[v];
  for (int v : r) ++rc[v];
  for (std::size_t v = 0; v < ids.size(); ++v) m.matched += std::min(cc[v], rc[v]);
  if (m.matched == 0) return m;

  ChunkSearch search(c, r, m.matched, node_budget);
  search.seed(greedy_tiling(c, r));
  search.run();
  m.chunk_search_exact = !search.exhausted();
  Alignment alignment;
  const auto& assign = search.best();
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] >= 0) alignment.emplace_back(i, static_cast<std::size_t>(assign[i]));
  }
  m.chunks = count_chunks(alignment);
  m.precision = static_cast<double>(m.matched) / static_cast<double>(candidate.size());
  m.recall = static_cast<double>(m.matched) / static_cast<double>(reference.size());
  m.fmean = 10 * m.precision * m.recall / (m.recall + 9 * m.precision);
  m.penalty = 0.5 * static_cast<double>(m.chunks) / static_cast<double>(m.matched);
  m.score = m.fmean * (1 - m.penalty);
  return m;
}

MetricReport evaluate_corpus(std::span<const PairText> pairs, const EvalConfig& config) {
  if (pairs.empty()) throw InvalidArgument("evaluate_corpus: no pairs");
  if (config.max_order < 1) throw InvalidArgument("evaluate_corpus: max_order must be at least 1");
  MetricReport report;
  report.max_order = config.max_order;
  std::vector<Tokens> candidates;
  std::vector<std::vector<Tokens>> references;
  for (const auto& p : pairs) {
    Tokens cand = tokenize(p.candidate);
    Tokens ref = tokenize(p.reference);
    const std::vector<Tokens> refs{ref};
    RecordScores row;
    row.id = p.id;
    for (std::size_t n = 1; n <= config.max_order; ++n) row.bleu.push_back(bleu(cand, refs, n).bleu);
    row.rouge1 = rouge_n(cand, refs, 1).score;
    row.rouge2 = rouge_n(cand, refs, 2).score;
    row.rouge_l = rouge_l(cand, ref);
    row.meteor = meteor(cand, ref, config.meteor_node_budget);
    report.records.push_back(std::move(row));
    candidates.push_back(std::move(cand));
    references.push_back(refs);
  }
  for (std::size_t n = 1; n <= config.max_order; ++n) {
    double sum = 0;
    for (const auto& row : report.records) sum += row.bleu[n - 1];
    report.mean_bleu.push_back(sum / static_cast<double>(report.records.size()));
    report.corpus_bleu.push_back(corpus_bleu(candidates, references, n).bleu);
  }
  report.mean_rouge1 = mean_of(report.records, [](const RecordScores& r) { return r.rouge1; });
  report.mean_rouge2 = mean_of(report.records, [](const RecordScores& r) { return r.rouge2; });
  report.mean_rouge_l_precision = mean_of(report.records, [](const RecordScores& r) { return r.rouge_l.precision; });
  report.mean_rouge_l_recall = mean_of(report.records, [](const RecordScores& r) { return r.rouge_l.recall; });
  report.mean_rouge_l_f1 = mean_of(report.records, [](const RecordScores& r) { return r.rouge_l.f1; });
  report.mean_meteor = mean_of(report.records, [](const RecordScores& r) { return r.meteor.score; });
  return report;
}

std::string to_json(const MetricReport& report) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json summary;
  summary["record_count"] = report.records.size();
  nlohmann::ordered_json weights = nlohmann::ordered_json::object();
  for (std::size_t n = 1; n <= report.max_order; ++n) {
    weights["bleu" + std::to_string(n)] = uniform_weights(n);
    summary["bleu" + std::to_string(n)] = report.mean_bleu[n - 1];
    summary["corpus_bleu" + std::to_string(n)] = report.corpus_bleu[n - 1];
  }
  summary["rouge1"] = report.mean_rouge1;
  summary["rouge2"] = report.mean_rouge2;
  summary["rouge_l"] = {{"precision", report.mean_rouge_l_precision},
                        {"recall", report.mean_rouge_l_recall},
                        {"f1", report.mean_rouge_l_f1}};
  summary["meteor"] = report.mean_meteor;
  doc["bleu_weights"] = std::move(weights);
  doc["summary"] = std::move(summary);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    for (std::size_t n = 1; n <= r.bleu.size(); ++n) row["bleu" + std::to_string(n)] = r.bleu[n - 1];
    row["rouge1"] = r.rouge1;
    row["rouge2"] = r.rouge2;
    row["rouge_l"] = rouge_l_json(r.rouge_l);
    row["meteor"] = meteor_json(r.meteor);
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc.dump(2);
}

std::vector<PairText> parse_pairs(std::string_view text) {
  std::vector<PairText> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line(text.substr(start, end - start));
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("pairs: ") + e.what(), line_no);
    }
    const std::string where = "pairs line " + std::to_string(line_no);
    if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
    for (const char* key : {"candidate", "reference"}) {
      if (!j.contains(key) || !j.at(key).is_string()) {
        throw SchemaError(where + ": missing string field '" + key + "'");
      }
    }
    PairText p;
    if (j.contains("id")) p.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    p.candidate = j.at("candidate").get<std::string>();
    p.reference = j.at("reference").get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairText> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pairs file " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pairs(ss.str());
}

}  // namespace fpdesc::metrics
