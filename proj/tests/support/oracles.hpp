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

// Reference implementations used only by the tests. They favour obviously-correct
// enumeration over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Words = std::vector<std::string>;

inline std::size_t count_window(const Words& seq, const Words& gram) {
  if (gram.empty() || seq.size() < gram.size()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + gram.size() <= seq.size(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < gram.size() && same; ++k) same = seq[i + k] == gram[k];
    count += same ? 1 : 0;
  }
  return count;
}

inline std::vector<Words> windows(const Words& seq, std::size_t n) {
  std::vector<Words> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) out.emplace_back(seq.begin() + i, seq.begin() + i + n);
  return out;
}

/// Distinct n-grams in first-occurrence order.
inline std::vector<Words> distinct_windows(const Words& seq, std::size_t n) {
  std::vector<Words> out;
  for (auto& w : windows(seq, n)) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
  }
  return out;
}

struct Clipped {
  std::size_t matched = 0;
  std::size_t total = 0;
};

/// Candidate n-grams clipped by the maximum count in any reference.
inline Clipped bleu_clipped(const Words& cand, const std::vector<Words>& refs, std::size_t n) {
  Clipped c;
  c.total = cand.size() >= n ? cand.size() - n + 1 : 0;
  for (const auto& g : distinct_windows(cand, n)) {
    std::size_t best = 0;
    for (const auto& r : refs) best = std::max(best, count_window(r, g));
    c.matched += std::min(count_window(cand, g), best);
  }
  return c;
}

inline std::size_t closest_ref_len(std::size_t c, const std::vector<Words>& refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [c](std::size_t len) { return len > c ? len - c : c - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  return best;
}

inline long double brevity_penalty(std::size_t c, std::size_t r) {
  if (c == 0) return 0;
  if (c > r) return 1;
  return std::exp(1.0L - static_cast<long double>(r) / static_cast<long double>(c));
}

inline long double bleu(const Words& cand, const std::vector<Words>& refs, std::size_t N) {
  if (cand.empty()) return 0;
  long double log_sum = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    const Clipped c = bleu_clipped(cand, refs, n);
    if (c.matched == 0) return 0;
    log_sum += std::log(static_cast<long double>(c.matched) / c.total) / static_cast<long double>(N);
  }
  return brevity_penalty(cand.size(), closest_ref_len(cand.size(), refs)) * std::exp(log_sum);
}

/// Sum over references of co-occurrences clipped by the candidate, over reference totals.
inline std::pair<std::size_t, std::size_t> rouge_n_counts(const Words& cand, const std::vector<Words>& refs,
                                                          std::size_t n) {
  std::size_t matched = 0, total = 0;
  for (const auto& r : refs) {
    total += r.size() >= n ? r.size() - n + 1 : 0;
    for (const auto& g : distinct_windows(r, n)) matched += std::min(count_window(r, g), count_window(cand, g));
  }
  return {matched, total};
}

inline bool is_subsequence(const Words& small, const Words& big) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < big.size() && j < small.size(); ++i) {
    if (big[i] == small[j]) ++j;
  }
  return j == small.size();
}

/// Longest common subsequence by enumerating every subset of a (|a| <= 20).
inline std::size_t lcs_by_subsets(const Words& a, const Words& b) {
  std::size_t best = 0;
  const std::uint32_t n = static_cast<std::uint32_t>(a.size());
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const std::size_t bits = static_cast<std::size_t>(__builtin_popcount(mask));
    if (bits <= best) continue;
    Words sub;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (is_subsequence(sub, b)) best = bits;
  }
  return best;
}

/// Classic table recursion, filled bottom-up from the ends.
inline std::size_t lcs_table(const Words& a, const Words& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  return t[0][0];
}

struct MeteorAlignment {
  std::size_t matched = 0;
  std::size_t chunks = 0;
};

/// Every one-to-one exact-match alignment is enumerated; keeps the most matches, then the
/// fewest chunks. Chunks are counted on the alignment sorted by candidate position.
inline MeteorAlignment meteor_alignment(const Words& cand, const Words& ref) {
  MeteorAlignment best;
  bool found = false;
  std::vector<int> used(ref.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  auto chunks_of = [](const std::vector<std::pair<std::size_t, std::size_t>>& p) {
    std::size_t chunks = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const bool continues = k > 0 && p[k].first == p[k - 1].first + 1 && p[k].second == p[k - 1].second + 1;
      if (!continues) ++chunks;
    }
    return chunks;
  };
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == cand.size()) {
      const std::size_t m = pairs.size();
      const std::size_t ch = chunks_of(pairs);
      if (!found || m > best.matched || (m == best.matched && ch < best.chunks)) best = {m, ch};
      found = true;
      return;
    }
    self(self, i + 1);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j] || ref[j] != cand[i]) continue;
      used[j] = 1;
      pairs.emplace_back(i, j);
      self(self, i + 1);
      pairs.pop_back();
      used[j] = 0;
    }
  };
  rec(rec, 0);
  return best;
}

inline long double meteor_score(const Words& cand, const Words& ref) {
  const MeteorAlignment a = meteor_alignment(cand, ref);
  if (a.matched == 0) return 0;
  const long double P = static_cast<long double>(a.matched) / cand.size();
  const long double R = static_cast<long double>(a.matched) / ref.size();
  const long double pn = 0.5L * static_cast<long double>(a.chunks) / a.matched;
  return 10 * P * R / (R + 9 * P) * (1 - pn);
}

/// Exact fraction with 64-bit parts, always reduced.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator==(Fraction a, Fraction b) { return a.num == b.num && a.den == b.den; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// AP over ranked TP flags as the area under the stepwise PR curve: every cutoff k is
/// recounted from scratch and contributes precision(k) times the recall gained at k.
inline Fraction average_precision(const std::vector<bool>& flags, std::size_t num_gt) {
  Fraction ap;
  std::int64_t prev_tp = 0;
  for (std::size_t k = 1; k <= flags.size(); ++k) {
    std::int64_t tp = 0;
    for (std::size_t i = 0; i < k; ++i) tp += flags[i] ? 1 : 0;
    const Fraction precision(tp, static_cast<std::int64_t>(k));
    const Fraction recall_gain(tp - prev_tp, static_cast<std::int64_t>(num_gt));
    ap = ap + precision * recall_gain;
    prev_tp = tp;
  }
  return ap;
}

/// Softmax by direct exponentiation in long double (x87 extended range covers |logit| well
/// beyond 1000, so no shift is applied).
inline std::vector<long double> softmax(const std::vector<double>& logits) {
  std::vector<long double> out;
  long double z = 0;
  for (double v : logits) out.push_back(std::exp(static_cast<long double>(v)));
  for (auto v : out) z += v;
  for (auto& v : out) v /= z;
  return out;
}

}  // namespace oracle
