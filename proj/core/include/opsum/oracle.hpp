#pragma once

// Brute-force reference implementations for the self-checks and tests. They
// favour obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "opsum/beam.hpp"
#include "opsum/rouge.hpp"

namespace opsum::oracle {

using Seq = std::vector<std::uint32_t>;

inline opsum::rouge::Score score_from_counts(double overlap, double cand_units, double ref_units) {
  opsum::rouge::Score s;
  if (ref_units == 0.0) return s;
  s.precision = cand_units == 0.0 ? 0.0 : overlap / cand_units;
  s.recall = overlap / ref_units;
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// Matches each candidate unit against a still-unused equal reference unit.
inline std::size_t matched_units(const std::vector<Seq>& cand, std::vector<Seq> ref) {
  std::size_t matched = 0;
  for (const auto& u : cand) {
    auto it = std::find(ref.begin(), ref.end(), u);
    if (it != ref.end()) {
      ++matched;
      ref.erase(it);
    }
  }
  return matched;
}

inline std::vector<Seq> all_ngrams(const Seq& s, std::size_t n) {
  std::vector<Seq> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out.emplace_back(s.begin() + i, s.begin() + i + n);
  return out;
}

inline opsum::rouge::Score rouge_n(const Seq& cand, const Seq& ref, std::size_t n) {
  const auto c = all_ngrams(cand, n);
  const auto r = all_ngrams(ref, n);
  return score_from_counts(static_cast<double>(matched_units(c, r)), static_cast<double>(c.size()),
                           static_cast<double>(r.size()));
}

inline bool is_subsequence(const Seq& sub, const Seq& of) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < of.size() && j < sub.size(); ++i)
    if (of[i] == sub[j]) ++j;
  return j == sub.size();
}

// Longest subsequence of `a` (over all 2^|a| position subsets) that is also a
// subsequence of `b`.
inline std::size_t lcs(const Seq& a, const Seq& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    Seq sub;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

inline opsum::rouge::Score rouge_l(const Seq& cand, const Seq& ref) {
  return score_from_counts(static_cast<double>(lcs(cand, ref)), static_cast<double>(cand.size()),
                           static_cast<double>(ref.size()));
}

// Unigrams plus ordered pairs with at most four words in between.
inline std::vector<Seq> su4_units(const Seq& s) {
  std::vector<Seq> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back({s[i]});
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (j - i - 1 > 4) break;
      out.push_back({s[i], s[j]});
    }
  }
  return out;
}

inline opsum::rouge::Score rouge_su4(const Seq& cand, const Seq& ref) {
  const auto c = su4_units(cand);
  const auto r = su4_units(ref);
  return score_from_counts(static_cast<double>(matched_units(c, r)), static_cast<double>(c.size()),
                           static_cast<double>(r.size()));
}

// Every sequence over {0..alphabet-1} with length <= max_length, shortest first.
inline std::vector<Seq> all_sequences(std::uint32_t alphabet, std::size_t max_length) {
  std::vector<Seq> out{Seq{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_length; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::uint32_t t = 0; t < alphabet; ++t) {
        Seq s = out[i];
        s.push_back(t);
        out.push_back(std::move(s));
      }
    }
    begin = end;
  }
  return out;
}

// A random autoregressive model over a tiny vocabulary: the next-token
// distribution is a fixed random function of the whole prefix. Id 0 doubles
// as the start token; `end` finishes a sequence.
class ToyBeamModel {
 public:
  ToyBeamModel(std::size_t vocab, std::size_t end, std::uint64_t seed)
      : vocab_(vocab), end_(end), seed_(seed) {
    prefixes_.push_back({});
  }

  std::vector<double> log_probs(const std::vector<opsum::TokenId>& prefix) const {
    std::uint64_t h = seed_ * 0x9E3779B97F4A7C15ull + 1;
    for (auto t : prefix) h = (h ^ (t + 1)) * 0x100000001B3ull;
    std::mt19937_64 rng(h);
    std::vector<double> logits(vocab_);
    for (auto& l : logits) l = 3.0 * (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 1.5;
    double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - m);
    for (auto& l : logits) l = l - m - std::log(z);
    return logits;
  }

  opsum::BeamModel beam_model() {
    opsum::BeamModel m;
    m.initial_state = 0;
    m.start_token = 0;
    m.end_token = end_;
    // Handle h stands for the tokens consumed so far (the start token is
    // never stored); a step appends the token just fed in.
    m.step = [this](std::size_t state, opsum::TokenId prev) {
      auto full = prefixes_[state];
      if (state != 0) full.push_back(prev);
      prefixes_.push_back(full);
      return std::make_pair(log_probs(full), prefixes_.size() - 1);
    };
    return m;
  }

  // Exhaustive search over every finished sequence: any prefix of tokens
  // other than `end` followed by `end`, or any sequence of exactly
  // max_length tokens. Returns the best by log-prob / length, the earliest
  // in enumeration order on exact ties.
  std::pair<std::vector<opsum::TokenId>, double> exhaustive_best(std::size_t max_length) const {
    std::vector<opsum::TokenId> best;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::vector<opsum::TokenId>, double>> frontier{{{}, 0.0}};
    for (std::size_t len = 1; len <= max_length; ++len) {
      std::vector<std::pair<std::vector<opsum::TokenId>, double>> next;
      for (const auto& [prefix, lp] : frontier) {
        const auto probs = log_probs(prefix);
        for (opsum::TokenId t = 0; t < vocab_; ++t) {
          auto seq = prefix;
          seq.push_back(t);
          const double total = lp + probs[t];
          if (t == end_ || len == max_length) {
            const double score = total / static_cast<double>(seq.size());
            if (score > best_score) {
              best_score = score;
              best = seq;
            }
          } else {
            next.emplace_back(std::move(seq), total);
          }
        }
      }
      frontier = std::move(next);
    }
    return {best, best_score};
  }

 private:
  std::size_t vocab_;
  std::size_t end_;
  std::uint64_t seed_;
  std::vector<std::vector<opsum::TokenId>> prefixes_;
};

// Full sort of (distance, index) pairs to the centroid; returns the first k.
inline std::vector<std::size_t> nearest_by_full_sort(const std::vector<std::vector<double>>& points,
                                                     std::size_t k) {
  const std::size_t n = points.size(), d = points[0].size();
  std::vector<double> centroid(d, 0.0);
  for (const auto& p : points)
    for (std::size_t j = 0; j < d; ++j) centroid[j] += p[j];
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : centroid) c *= inv;
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (points[i][j] - centroid[j]) * (points[i][j] - centroid[j]);
    keyed.emplace_back(std::sqrt(s), i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(keyed[i].second);
  return out;
}


// Every sequence of length <= max_length over a small alphabet, with
// per-sequence unit multisets and subsequence sets precomputed so that all
// pairs can be scored by counting. Sequences are indexed in all_sequences
// order.
class SequenceTable {
 public:
  SequenceTable(std::uint32_t alphabet, std::size_t max_length)
      : alphabet_(alphabet), sequences_(all_sequences(alphabet, max_length)) {
    std::size_t offset = 0, width = 1;
    for (std::size_t len = 0; len <= max_length; ++len) {
      offsets_.push_back(offset);
      offset += width;
      width *= alphabet;
    }
    const std::size_t n = sequences_.size();
    const std::size_t words = (n + 63) / 64;
    unigrams_.resize(n);
    bigrams_.resize(n);
    su4_.resize(n);
    subsequences_.resize(n);
    contains_.assign(n, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < n; ++i) {
      const Seq& s = sequences_[i];
      for (const auto& u : all_ngrams(s, 1)) unigrams_[i].push_back(code(u));
      for (const auto& u : all_ngrams(s, 2)) bigrams_[i].push_back(code(u));
      for (const auto& u : su4_units(s)) su4_[i].push_back(code(u));
      for (auto* units : {&unigrams_[i], &bigrams_[i], &su4_[i]}) std::sort(units->begin(), units->end());
      for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
        Seq sub;
        for (std::size_t k = 0; k < s.size(); ++k)
          if (mask & (1u << k)) sub.push_back(s[k]);
        const std::size_t id = index_of(sub);
        contains_[i][id / 64] |= std::uint64_t{1} << (id % 64);
      }
      for (std::size_t id = n; id-- > 0;)
        if (contains_[i][id / 64] >> (id % 64) & 1) subsequences_[i].push_back(static_cast<std::uint32_t>(id));
    }
  }

  const std::vector<Seq>& sequences() const { return sequences_; }

  std::size_t index_of(const Seq& s) const {
    std::size_t value = 0;
    for (auto t : s) value = value * alphabet_ + t;
    return offsets_[s.size()] + value;
  }

  rouge::Score rouge_n(std::size_t a, std::size_t b, std::size_t n) const {
    const auto& units = n == 1 ? unigrams_ : bigrams_;
    return counted(units[a], units[b]);
  }

  rouge::Score rouge_su4(std::size_t a, std::size_t b) const { return counted(su4_[a], su4_[b]); }

  // Longest subsequence of a (subsequences are listed longest first) that is
  // also a subsequence of b.
  rouge::Score rouge_l(std::size_t a, std::size_t b) const {
    std::size_t best = 0;
    for (std::uint32_t id : subsequences_[a]) {
      if (contains_[b][id / 64] >> (id % 64) & 1) {
        best = sequences_[id].size();
        break;
      }
    }
    return score_from_counts(static_cast<double>(best), static_cast<double>(sequences_[a].size()),
                             static_cast<double>(sequences_[b].size()));
  }

 private:
  std::uint32_t code(const Seq& unit) const {
    if (unit.size() == 1) return unit[0];
    return alphabet_ + unit[0] * alphabet_ + unit[1];
  }

  static rouge::Score counted(const std::vector<std::uint32_t>& cand,
                              const std::vector<std::uint32_t>& ref) {
    std::size_t i = 0, j = 0, overlap = 0;
    while (i < cand.size() && j < ref.size()) {
      if (cand[i] == ref[j]) {
        ++overlap;
        ++i;
        ++j;
      } else if (cand[i] < ref[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    return score_from_counts(static_cast<double>(overlap), static_cast<double>(cand.size()),
                             static_cast<double>(ref.size()));
  }

  std::uint32_t alphabet_;
  std::vector<Seq> sequences_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<std::uint32_t>> unigrams_, bigrams_, su4_;
  std::vector<std::vector<std::uint32_t>> subsequences_;
  std::vector<std::vector<std::uint64_t>> contains_;
};

}  // namespace opsum::oracle
