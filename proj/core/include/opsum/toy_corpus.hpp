#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opsum/corpus.hpp"

namespace opsum {

struct MarkerSet {
  std::string name;
  std::vector<std::string> markers;
};

/// Synthetic aspect/sentiment corpus. Every review is a templated sentence
/// with exactly one aspect marker and one sentiment marker; each cluster has
/// a strict majority aspect and sentiment, and its reference summary names
/// both.
struct ToyCorpusSpec {
  std::size_t clusters = 10;
  std::size_t reviews_per_cluster = 6;
  std::vector<MarkerSet> aspects;
  std::array<MarkerSet, 2> sentiments;
  std::uint64_t seed = 0;

  /// Aspects acting/plot and positive/negative sentiment.
  static ToyCorpusSpec standard(std::size_t clusters, std::size_t reviews_per_cluster,
                                std::uint64_t seed);
};

struct ToyCorpus {
  Corpus corpus;
  std::vector<std::size_t> majority_aspect;
  std::vector<std::size_t> majority_sentiment;
  /// Aspect index of every review, per cluster.
  std::vector<std::vector<std::size_t>> review_aspects;
};

/// Seed-deterministic. Rejects fewer than two aspects or overlapping marker
/// vocabularies.
ToyCorpus generate_toy_corpus(const ToyCorpusSpec& spec);

/// Reviews that all discuss one aspect (sentiment drawn uniformly), packed as
/// a single summary-less cluster.
Corpus generate_background(const ToyCorpusSpec& spec, std::size_t aspect,
                           std::size_t count, std::uint64_t seed);

/// Index of the marker set containing a token from `words`, if exactly one
/// set matches.
std::optional<std::size_t> find_marker_set(const Tokens& words,
                                           const std::vector<MarkerSet>& sets);

/// True when any token of `words` is a marker of `set`.
bool mentions(const Tokens& words, const MarkerSet& set);

}  // namespace opsum
