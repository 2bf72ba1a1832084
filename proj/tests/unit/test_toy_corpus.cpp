#include <gtest/gtest.h>

#include "opsum/error.hpp"
#include "opsum/toy_corpus.hpp"

using namespace opsum;

namespace {

std::size_t count_markers(const Tokens& words, const std::vector<MarkerSet>& sets) {
  std::size_t n = 0;
  for (const auto& w : words)
    for (const auto& s : sets)
      for (const auto& m : s.markers)
        if (w == m) ++n;
  return n;
}

}  // namespace

TEST(ToyCorpus, EveryReviewHasOneAspectAndOneSentiment) {
  const auto spec = ToyCorpusSpec::standard(20, 6, 3);
  const ToyCorpus toy = generate_toy_corpus(spec);
  const std::vector<MarkerSet> sentiments(spec.sentiments.begin(), spec.sentiments.end());
  ASSERT_EQ(toy.corpus.clusters.size(), 20u);
  for (std::size_t c = 0; c < 20; ++c) {
    const auto& cluster = toy.corpus.clusters[c];
    ASSERT_EQ(cluster.reviews.size(), 6u);
    for (std::size_t r = 0; r < 6; ++r) {
      const Tokens& w = cluster.reviews[r].words;
      EXPECT_EQ(count_markers(w, spec.aspects), 1u);
      EXPECT_EQ(count_markers(w, sentiments), 1u);
      EXPECT_EQ(find_marker_set(w, spec.aspects), toy.review_aspects[c][r]);
    }
  }
}

TEST(ToyCorpus, MajorityMatchesAHandCount) {
  const auto spec = ToyCorpusSpec::standard(25, 6, 11);
  const ToyCorpus toy = generate_toy_corpus(spec);
  const std::vector<MarkerSet> sentiments(spec.sentiments.begin(), spec.sentiments.end());
  for (std::size_t c = 0; c < toy.corpus.clusters.size(); ++c) {
    const auto& cluster = toy.corpus.clusters[c];
    std::vector<std::size_t> aspect(spec.aspects.size()), sentiment(2);
    for (const auto& r : cluster.reviews) {
      ++aspect[*find_marker_set(r.words, spec.aspects)];
      ++sentiment[*find_marker_set(r.words, sentiments)];
    }
    EXPECT_GT(2 * aspect[toy.majority_aspect[c]], 6u);
    EXPECT_LT(aspect[toy.majority_aspect[c]], 6u) << "expected at least one minority review";
    EXPECT_GT(2 * sentiment[toy.majority_sentiment[c]], 6u);
    ASSERT_TRUE(cluster.summary.has_value());
    EXPECT_TRUE(mentions(cluster.summary->words, spec.aspects[toy.majority_aspect[c]]));
    EXPECT_TRUE(mentions(cluster.summary->words, spec.sentiments[toy.majority_sentiment[c]]));
  }
}

TEST(ToyCorpus, SeedDeterminism) {
  const auto a = generate_toy_corpus(ToyCorpusSpec::standard(5, 6, 7));
  const auto b = generate_toy_corpus(ToyCorpusSpec::standard(5, 6, 7));
  const auto c = generate_toy_corpus(ToyCorpusSpec::standard(5, 6, 8));
  bool differs = false;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.corpus.clusters[i].title, b.corpus.clusters[i].title);
    for (std::size_t r = 0; r < 6; ++r) {
      EXPECT_EQ(a.corpus.clusters[i].reviews[r].raw_text, b.corpus.clusters[i].reviews[r].raw_text);
      differs |= a.corpus.clusters[i].reviews[r].raw_text != c.corpus.clusters[i].reviews[r].raw_text;
    }
  }
  EXPECT_TRUE(differs);
}

TEST(ToyCorpus, OverlappingMarkersAreRejected) {
  auto spec = ToyCorpusSpec::standard(3, 6, 1);
  spec.aspects[1].markers.push_back(spec.aspects[0].markers[0]);
  try {
    generate_toy_corpus(spec);
    FAIL() << "expected an argument error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kArgument);
  }
  auto single = ToyCorpusSpec::standard(3, 6, 1);
  single.aspects.resize(1);
  EXPECT_THROW(generate_toy_corpus(single), Error);
}

TEST(ToyCorpus, BackgroundStaysOnOneAspect) {
  const auto spec = ToyCorpusSpec::standard(3, 6, 1);
  Corpus bg = generate_background(spec, 1, 10, 4);
  ASSERT_EQ(bg.clusters.size(), 1u);
  EXPECT_FALSE(bg.clusters[0].summary.has_value());
  EXPECT_EQ(bg.clusters[0].reviews.size(), 10u);
  for (const auto& r : bg.clusters[0].reviews) EXPECT_EQ(find_marker_set(r.words, spec.aspects), 1u);
  EXPECT_THROW(generate_background(spec, 5, 10, 4), Error);
}
