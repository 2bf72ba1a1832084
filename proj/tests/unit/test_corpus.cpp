#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "opsum/corpus.hpp"
#include "opsum/error.hpp"

using namespace opsum;

namespace {

Corpus parse(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return parse_corpus(in, options, "fixture");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    return e.what();
  }
  ADD_FAILURE() << "expected a data error";
  return {};
}

}  // namespace

TEST(Corpus, ParsesAValidLine) {
  Corpus c = parse(
      R"({"id":"m1","title":"Big Fish","reviews":["Big Fish is great.","Too long"],"summary":"A tale."})");
  ASSERT_EQ(c.clusters.size(), 1u);
  const ReviewCluster& k = c.clusters[0];
  EXPECT_EQ(k.id, "m1");
  ASSERT_EQ(k.reviews.size(), 2u);
  EXPECT_EQ(k.reviews[0].words, (Tokens{"<title>", "is", "great", "."}));
  ASSERT_TRUE(k.summary.has_value());
  EXPECT_EQ(k.summary->words, (Tokens{"a", "tale", "."}));
}

TEST(Corpus, ErrorsNameTheLine) {
  const std::string good = R"({"id":"a","reviews":["fine"]})";
  const std::string msg = error_of(good + "\n\n" + R"({"id":"b"})");
  EXPECT_NE(msg.find("fixture:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("reviews"), std::string::npos) << msg;
  EXPECT_NE(error_of(R"({"id":"z","reviews":[]})").find("zero reviews"), std::string::npos);
  EXPECT_NE(error_of("{not json").find("fixture:1"), std::string::npos);
  error_of(R"({"id":"z","reviews":["ok", 3]})");
}

TEST(Corpus, TruncatesLongReviews) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "w ";
  LoadOptions options;
  options.max_review_tokens = 60;
  Corpus c = parse(R"({"id":"a","reviews":[")" + text + R"("]})", options);
  EXPECT_EQ(c.clusters[0].reviews[0].size(), 60u);
}

TEST(Corpus, ExtendedIdsArePerCluster) {
  Corpus c = parse(R"({"id":"a","reviews":["known zyx","zyx qwe known"],"summary":"qwe known abc"})"
                   "\n"
                   R"({"id":"b","reviews":["qwe"]})");
  Vocabulary v;
  const TokenId known = v.add("known");
  c.assign_ids(v);
  const ReviewCluster& a = c.clusters[0];
  EXPECT_EQ(a.extended_vocab, (std::vector<std::string>{"zyx", "qwe"}));
  EXPECT_EQ(a.reviews[1].ids, (std::vector<TokenId>{kUnkId, kUnkId, known}));
  EXPECT_EQ(a.reviews[1].extended_ids, (std::vector<TokenId>{v.size(), v.size() + 1, known}));
  // Summary words copyable from the reviews get extended ids; others stay UNK.
  EXPECT_EQ(a.summary->extended_ids, (std::vector<TokenId>{v.size() + 1, known, kUnkId}));
  EXPECT_EQ(a.output_size(v), v.size() + 2);
  EXPECT_EQ(a.surface(v.size() + 1, v), "qwe");
  EXPECT_THROW(a.surface(v.size() + 2, v), Error);
  EXPECT_EQ(c.clusters[1].reviews[0].extended_ids, (std::vector<TokenId>{v.size()}));
}

TEST(Corpus, SaveLoadIsIdempotent) {
  Corpus c = parse(R"({"id":"a","title":"T","reviews":["T rocks","meh"],"summary":"T ok"})"
                   "\n"
                   R"({"id":"b","reviews":["fine"]})");
  const auto path = std::filesystem::temp_directory_path() / "opsum_test_corpus.jsonl";
  save_corpus(path.string(), c);
  Corpus once = load_corpus(path.string());
  save_corpus(path.string(), once);
  Corpus twice = load_corpus(path.string());
  ASSERT_EQ(once.clusters.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(once.clusters[i].id, twice.clusters[i].id);
    ASSERT_EQ(once.clusters[i].reviews.size(), c.clusters[i].reviews.size());
    for (std::size_t j = 0; j < c.clusters[i].reviews.size(); ++j) {
      EXPECT_EQ(once.clusters[i].reviews[j].words, c.clusters[i].reviews[j].words);
      EXPECT_EQ(twice.clusters[i].reviews[j].words, once.clusters[i].reviews[j].words);
    }
  }
  EXPECT_EQ(once.stats, twice.stats);
  std::filesystem::remove(path);
}

TEST(Corpus, StatsOfARottenTomatoesShapedFixture) {
  // 12 movies, 8..19 reviews each, 5..14 words per review, 20-word summaries.
  std::ostringstream out;
  std::size_t reviews = 0, review_words = 0;
  for (int m = 0; m < 12; ++m) {
    nlohmann::json rec;
    rec["id"] = "rt" + std::to_string(m);
    rec["title"] = "movie " + std::to_string(m);
    std::vector<std::string> texts;
    for (int r = 0; r < 8 + m; ++r) {
      std::string t;
      const int words = 5 + (r * 7 + m) % 10;
      for (int w = 0; w < words; ++w) t += "w" + std::to_string((w * 13 + r) % 31) + " ";
      texts.push_back(t);
      ++reviews;
      review_words += words;
    }
    rec["reviews"] = texts;
    std::string summary;
    for (int w = 0; w < 20; ++w) summary += "s" + std::to_string(w) + " ";
    rec["summary"] = summary;
    out << rec.dump() << "\n";
  }
  Corpus c = parse(out.str());
  EXPECT_EQ(c.stats.clusters, 12u);
  EXPECT_DOUBLE_EQ(c.stats.reviews_per_cluster, static_cast<double>(reviews) / 12.0);
  EXPECT_DOUBLE_EQ(c.stats.tokens_per_review, static_cast<double>(review_words) / reviews);
  EXPECT_DOUBLE_EQ(c.stats.tokens_per_summary, 20.0);
  EXPECT_EQ(c.stats, compute_stats(c));
}
