#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "opsum/error.hpp"
#include "opsum/rouge.hpp"
#include "opsum/oracle.hpp"

using namespace opsum;
namespace r = opsum::rouge;

namespace {

Tokens words(const std::string& s) { return tokenize(s); }

void expect_same(const r::Score& a, const r::Score& b) {
  EXPECT_DOUBLE_EQ(a.precision, b.precision);
  EXPECT_DOUBLE_EQ(a.recall, b.recall);
  EXPECT_DOUBLE_EQ(a.f1, b.f1);
}

}  // namespace

TEST(Rouge, HandExamples) {
  auto r1 = r::rouge_n(words("the cat sat"), words("the cat slept on the mat"), 1);
  EXPECT_DOUBLE_EQ(r1.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r1.recall, 2.0 / 6.0);
  EXPECT_NEAR(r1.f1, 4.0 / 9.0, 1e-15);
  auto l = r::rouge_l(words("the cat"), words("the cat sat"));
  EXPECT_DOUBLE_EQ(l.precision, 1.0);
  EXPECT_NEAR(l.f1, 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(r::rouge_l(words("a b c"), words("c b a")).recall, 1.0 / 3.0);
}

TEST(Rouge, IdenticalDisjointAndEmpty) {
  const Tokens a = words("a good film with great acting");
  for (std::size_t n : {1, 2}) EXPECT_DOUBLE_EQ(r::rouge_n(a, a, n).f1, 1.0);
  EXPECT_DOUBLE_EQ(r::rouge_l(a, a).f1, 1.0);
  EXPECT_DOUBLE_EQ(r::rouge_su4(a, a).recall, 1.0);
  const Tokens b = words("dull plot");
  EXPECT_DOUBLE_EQ(r::rouge_n(a, b, 1).f1, 0.0);
  EXPECT_DOUBLE_EQ(r::rouge_su4(a, b).recall, 0.0);
  expect_same(r::rouge_l(a, Tokens{}), r::Score{});
  expect_same(r::rouge_n(Tokens{}, a, 1), r::Score{});
  EXPECT_THROW(r::rouge_n(a, a, 0), Error);
}

TEST(Rouge, SkipBigramWindow) {
  // "a" and "g" are five words apart: outside the window.
  const Tokens ref = words("a b c d e f g");
  EXPECT_DOUBLE_EQ(r::rouge_su4(words("a g"), ref).precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r::rouge_su4(words("a f"), ref).precision, 1.0);
}

TEST(Rouge, ExhaustiveOracleOnShortSequences) {
  const auto seqs = opsum::oracle::all_sequences(3, 4);
  for (std::size_t i = 0; i < seqs.size(); i += 3) {
    for (std::size_t j = 0; j < seqs.size(); j += 5) {
      const auto& a = seqs[i];
      const auto& b = seqs[j];
      for (std::size_t n : {1, 2}) expect_same(r::rouge_n(a, b, n), opsum::oracle::rouge_n(a, b, n));
      expect_same(r::rouge_l(a, b), opsum::oracle::rouge_l(a, b));
      expect_same(r::rouge_su4(a, b), opsum::oracle::rouge_su4(a, b));
    }
  }
}

TEST(Rouge, SymmetryAndMonotonicity) {
  const auto seqs = opsum::oracle::all_sequences(3, 4);
  for (std::size_t i = 1; i < seqs.size(); i += 7) {
    for (std::size_t j = 1; j < seqs.size(); j += 11) {
      const auto& a = seqs[i];
      const auto& b = seqs[j];
      EXPECT_DOUBLE_EQ(r::rouge_n(a, b, 1).f1, r::rouge_n(b, a, 1).f1);
      EXPECT_DOUBLE_EQ(r::rouge_n(a, b, 2).f1, r::rouge_n(b, a, 2).f1);
      EXPECT_DOUBLE_EQ(r::rouge_l(a, b).f1, r::rouge_l(b, a).f1);
      for (auto t : b) {
        auto longer = a;
        longer.push_back(t);
        EXPECT_GE(r::rouge_n(longer, b, 1).recall, r::rouge_n(a, b, 1).recall);
        EXPECT_GE(r::rouge_l(longer, b).recall, r::rouge_l(a, b).recall);
        EXPECT_GE(r::rouge_su4(longer, b).recall, r::rouge_su4(a, b).recall);
      }
    }
  }
}

TEST(Rouge, LcsLength) {
  const std::vector<std::uint32_t> a{1, 2, 3, 4, 1}, b{3, 4, 1, 2, 1};
  EXPECT_EQ(r::lcs_length(a, b), 3u);
  EXPECT_EQ(r::lcs_length(a, {}), 0u);
}

namespace {

Corpus three_instances() {
  Vocabulary v;
  return fixtures::corpus_of({{"x"}, {"y"}, {"z"}, {"no summary here"}}, v,
                             {"the cat sat", "a b c", "good film"});
}

}  // namespace

TEST(EvaluateCorpus, PerfectPredictions) {
  Corpus c = three_instances();
  c.clusters.pop_back();
  std::vector<Tokens> preds;
  for (const auto& k : c.clusters) preds.push_back(k.summary->words);
  auto report = r::evaluate_corpus(preds, c);
  EXPECT_DOUBLE_EQ(report.mean.rouge1_f1, 1.0);
  EXPECT_DOUBLE_EQ(report.mean.rouge2_f1, 1.0);
  EXPECT_DOUBLE_EQ(report.mean.rougeL_f1, 1.0);
  EXPECT_DOUBLE_EQ(report.mean.rouge_su4_recall, 1.0);
}

TEST(EvaluateCorpus, OnePerfectOneDisjoint) {
  Corpus c = three_instances();
  c.clusters.resize(2);
  auto report = r::evaluate_corpus({words("the cat sat"), words("q r s")}, c);
  EXPECT_DOUBLE_EQ(report.mean.rouge1_f1, 0.5);
  EXPECT_DOUBLE_EQ(report.mean.rougeL_f1, 0.5);
  EXPECT_DOUBLE_EQ(report.mean.rouge_su4_recall, 0.5);
}

TEST(EvaluateCorpus, ThreeInstanceMeansAndReports) {
  Corpus c = three_instances();
  const std::vector<Tokens> preds{words("the cat"), words("c b a"), words("good film")};
  auto report = r::evaluate_corpus(preds, c);
  ASSERT_EQ(report.instances.size(), 3u);
  EXPECT_NEAR(report.mean.rougeL_f1, (0.8 + 1.0 / 3.0 + 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(report.mean.rouge1_f1, (0.8 + 1.0 + 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(report.mean.rouge2_f1, (2.0 / 3.0 + 0.0 + 1.0) / 3.0, 1e-12);
  EXPECT_EQ(report.instances[1].cluster_id, "c1");

  std::ostringstream text, jsonl;
  r::write_report_text(text, report);
  r::write_report_jsonl(jsonl, report);
  EXPECT_NE(text.str().find("rougeL_f1"), std::string::npos);
  std::size_t lines = 0;
  for (char ch : jsonl.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 4u);
  EXPECT_NE(jsonl.str().find("\"mean\""), std::string::npos);
  EXPECT_THROW(r::evaluate_corpus({preds[0]}, c), Error);
}

TEST(EvaluateCorpus, TitlesAreUnmaskedBeforeScoring) {
  Corpus c;
  ReviewCluster k;
  k.id = "m";
  k.title = "Big Fish";
  k.reviews.push_back(make_review("fine", k.title_tokens(), 60));
  k.summary = make_review("Big Fish is fun", k.title_tokens(), 40);
  c.clusters.push_back(k);
  // "<title> is fun" and "big fish is fun" are the same summary once unmasked.
  auto report = r::evaluate_corpus({Tokens{"<title>", "is", "fun"}}, c);
  EXPECT_DOUBLE_EQ(report.mean.rouge1_f1, 1.0);
  auto raw = r::evaluate_corpus({words("big fish is fun")}, c);
  EXPECT_DOUBLE_EQ(raw.mean.rouge2_f1, 1.0);
}
