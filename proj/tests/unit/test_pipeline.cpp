#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "opsum/error.hpp"
#include "opsum/pipeline.hpp"

using namespace opsum;

TEST(Pipeline, PrepareClampsKAndConcatenatesExtracts) {
  auto s = fixtures::toy_setup(2, 4, 1, true);
  const auto& cluster = s.toy.corpus.clusters[0];
  PreparedCluster p = prepare_cluster(s.model, cluster, 10);
  EXPECT_EQ(p.extract_indices.size(), 4u);
  std::size_t tokens = 0;
  for (const auto& r : cluster.reviews) tokens += r.ids.size();
  EXPECT_EQ(p.extract_tokens.size(), tokens);
  ASSERT_TRUE(p.summary_encoding.has_value());
  EXPECT_EQ(p.summary_encoding->size(), 8u);
  EXPECT_EQ(p.output_size, cluster.output_size(s.model.vocab));
  EXPECT_THROW(prepare_cluster(s.model, cluster, 0), Error);
}

TEST(Pipeline, SummaryNeverEmitsReservedControlTokens) {
  auto s = fixtures::toy_setup(3, 6, 2, true);
  auto prepared = prepare_corpus(s.model, s.toy.corpus);
  for (const auto& p : prepared) {
    Summary out = summarize(s.model, p, {.beam = 3, .max_length = 8});
    EXPECT_LE(out.ids.size(), 8u);
    for (TokenId id : out.ids) {
      EXPECT_NE(id, kPadId);
      EXPECT_NE(id, kBosId);
      EXPECT_NE(id, kEosId);
    }
    EXPECT_EQ(out.pooling_weights.size(), p.cluster->reviews.size());
    EXPECT_EQ(out.tokens.size(), out.ids.size());
  }
}

TEST(Pipeline, ParallelSummariesMatchSerial) {
  auto s = fixtures::toy_setup(5, 6, 3, false);
  auto prepared = prepare_corpus(s.model, s.toy.corpus);
  SummarizeOptions options{.beam = 2, .max_length = 6};
  auto serial = summarize_all(s.model, prepared, options, 1);
  auto parallel = summarize_all(s.model, prepared, options, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].ids, parallel[i].ids);
    EXPECT_EQ(serial[i].log_prob, parallel[i].log_prob);
  }
}

TEST(Pipeline, CheckpointRoundTripPreservesSummaries) {
  auto s = fixtures::toy_setup(2, 6, 4, true);
  for (auto* set : {&s.model.condense, &s.model.abstract})
    for (auto& [name, t] : *set) t.round_to_precision();
  const auto path = std::filesystem::temp_directory_path() / "opsum_test_model.ckpt";
  save_checkpoint(path.string(), to_checkpoint(s.model));
  Model back = from_checkpoint(load_checkpoint(path.string()), s.model.vocab);
  std::filesystem::remove(path);
  EXPECT_EQ(back.condense, s.model.condense);
  EXPECT_EQ(back.abstract, s.model.abstract);
  EXPECT_TRUE(back.uses_extracts());
  const auto& cluster = s.toy.corpus.clusters[1];
  EXPECT_EQ(summarize(back, prepare_cluster(back, cluster)).ids,
            summarize(s.model, prepare_cluster(s.model, cluster)).ids);

  Vocabulary smaller;
  EXPECT_THROW(from_checkpoint(to_checkpoint(s.model), smaller), Error);
}

TEST(Pipeline, AbstractTrainingReducesLossAndIsDeterministic) {
  auto s = fixtures::toy_setup(4, 6, 5, true);
  auto prepared = prepare_corpus(s.model, s.toy.corpus);
  AbstractTrainOptions options;
  options.epochs = 4;
  options.batch_size = 2;
  options.seed = 3;
  options.embedding_dim = 5;
  options.attention_dim = 6;
  options.adam.learning_rate = 0.01;
  AbstractTrainReport report;
  const ParameterSet a = train_abstract(s.model, prepared, nullptr, options, &report);
  const ParameterSet b = train_abstract(s.model, prepared, nullptr, options);
  EXPECT_EQ(a, b);
  ASSERT_EQ(report.epochs.size(), 4u);
  EXPECT_LT(report.epochs.back().generation_loss, report.epochs.front().generation_loss);
  EXPECT_GT(report.epochs.front().fusion_loss, 0.0);

  std::vector<PreparedCluster> one(prepared.begin(), prepared.begin() + 1);
  EXPECT_THROW(train_abstract(s.model, one, nullptr, options), Error);
}

TEST(Pipeline, EarlyStoppingTracksDevRouge) {
  auto s = fixtures::toy_setup(4, 6, 6, false);
  auto prepared = prepare_corpus(s.model, s.toy.corpus);
  std::vector<PreparedCluster> train(prepared.begin(), prepared.begin() + 3);
  std::vector<PreparedCluster> dev(prepared.begin() + 3, prepared.end());
  AbstractTrainOptions options;
  options.epochs = 3;
  options.patience = 1;
  options.use_extracts = false;
  options.embedding_dim = 5;
  options.attention_dim = 6;
  options.dev_beam = 2;
  options.max_length = 8;
  AbstractTrainReport report;
  train_abstract(s.model, train, &dev, options, &report);
  ASSERT_FALSE(report.epochs.empty());
  EXPECT_LE(report.epochs.size(), 3u);
  for (const auto& e : report.epochs) {
    EXPECT_GE(e.dev_rouge_l, 0.0);
    EXPECT_LE(e.dev_rouge_l, 1.0);
  }
  EXPECT_GE(report.best_epoch, 1u);
}
