#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opsum/beam.hpp"
#include "opsum/checkpoint.hpp"
#include "opsum/decoder.hpp"
#include "opsum/extractive.hpp"
#include "opsum/fusion.hpp"
#include "opsum/optim.hpp"

namespace opsum {

/// Vocabulary plus the frozen Condense parameters and (once trained) the
/// Abstract parameters.
struct Model {
  Vocabulary vocab;
  ParameterSet condense;
  ParameterSet abstract;

  bool has_abstract() const { return abstract.size() > 0; }
  bool uses_extracts() const;
};

/// Saves both parameter sets in one checkpoint.
Checkpoint to_checkpoint(const Model& model);
/// Splits a checkpoint by parameter prefix; the vocabulary is supplied.
Model from_checkpoint(const Checkpoint& checkpoint, Vocabulary vocab);

/// Everything about a cluster that does not depend on Abstract parameters.
struct PreparedCluster {
  const ReviewCluster* cluster = nullptr;
  fusion::ClusterEncodings encodings;
  fusion::FusedWords words;
  /// d-bar, the mean review encoding.
  Tensor mean_query;
  /// Centroid-nearest reviews (k clamped to the cluster size).
  std::vector<std::size_t> extract_indices;
  /// Base ids of the selected reviews, concatenated in selection order.
  std::vector<TokenId> extract_tokens;
  /// Condense encoding z of the reference summary, when present.
  std::optional<Tensor> summary_encoding;
  std::size_t output_size = 0;
};

PreparedCluster prepare_cluster(const Model& model, const ReviewCluster& cluster,
                                std::size_t k = extractive::kDefaultTopK);
std::vector<PreparedCluster> prepare_corpus(const Model& model, const Corpus& corpus,
                                            std::size_t k = extractive::kDefaultTopK);

struct SummarizeOptions {
  std::size_t beam = kDefaultBeam;
  std::size_t max_length = kDefaultMaxLength;
  /// Pooling query; the cluster's mean encoding when absent.
  std::optional<Tensor> query;
  /// Feed extracts to the salience encoder. Defaults to whether the model
  /// has one; false on an extract-enabled model decodes with r fixed at 0.
  std::optional<bool> use_extracts;
};

struct Summary {
  /// Output ids without the end token.
  std::vector<TokenId> ids;
  /// Surface tokens, title still masked.
  Tokens tokens;
  /// Detokenized text with the title restored.
  std::string text;
  Tensor pooling_weights;
  double log_prob = 0.0;
  double score = 0.0;
};

Summary summarize(const Model& model, const PreparedCluster& prepared,
                  const SummarizeOptions& options = {});

/// Summaries for every cluster, spread over `workers` threads.
std::vector<Summary> summarize_all(const Model& model, const std::vector<PreparedCluster>& clusters,
                                   const SummarizeOptions& options = {}, std::size_t workers = 1);

/// Beam-search adapter over the decoder for one cluster. The padding and
/// start tokens are never emitted.
class DecoderBeamModel {
 public:
  DecoderBeamModel(const Vocabulary& vocab, const ParameterSet& abstract_params,
                   const PreparedCluster& prepared, const Tensor& query, bool use_extracts);
  BeamModel beam_model();
  const Tensor& pooling_weights() const { return pooling_weights_; }

 private:
  const ParameterSet& params_;
  Tape tape_;
  abstract::Context context_;
  std::vector<abstract::DecoderState> states_;
  Tensor pooling_weights_;
  Rng rng_{0};
};

struct LossParts {
  Var total;
  Var generation;
  /// Absent when the fusion loss is disabled.
  std::optional<Var> fusion;
};

/// Teacher-forced training loss of one cluster: generation loss of the
/// reference plus, when `negatives` is non-empty, the fusion hinge loss.
LossParts abstract_loss(Tape& tape, const ParameterSet& abstract_params,
                        const PreparedCluster& prepared, const std::vector<const Tensor*>& negatives,
                        Mode mode, Rng& rng, double dropout);

struct AbstractEpochReport {
  std::size_t epoch = 0;
  double train_loss = 0.0;       // mean per cluster, train mode
  double generation_loss = 0.0;  // mean per cluster, train mode
  double fusion_loss = 0.0;      // mean per cluster, train mode
  double dev_rouge_l = 0.0;      // mean ROUGE-L F1 on dev, 0 without dev
};

struct AbstractTrainOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  bool use_extracts = true;
  bool use_fusion_loss = true;
  double dropout = kDropoutRate;
  std::size_t embedding_dim = 128;
  std::size_t attention_dim = 256;
  /// Decoding settings for dev evaluation.
  std::size_t dev_beam = kDefaultBeam;
  std::size_t max_length = kDefaultMaxLength;
  AdamConfig adam;
  std::function<void(const AbstractEpochReport&)> on_epoch;
};

struct AbstractTrainReport {
  std::vector<AbstractEpochReport> epochs;
  std::size_t best_epoch = 0;
};

/// Trains the Abstract model with Condense frozen. Every step draws
/// fusion::kNegatives negative summaries (with replacement) from other
/// training clusters. With dev clusters, early stopping tracks dev ROUGE-L
/// and the best parameters are returned.
ParameterSet train_abstract(const Model& model, const std::vector<PreparedCluster>& train,
                            const std::vector<PreparedCluster>* dev,
                            const AbstractTrainOptions& options,
                            AbstractTrainReport* report = nullptr);

/// Summarizes every prepared cluster and returns mean ROUGE-L F1 against
/// the references.
double mean_rouge_l(const Model& model, const std::vector<PreparedCluster>& clusters,
                    const SummarizeOptions& options = {});

}  // namespace opsum
