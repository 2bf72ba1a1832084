#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opsum/autodiff.hpp"
#include "opsum/corpus.hpp"
#include "opsum/optim.hpp"

namespace opsum::condense {

/// Review autoencoder: a BiLSTM encoder whose concatenated final states form
/// the review encoding d, and an LSTM decoder that reconstructs the review
/// from z_0 = d. Parameter names carry the "condense." prefix.
struct Config {
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 128;
  /// Per direction; encodings are twice this wide.
  std::size_t hidden = 128;
  double dropout = kDropoutRate;

  std::size_t encoding_dim() const { return 2 * hidden; }
};

ParameterSet init_params(const Config& config, Rng& rng);
/// Recovers dimensions from a parameter set.
Config config_of(const ParameterSet& params);

struct Encoding {
  Var d;
  std::vector<Var> words;
};

/// Embeds and encodes token ids; dropout hits the embeddings in train mode.
Encoding encode(Tape& tape, const ParameterSet& params, std::span<const TokenId> ids, Mode mode,
                Rng& rng, double dropout = kDropoutRate);

/// Teacher-forced reconstruction: one softmax distribution over the
/// vocabulary per target position.
std::vector<Var> reconstruction(Tape& tape, const ParameterSet& params, Var d,
                                std::span<const TokenId> target, Mode mode, Rng& rng,
                                double dropout = kDropoutRate);

/// Sum of negative log-probabilities of the target tokens.
Var reconstruction_loss(std::span<const Var> distributions, std::span<const TokenId> target);

/// encode + reconstruction + reconstruction_loss for one review.
Var review_loss(Tape& tape, const ParameterSet& params, std::span<const TokenId> ids, Mode mode,
                Rng& rng, double dropout = kDropoutRate);

/// Plain-value encodings of one review (eval mode).
struct ReviewEncoding {
  Tensor d;
  std::vector<Tensor> words;
};

ReviewEncoding encode_review(const ParameterSet& params, std::span<const TokenId> ids);

struct EpochReport {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per instance, train mode
  double eval_loss = 0.0;   // mean per instance on training data, eval mode
  double dev_loss = 0.0;    // mean per instance on dev data, 0 without dev
};

struct TrainOptions {
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  bool include_summaries = true;
  AdamConfig adam;
  std::function<void(const EpochReport&)> on_epoch;
};

struct TrainReport {
  /// Eval-mode mean loss on the training instances before any update.
  double initial_loss = 0.0;
  std::vector<EpochReport> epochs;
  std::size_t best_epoch = 0;
};

/// Reviews (and summaries, when enabled) are independent instances. With a
/// dev corpus, training stops after `patience` epochs without dev
/// improvement and the best parameters are returned.
ParameterSet train(const Corpus& train, const Corpus* dev, const Config& config,
                   const TrainOptions& options, TrainReport* report = nullptr);

/// Loads "word v1 ... vD" lines into rows of the embedding matrix for words
/// in `vocab`; returns the number of rows replaced.
std::size_t load_embeddings(ParameterSet& params, const std::string& parameter,
                            const Vocabulary& vocab, const std::string& path);

}  // namespace opsum::condense
