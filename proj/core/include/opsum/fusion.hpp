#pragma once

#include <span>
#include <vector>

#include "opsum/autodiff.hpp"
#include "opsum/corpus.hpp"

namespace opsum::fusion {

/// Number of negative summaries in the fusion hinge loss.
inline constexpr std::size_t kNegatives = 5;

/// Frozen Condense outputs for every review of a cluster.
struct ClusterEncodings {
  std::vector<Tensor> review_encodings;
  std::vector<std::vector<Tensor>> word_encodings;
  /// Cluster-level (base or extended) id of every encoded token.
  std::vector<std::vector<TokenId>> word_ids;

  std::size_t reviews() const { return review_encodings.size(); }
};

/// Runs the Condense encoder (eval mode) over every review of the cluster.
ClusterEncodings encode_cluster(const ParameterSet& condense_params, const ReviewCluster& cluster);

/// Mean review encoding, the general-purpose pooling query.
Tensor mean_query(const ClusterEncodings& encodings);

struct FusedWords {
  /// Distinct word ids in ascending order.
  std::vector<TokenId> unique_words;
  /// Mean encoding of each distinct word.
  std::vector<Tensor> encodings;
  /// Number of tokens averaged into each entry.
  std::vector<std::size_t> counts;
};

/// Averages all token encodings sharing a word id.
FusedWords fuse_words(const ClusterEncodings& encodings);

struct Pooled {
  Var d_prime;
  Var weights;
};

/// Attentive pooling: weights = softmax_i(d_i^T W_p query), d' = sum_i a_i d_i.
Pooled pool_reviews(std::span<const Var> review_encodings, Var query, Var W_p);

/// Value-level pooling for inspection.
struct PoolResult {
  Tensor d_prime;
  Tensor weights;
};
PoolResult pool_reviews(const std::vector<Tensor>& review_encodings, const Tensor& query,
                        const Tensor& W_p);

/// sum_i max(0, 1 - d'.z + d'.n_i) over exactly kNegatives negatives.
Var fusion_loss(Var d_prime, Var z, std::span<const Var> negatives);

/// Everything the decoder reads from one cluster.
struct FusedCluster {
  Var d_prime;
  Var pooling_weights;
  /// [V, D] fused word encodings (constants).
  Var word_matrix;
  std::vector<TokenId> word_ids;
  std::vector<std::size_t> counts;
};

/// Pools review encodings under `query` (with parameter "abstract.W_p") and
/// attaches the fused word table.
FusedCluster fuse(Tape& tape, const ParameterSet& abstract_params,
                  const ClusterEncodings& encodings, const FusedWords& words, const Tensor& query);

/// (Identity plus uniform noise of the given scale) / dim, so initial
/// pooling scores are mean elementwise products and the softmax starts soft.
Tensor init_pooling_matrix(std::size_t dim, double noise, Rng& rng);

}  // namespace opsum::fusion
