#pragma once

#include <vector>

#include "opsum/corpus.hpp"
#include "opsum/params.hpp"

namespace opsum::extractive {

/// Default number of extracted reviews.
inline constexpr std::size_t kDefaultTopK = 5;

/// Maps a review to a fixed-width vector.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Tensor embed(const Review& review) const = 0;
};

/// Mean of the Condense word-level encodings of a review.
class CondenseEmbedder final : public Embedder {
 public:
  explicit CondenseEmbedder(const ParameterSet& condense_params) : params_(condense_params) {}
  Tensor embed(const Review& review) const override;

 private:
  const ParameterSet& params_;
};

/// Arithmetic mean of equal-shaped vectors.
Tensor mean_of(const std::vector<Tensor>& vectors);

enum class Distance { kEuclidean, kCosine };

struct CentroidSelection {
  Tensor centroid;
  /// k review indices in ascending distance order, ties by lowest index.
  std::vector<std::size_t> selected;
  /// Distance of every review to the centroid.
  std::vector<double> distances;
};

CentroidSelection select_top_k(const std::vector<Tensor>& embeddings, std::size_t k,
                               Distance distance = Distance::kEuclidean);

CentroidSelection select_top_k(const std::vector<Review>& reviews, std::size_t k,
                               const Embedder& embedder,
                               Distance distance = Distance::kEuclidean);

}  // namespace opsum::extractive
