#include "opsum/extractive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opsum/condense.hpp"
#include "opsum/error.hpp"

namespace opsum::extractive {

Tensor CondenseEmbedder::embed(const Review& review) const {
  require(!review.ids.empty(), ErrorKind::kArgument, "embed_review: empty review");
  return mean_of(condense::encode_review(params_, review.ids).words);
}

Tensor mean_of(const std::vector<Tensor>& vectors) {
  require(!vectors.empty(), ErrorKind::kArgument, "mean_of: no vectors");
  Tensor out(vectors[0].shape(), 0.0);
  for (const auto& v : vectors) {
    require(v.shape() == out.shape(), ErrorKind::kShape, "mean_of: ragged vectors");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j];
  }
  const double inv = 1.0 / static_cast<double>(vectors.size());
  for (double& x : out.values()) x *= inv;
  return out;
}

CentroidSelection select_top_k(const std::vector<Tensor>& embeddings, std::size_t k,
                               Distance distance) {
  const std::size_t n = embeddings.size();
  require(n >= 1, ErrorKind::kArgument, "select_top_k: no reviews");
  require(k >= 1 && k <= n, ErrorKind::kArgument,
          "select_top_k: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  CentroidSelection out;
  out.centroid = mean_of(embeddings);
  const double centroid_norm = l2_norm(out.centroid.values());
  out.distances.reserve(n);
  for (const auto& e : embeddings) {
    if (distance == Distance::kEuclidean) {
      double s = 0.0;
      for (std::size_t j = 0; j < e.size(); ++j) {
        const double d = e[j] - out.centroid[j];
        s += d * d;
      }
      out.distances.push_back(std::sqrt(s));
    } else {
      const double denom = l2_norm(e.values()) * centroid_norm;
      const double cosine = denom > 0.0 ? dot(e.values(), out.centroid.values()) / denom : 0.0;
      out.distances.push_back(1.0 - cosine);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto kth = order.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(order.begin(), kth, order.end(), [&](std::size_t a, std::size_t b) {
    if (out.distances[a] != out.distances[b]) return out.distances[a] < out.distances[b];
    return a < b;
  });
  out.selected.assign(order.begin(), kth);
  return out;
}

CentroidSelection select_top_k(const std::vector<Review>& reviews, std::size_t k,
                               const Embedder& embedder, Distance distance) {
  std::vector<Tensor> embeddings;
  embeddings.reserve(reviews.size());
  for (const auto& r : reviews) embeddings.push_back(embedder.embed(r));
  return select_top_k(embeddings, k, distance);
}

}  // namespace opsum::extractive
