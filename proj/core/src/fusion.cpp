#include "opsum/fusion.hpp"

#include <map>

#include "opsum/condense.hpp"
#include "opsum/error.hpp"

namespace opsum::fusion {

ClusterEncodings encode_cluster(const ParameterSet& condense_params, const ReviewCluster& cluster) {
  require(!cluster.reviews.empty(), ErrorKind::kArgument,
          "encode_cluster: cluster " + cluster.id + " has no reviews");
  ClusterEncodings out;
  for (const auto& r : cluster.reviews) {
    require(r.ids.size() == r.words.size() && r.extended_ids.size() == r.words.size(),
            ErrorKind::kData, "encode_cluster: ids not assigned in cluster " + cluster.id);
    auto enc = condense::encode_review(condense_params, r.ids);
    out.review_encodings.push_back(std::move(enc.d));
    out.word_encodings.push_back(std::move(enc.words));
    out.word_ids.push_back(r.extended_ids);
  }
  return out;
}

Tensor mean_query(const ClusterEncodings& encodings) {
  require(encodings.reviews() > 0, ErrorKind::kArgument, "mean_query: no reviews");
  Tensor q(encodings.review_encodings[0].shape(), 0.0);
  for (const auto& d : encodings.review_encodings) {
    require(d.shape() == q.shape(), ErrorKind::kShape, "mean_query: ragged review encodings");
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += d[j];
  }
  const double inv = 1.0 / static_cast<double>(encodings.reviews());
  for (double& v : q.values()) v *= inv;
  return q;
}

FusedWords fuse_words(const ClusterEncodings& encodings) {
  require(encodings.word_encodings.size() == encodings.word_ids.size(), ErrorKind::kShape,
          "fuse_words: encodings and ids are misaligned");
  std::map<TokenId, std::pair<Tensor, std::size_t>> acc;
  for (std::size_t i = 0; i < encodings.word_ids.size(); ++i) {
    const auto& ids = encodings.word_ids[i];
    const auto& encs = encodings.word_encodings[i];
    require(ids.size() == encs.size(), ErrorKind::kShape,
            "fuse_words: review " + std::to_string(i) + " has " + std::to_string(ids.size()) +
                " ids but " + std::to_string(encs.size()) + " encodings");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto [it, inserted] = acc.try_emplace(ids[k], encs[k], 1);
      if (inserted) continue;
      auto dst = it->second.first.values();
      auto src = encs[k].values();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      ++it->second.second;
    }
  }
  FusedWords out;
  for (auto& [id, entry] : acc) {
    auto& [sum, count] = entry;
    const double inv = 1.0 / static_cast<double>(count);
    for (double& v : sum.values()) v *= inv;
    out.unique_words.push_back(id);
    out.encodings.push_back(std::move(sum));
    out.counts.push_back(count);
  }
  return out;
}

Pooled pool_reviews(std::span<const Var> review_encodings, Var query, Var W_p) {
  require(!review_encodings.empty(), ErrorKind::kArgument, "pool_reviews: no reviews");
  Var D = stack(review_encodings);
  Var scores = matvec(D, matvec(W_p, query));
  Var weights = softmax(scores);
  return {vecmat(weights, D), weights};
}

PoolResult pool_reviews(const std::vector<Tensor>& review_encodings, const Tensor& query,
                        const Tensor& W_p) {
  Tape tape;
  std::vector<Var> ds;
  for (const auto& d : review_encodings) ds.push_back(tape.constant(d));
  Pooled p = pool_reviews(ds, tape.constant(query), tape.constant(W_p));
  return {p.d_prime.value(), p.weights.value()};
}

Var fusion_loss(Var d_prime, Var z, std::span<const Var> negatives) {
  require(negatives.size() == kNegatives, ErrorKind::kArgument,
          "fusion_loss: expected " + std::to_string(kNegatives) + " negatives, got " +
              std::to_string(negatives.size()));
  Var positive = dot(d_prime, z);
  std::vector<Var> terms;
  terms.reserve(negatives.size());
  for (const Var& n : negatives) {
    // 1 - d'.z + d'.n
    terms.push_back(relu(affine(sub(dot(d_prime, n), positive), 1.0, 1.0)));
  }
  return add_n(terms);
}

FusedCluster fuse(Tape& tape, const ParameterSet& abstract_params,
                  const ClusterEncodings& encodings, const FusedWords& words, const Tensor& query) {
  std::vector<Var> ds;
  ds.reserve(encodings.reviews());
  for (const auto& d : encodings.review_encodings) ds.push_back(tape.constant(d));
  Var W_p = tape.param(abstract_params, "abstract.W_p");
  require(query.shape() == encodings.review_encodings[0].shape(), ErrorKind::kShape,
          "fuse: query " + shape_string(query.shape()) + " does not match review encodings " +
              shape_string(encodings.review_encodings[0].shape()));
  Pooled pooled = pool_reviews(ds, tape.constant(query), W_p);

  std::vector<Var> rows;
  rows.reserve(words.encodings.size());
  for (const auto& h : words.encodings) rows.push_back(tape.constant(h));
  FusedCluster out;
  out.d_prime = pooled.d_prime;
  out.pooling_weights = pooled.weights;
  out.word_matrix = stack(rows);
  out.word_ids = words.unique_words;
  out.counts = words.counts;
  return out;
}

Tensor init_pooling_matrix(std::size_t dim, double noise, Rng& rng) {
  Tensor W = uniform_tensor({dim, dim}, noise, rng);
  for (std::size_t i = 0; i < dim; ++i) W.at(i, i) += 1.0;
  const double scale = 1.0 / static_cast<double>(dim);
  for (double& v : W.values()) v *= scale;
  return W;
}

}  // namespace opsum::fusion
