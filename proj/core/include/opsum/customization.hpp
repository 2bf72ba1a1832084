#pragma once

#include <string>
#include <vector>

#include "opsum/pipeline.hpp"

namespace opsum::customization {

/// Reviews expressing one user need (an aspect or a sentiment).
struct BackgroundSet {
  std::string label;
  std::vector<Review> reviews;
};

/// Collects the reviews of every cluster of a corpus whose ids have been
/// assigned. `limit` caps the set size (0 keeps all).
BackgroundSet background_from_corpus(const Corpus& corpus, std::string label,
                                     std::size_t limit = 0);

/// d-hat: the mean Condense encoding of the background reviews.
Tensor build_query(const BackgroundSet& background, const ParameterSet& condense_params);

struct CustomizeOptions {
  std::size_t beam = kDefaultBeam;
  std::size_t max_length = kDefaultMaxLength;
  bool use_extracts = false;
};

/// General-purpose summarization with d-hat in place of the mean review
/// encoding as the pooling query. No parameter changes.
Summary summarize_customized(const Model& model, const PreparedCluster& prepared,
                             const BackgroundSet& background, const CustomizeOptions& options = {});

/// Same, reusing a query built once for many clusters.
Summary summarize_customized(const Model& model, const PreparedCluster& prepared,
                             const Tensor& query, const CustomizeOptions& options = {});

}  // namespace opsum::customization
