#include "opsum/customization.hpp"

#include "opsum/condense.hpp"
#include "opsum/error.hpp"

namespace opsum::customization {

BackgroundSet background_from_corpus(const Corpus& corpus, std::string label, std::size_t limit) {
  BackgroundSet out;
  out.label = std::move(label);
  for (const auto& c : corpus.clusters) {
    for (const auto& r : c.reviews) {
      if (limit != 0 && out.reviews.size() == limit) return out;
      out.reviews.push_back(r);
    }
  }
  return out;
}

Tensor build_query(const BackgroundSet& background, const ParameterSet& condense_params) {
  require(!background.reviews.empty(), ErrorKind::kArgument,
          "build_query: background set '" + background.label + "' is empty");
  std::vector<Tensor> encodings;
  encodings.reserve(background.reviews.size());
  for (const auto& r : background.reviews) {
    require(r.ids.size() == r.words.size(), ErrorKind::kData,
            "build_query: background review ids not assigned");
    encodings.push_back(condense::encode_review(condense_params, r.ids).d);
  }
  return extractive::mean_of(encodings);
}

Summary summarize_customized(const Model& model, const PreparedCluster& prepared,
                             const Tensor& query, const CustomizeOptions& options) {
  SummarizeOptions s;
  s.beam = options.beam;
  s.max_length = options.max_length;
  s.query = query;
  s.use_extracts = options.use_extracts;
  return summarize(model, prepared, s);
}

Summary summarize_customized(const Model& model, const PreparedCluster& prepared,
                             const BackgroundSet& background, const CustomizeOptions& options) {
  return summarize_customized(model, prepared, build_query(background, model.condense), options);
}

}  // namespace opsum::customization
