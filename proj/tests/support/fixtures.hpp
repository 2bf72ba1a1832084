#pragma once

// Small deterministic models and corpora shared by the test suites.

#include <string>
#include <vector>

#include "opsum/condense.hpp"
#include "opsum/decoder.hpp"
#include "opsum/gradcheck.hpp"
#include "opsum/pipeline.hpp"
#include "opsum/toy_corpus.hpp"

namespace fixtures {

inline opsum::condense::Config tiny_condense(std::size_t vocab, std::size_t hidden = 4) {
  opsum::condense::Config c;
  c.vocab_size = vocab;
  c.embedding_dim = 5;
  c.hidden = hidden;
  c.dropout = 0.0;
  return c;
}

inline opsum::abstract::Config tiny_abstract(std::size_t vocab, bool extracts,
                                             std::size_t hidden = 8) {
  opsum::abstract::Config c;
  c.vocab_size = vocab;
  c.embedding_dim = 5;
  c.hidden = hidden;
  c.attention_dim = 6;
  c.use_extracts = extracts;
  c.dropout = 0.0;
  return c;
}

/// Random parameter values of the given scale for every entry, so gradient
/// checks do not sit at symmetric points (zero biases, identity W_p).
/// Five-point differences at a wider step. The randomized models here have a
/// loss near 10 and gradients near 1e-8, below two-point round-off at 1e-5.
inline opsum::GradCheckOptions wide_check() {
  opsum::GradCheckOptions options;
  options.step = 1e-3;
  options.five_point = true;
  return options;
}

inline void jitter(opsum::ParameterSet& params, double scale, std::uint64_t seed) {
  opsum::Rng rng(seed);
  for (auto& [name, t] : params) {
    for (double& v : t.values()) v += opsum::uniform(rng, -scale, scale);
  }
}

/// A toy corpus with ids assigned against its own vocabulary.
struct ToySetup {
  opsum::ToyCorpus toy;
  opsum::Model model;
};

inline ToySetup toy_setup(std::size_t clusters, std::size_t reviews, std::uint64_t seed,
                          bool extracts, std::size_t condense_hidden = 4) {
  ToySetup s;
  s.toy = opsum::generate_toy_corpus(opsum::ToyCorpusSpec::standard(clusters, reviews, seed));
  s.model.vocab = opsum::build_vocab(s.toy.corpus);
  s.toy.corpus.assign_ids(s.model.vocab);
  opsum::Rng rng(seed + 1);
  s.model.condense =
      opsum::condense::init_params(tiny_condense(s.model.vocab.size(), condense_hidden), rng);
  s.model.abstract = opsum::abstract::init_params(
      tiny_abstract(s.model.vocab.size(), extracts, 2 * condense_hidden), rng);
  return s;
}

/// A cluster built from raw review strings, ids assigned against `vocab`.
inline opsum::Corpus corpus_of(const std::vector<std::vector<std::string>>& clusters,
                               const opsum::Vocabulary& vocab,
                               const std::vector<std::string>& summaries = {}) {
  opsum::Corpus corpus;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    opsum::ReviewCluster cluster;
    cluster.id = "c" + std::to_string(c);
    for (const auto& text : clusters[c]) cluster.reviews.push_back(opsum::make_review(text, {}, 60));
    if (c < summaries.size()) cluster.summary = opsum::make_review(summaries[c], {}, 40);
    corpus.clusters.push_back(std::move(cluster));
  }
  corpus.assign_ids(vocab);
  corpus.stats = opsum::compute_stats(corpus);
  return corpus;
}

}  // namespace fixtures
