#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "opsum/condense.hpp"
#include "opsum/extractive.hpp"
#include "opsum/gradcheck.hpp"
#include "opsum/oracle.hpp"
#include "opsum/pipeline.hpp"

namespace opsum::selfcheck {

namespace {

constexpr double kGradTolerance = 1e-4;

std::vector<TokenId> random_ids(Rng& rng, std::size_t min_len, std::size_t max_len,
                                std::size_t vocab) {
  std::vector<TokenId> ids(min_len + uniform_index(rng, max_len - min_len + 1));
  for (auto& id : ids) id = kReservedCount + uniform_index(rng, vocab - kReservedCount);
  return ids;
}

// Random instances carry gradients down to 1e-8 while the loss is ~10, so a
// two-point 1e-5 step is dominated by round-off. Offsets of +-1 and a
// five-point 1e-3 step keep both round-off and truncation under tolerance.
constexpr double kJitter = 1.0;

GradCheckOptions check_options(std::uint64_t seed) {
  GradCheckOptions options;
  options.seed = seed;
  options.step = 1e-3;
  options.five_point = true;
  return options;
}

void jitter(ParameterSet& params, Rng& rng) {
  for (auto& [name, t] : params)
    for (double& v : t.values()) v += uniform(rng, -kJitter, kJitter);
}

// A random cluster of 1-3 reviews with 1-4 tokens each, drawn from a word
// pool that includes two out-of-vocabulary words, plus a summary.
struct SmallCluster {
  Model model;
  Corpus corpus;
};

SmallCluster small_cluster(Rng& rng, bool extracts) {
  SmallCluster s;
  const char* const pool[] = {"good", "bad", "film", "plot", "cast", "oovone", "oovtwo"};
  for (std::size_t i = 0; i < 5; ++i) s.model.vocab.add(pool[i]);
  auto sentence = [&rng, &pool] {
    std::string text;
    const std::size_t len = 1 + uniform_index(rng, 4);
    for (std::size_t i = 0; i < len; ++i) text += std::string(pool[uniform_index(rng, 7)]) + " ";
    return text;
  };
  ReviewCluster cluster;
  cluster.id = "small";
  const std::size_t n = 1 + uniform_index(rng, 3);
  for (std::size_t i = 0; i < n; ++i) cluster.reviews.push_back(make_review(sentence(), {}, 60));
  cluster.summary = make_review(sentence(), {}, 40);
  s.corpus.clusters.push_back(std::move(cluster));
  s.corpus.assign_ids(s.model.vocab);

  condense::Config cc;
  cc.vocab_size = s.model.vocab.size();
  cc.embedding_dim = 4;
  cc.hidden = 3;
  cc.dropout = 0.0;
  s.model.condense = condense::init_params(cc, rng);
  abstract::Config ac;
  ac.vocab_size = s.model.vocab.size();
  ac.embedding_dim = 4;
  ac.hidden = cc.encoding_dim();
  ac.attention_dim = 5;
  ac.use_extracts = extracts;
  ac.dropout = 0.0;
  s.model.abstract = abstract::init_params(ac, rng);
  jitter(s.model.condense, rng);
  jitter(s.model.abstract, rng);
  return s;
}

void track_distribution(const Tensor& p, DistributionStats& stats) {
  double sum = 0.0;
  for (double v : p.values()) {
    sum += v;
    stats.min_entry = std::min(stats.min_entry, v);
  }
  stats.max_sum_error = std::max(stats.max_sum_error, std::abs(sum - 1.0));
}

}  // namespace

double condense_gradient_error(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    condense::Config config;
    config.vocab_size = 10;
    config.embedding_dim = 4;
    config.hidden = 3;
    config.dropout = 0.0;
    ParameterSet params = condense::init_params(config, rng);
    jitter(params, rng);
    const auto ids = random_ids(rng, 1, 5, config.vocab_size);
    auto builder = [&ids](Tape& tape, const ParameterSet& p) {
      Rng unused(0);
      return condense::review_loss(tape, p, ids, Mode::kEval, unused, 0.0);
    };
    const auto result = grad_check(builder, params, check_options(seed + i));
    worst = std::max(worst, result.max_relative_error);
  }
  return worst;
}

double fusion_gradient_error(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  constexpr std::size_t kDim = 6;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<Tensor> reviews, negatives;
    for (int r = 0; r < 4; ++r) reviews.push_back(uniform_tensor({kDim}, 1.0, rng));
    for (std::size_t k = 0; k < fusion::kNegatives; ++k)
      negatives.push_back(uniform_tensor({kDim}, 1.0, rng));
    const Tensor z = uniform_tensor({kDim}, 1.0, rng);
    const Tensor query = extractive::mean_of(reviews);
    ParameterSet params;
    params.add("abstract.W_p", uniform_tensor({kDim, kDim}, 0.5, rng));
    auto builder = [&](Tape& tape, const ParameterSet& p) {
      std::vector<Var> d, n;
      for (const auto& t : reviews) d.push_back(tape.constant(t));
      for (const auto& t : negatives) n.push_back(tape.constant(t));
      auto pooled = fusion::pool_reviews(d, tape.constant(query), tape.param(p, "abstract.W_p"));
      return fusion::fusion_loss(pooled.d_prime, tape.constant(z), n);
    };
    const auto result = grad_check(builder, params, check_options(seed + i));
    worst = std::max(worst, result.max_relative_error);
  }
  return worst;
}

double abstract_gradient_error(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    SmallCluster s = small_cluster(rng, true);
    const PreparedCluster prepared = prepare_cluster(s.model, s.corpus.clusters[0], 2);
    std::vector<Tensor> negatives;
    for (std::size_t k = 0; k < fusion::kNegatives; ++k)
      negatives.push_back(uniform_tensor(prepared.mean_query.shape(), 0.5, rng));
    std::vector<const Tensor*> refs;
    for (const auto& n : negatives) refs.push_back(&n);
    auto builder = [&](Tape& tape, const ParameterSet& p) {
      Rng unused(0);
      return abstract_loss(tape, p, prepared, refs, Mode::kEval, unused, 0.0).total;
    };
    const auto result = grad_check(builder, s.model.abstract, check_options(seed + i));
    worst = std::max(worst, result.max_relative_error);
  }
  return worst;
}

DistributionStats decode_distributions(std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  DistributionStats stats;
  while (stats.steps < steps) {
    const bool extracts = uniform_index(rng, 2) == 1;
    SmallCluster s = small_cluster(rng, extracts);
    const PreparedCluster prepared = prepare_cluster(s.model, s.corpus.clusters[0], 2);
    Tape tape;
    auto fused = fusion::fuse(tape, s.model.abstract, prepared.encodings, prepared.words,
                              prepared.mean_query);
    auto context = abstract::make_context(tape, s.model.abstract, std::move(fused),
                                          prepared.output_size, 0.0);
    std::optional<std::span<const TokenId>> source;
    if (extracts) source = std::span<const TokenId>(prepared.extract_tokens);
    auto state = abstract::init_state(tape, s.model.abstract, context, source, Mode::kEval, rng);
    TokenId prev = kBosId;
    for (int t = 0; t < 10 && stats.steps < steps; ++t, ++stats.steps) {
      auto [out, next] =
          abstract::decode_step(tape, s.model.abstract, context, state, prev, Mode::kEval, rng);
      track_distribution(out.attention.value(), stats);
      track_distribution(out.copy.value(), stats);
      track_distribution(out.distribution.value(), stats);
      const double gate = out.gate.value().item();
      stats.min_gate = std::min(stats.min_gate, gate);
      stats.max_gate = std::max(stats.max_gate, gate);
      state = std::move(next);
      prev = uniform_index(rng, prepared.output_size);
    }
  }
  return stats;
}

OracleStats beam_oracle(std::size_t models, std::uint64_t seed) {
  Rng rng(seed);
  OracleStats stats;
  for (std::size_t m = 0; m < models; ++m) {
    const std::size_t vocab = 2 + uniform_index(rng, 4);
    const std::size_t max_len = 1 + uniform_index(rng, 3);
    const std::size_t end = uniform_index(rng, vocab);
    std::size_t width = 1;
    for (std::size_t i = 0; i < max_len; ++i) width *= vocab;
    oracle::ToyBeamModel toy(vocab, end, rng());
    const auto hyps = beam_search(toy.beam_model(), width, max_len);
    const auto [best, score] = toy.exhaustive_best(max_len);
    ++stats.cases;
    if (hyps.empty() || hyps[0].tokens != best || hyps[0].normalized_score() != score) ++stats.mismatches;
  }
  return stats;
}

OracleStats rouge_oracle(std::uint32_t alphabet, std::size_t max_length) {
  const oracle::SequenceTable table(alphabet, max_length);
  const auto& seqs = table.sequences();
  auto same = [](const rouge::Score& a, const rouge::Score& b) {
    return a.precision == b.precision && a.recall == b.recall && a.f1 == b.f1;
  };
  OracleStats stats;
  for (std::size_t a = 0; a < seqs.size(); ++a) {
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      ++stats.cases;
      const bool ok = same(rouge::rouge_n(seqs[a], seqs[b], 1), table.rouge_n(a, b, 1)) &&
                      same(rouge::rouge_n(seqs[a], seqs[b], 2), table.rouge_n(a, b, 2)) &&
                      same(rouge::rouge_l(seqs[a], seqs[b]), table.rouge_l(a, b)) &&
                      same(rouge::rouge_su4(seqs[a], seqs[b]), table.rouge_su4(a, b));
      if (!ok) ++stats.mismatches;
    }
  }
  return stats;
}

OracleStats extraction_oracle(std::size_t instances, std::size_t max_reviews, std::uint64_t seed) {
  Rng rng(seed);
  OracleStats stats;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t n = 1 + uniform_index(rng, max_reviews);
    const std::size_t dim = 1 + uniform_index(rng, 16);
    const std::size_t k = 1 + uniform_index(rng, n);
    std::vector<std::vector<double>> points(n, std::vector<double>(dim));
    std::vector<Tensor> embeddings;
    for (auto& p : points) {
      // Coarse grid values make exact distance ties common.
      for (auto& x : p) x = static_cast<double>(uniform_index(rng, 5)) - 2.0;
      embeddings.push_back(Tensor::vector(p));
    }
    ++stats.cases;
    if (extractive::select_top_k(embeddings, k).selected != oracle::nearest_by_full_sort(points, k))
      ++stats.mismatches;
  }
  return stats;
}

std::vector<CheckLine> run_all(std::uint64_t seed) {
  std::vector<CheckLine> lines;
  auto grad = [&lines](const char* name, double err) {
    lines.push_back({name, err <= kGradTolerance, fmt::format("max relative error {:.3g}", err)});
  };
  grad("gradient/condense", condense_gradient_error(1, seed));
  grad("gradient/fusion", fusion_gradient_error(1, seed));
  grad("gradient/abstract", abstract_gradient_error(1, seed));

  const auto dist = decode_distributions(100, seed);
  lines.push_back({"decoder/distributions", dist.valid(),
                   fmt::format("{} steps, max |sum-1| {:.3g}, gate in [{:.4f}, {:.4f}]", dist.steps,
                               dist.max_sum_error, dist.min_gate, dist.max_gate)});

  auto oracle_line = [&lines](const char* name, const OracleStats& s) {
    lines.push_back({name, s.mismatches == 0, fmt::format("{} of {} cases differ", s.mismatches, s.cases)});
  };
  oracle_line("oracle/beam", beam_oracle(10, seed));
  oracle_line("oracle/rouge", rouge_oracle(3, 4));
  oracle_line("oracle/extraction", extraction_oracle(20, 20, seed));
  return lines;
}

}  // namespace opsum::selfcheck
