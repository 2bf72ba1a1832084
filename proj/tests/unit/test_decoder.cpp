#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "opsum/decoder.hpp"
#include "opsum/error.hpp"
#include "opsum/gradcheck.hpp"
#include "opsum/pipeline.hpp"

using namespace opsum;

namespace {

struct Bench {
  Model model;
  Corpus corpus;
  PreparedCluster prepared;
};

// Three short reviews with two out-of-vocabulary words ("xq", "zz").
Bench make_bench(bool extracts, std::uint64_t seed = 1) {
  Bench b;
  for (const char* w : {"good", "bad", "film", "plot"}) b.model.vocab.add(w);
  b.corpus = fixtures::corpus_of({{"good film xq", "bad plot", "good plot zz film"}}, b.model.vocab,
                                 {"good xq film qq"});
  Rng rng(seed);
  b.model.condense = condense::init_params(fixtures::tiny_condense(b.model.vocab.size()), rng);
  b.model.abstract = abstract::init_params(fixtures::tiny_abstract(b.model.vocab.size(), extracts), rng);
  fixtures::jitter(b.model.condense, 1.0, seed + 5);
  fixtures::jitter(b.model.abstract, 1.0, seed + 7);
  b.prepared = prepare_cluster(b.model, b.corpus.clusters[0], 2);
  return b;
}

abstract::Context context_of(Tape& tape, const Bench& b) {
  auto fused = fusion::fuse(tape, b.model.abstract, b.prepared.encodings, b.prepared.words,
                            b.prepared.mean_query);
  return abstract::make_context(tape, b.model.abstract, std::move(fused), b.prepared.output_size, 0.0);
}

double total(const Tensor& t) { return std::accumulate(t.values().begin(), t.values().end(), 0.0); }

void expect_distribution(const Tensor& p) {
  for (double v : p.values()) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(total(p), 1.0, 1e-6);
}

}  // namespace

TEST(Decoder, StepsProduceValidDistributions) {
  for (bool extracts : {false, true}) {
    Bench b = make_bench(extracts);
    Tape tape;
    Rng rng(0);
    auto ctx = context_of(tape, b);
    auto state = abstract::init_state(tape, b.model.abstract, ctx,
                                      std::span<const TokenId>(b.prepared.extract_tokens), Mode::kEval, rng);
    TokenId prev = kBosId;
    for (int t = 0; t < 6; ++t) {
      auto [out, next] = abstract::decode_step(tape, b.model.abstract, ctx, state, prev, Mode::kEval, rng);
      expect_distribution(out.attention.value());
      expect_distribution(out.copy.value());
      expect_distribution(out.generation.value());
      expect_distribution(out.distribution.value());
      EXPECT_EQ(out.distribution.size(), b.prepared.output_size);
      const double g = out.gate.value().item();
      EXPECT_GT(g, 0.0);
      EXPECT_LT(g, 1.0);
      EXPECT_EQ(next.t, state.t + 1);
      state = next;
      prev = static_cast<TokenId>(t % b.prepared.output_size);
    }
  }
}

TEST(Decoder, MixtureMatchesHandComputation) {
  Bench b = make_bench(true);
  Tape tape;
  Rng rng(0);
  auto ctx = context_of(tape, b);
  auto state = abstract::init_state(tape, b.model.abstract, ctx,
                                    std::span<const TokenId>(b.prepared.extract_tokens), Mode::kEval, rng);
  auto [out, next] = abstract::decode_step(tape, b.model.abstract, ctx, state, kBosId, Mode::kEval, rng);
  const double sigma = out.gate.value().item();
  const Tensor& a = out.attention.value();
  const Tensor& pg = out.generation.value();
  const auto& ids = ctx.fused.word_ids;
  for (TokenId w = 0; w < b.prepared.output_size; ++w) {
    double copy = 0.0;
    for (std::size_t j = 0; j < ids.size(); ++j)
      if (ids[j] == w) copy += a[j];
    const double gen = w < pg.size() ? pg[w] : 0.0;
    EXPECT_NEAR(out.distribution.value()[w], sigma * gen + (1 - sigma) * copy, 1e-6) << "id " << w;
    EXPECT_GE(out.distribution.value()[w] + 1e-7, sigma * gen);
    EXPECT_GE(out.distribution.value()[w] + 1e-7, (1 - sigma) * copy);
  }
  // Extended ids receive probability only through copying.
  const TokenId xq = b.model.vocab.size();
  EXPECT_EQ(b.corpus.clusters[0].surface(xq, b.model.vocab), "xq");
  EXPECT_GT(out.distribution.value()[xq], 0.0);
}

TEST(Decoder, GateLimits) {
  for (double direction : {1.0, -1.0}) {
    Bench b = make_bench(false);
    double logit = 0.0;
    {
      Tape tape;
      Rng rng(0);
      auto ctx = context_of(tape, b);
      auto state = abstract::init_state(tape, b.model.abstract, ctx, std::nullopt, Mode::kEval, rng);
      auto [out, next] = abstract::decode_step(tape, b.model.abstract, ctx, state, kBosId, Mode::kEval, rng);
      const double g = out.gate.value().item();
      logit = std::log(g / (1 - g));
    }
    // Rescale every gate weight so the pre-activation becomes +-30.
    const double factor = direction * 30.0 / logit;
    for (const char* name : {"abstract.gate.v_s", "abstract.gate.v_c", "abstract.gate.v_y"})
      for (double& v : b.model.abstract.at(name).values()) v *= factor;
    PrecisionScope scope(Precision::kFloat64);
    Tape tape;
    Rng rng(0);
    auto ctx = context_of(tape, b);
    auto state = abstract::init_state(tape, b.model.abstract, ctx, std::nullopt, Mode::kEval, rng);
    auto [out, next] = abstract::decode_step(tape, b.model.abstract, ctx, state, kBosId, Mode::kEval, rng);
    const Tensor& p = out.distribution.value();
    const Tensor& reference = direction > 0 ? out.generation.value() : out.copy.value();
    for (std::size_t w = 0; w < p.size(); ++w) {
      EXPECT_NEAR(p[w], w < reference.size() ? reference[w] : 0.0, 1e-6);
    }
  }
}

TEST(Decoder, ExtendedInputIsFedAsUnknown) {
  Bench b = make_bench(false);
  Tape tape;
  Rng rng(0);
  auto ctx = context_of(tape, b);
  auto state = abstract::init_state(tape, b.model.abstract, ctx, std::nullopt, Mode::kEval, rng);
  auto [a, sa] = abstract::decode_step(tape, b.model.abstract, ctx, state, b.model.vocab.size(), Mode::kEval, rng);
  auto [u, su] = abstract::decode_step(tape, b.model.abstract, ctx, state, kUnkId, Mode::kEval, rng);
  EXPECT_EQ(a.distribution.value(), u.distribution.value());
  EXPECT_THROW(abstract::decode_step(tape, b.model.abstract, ctx, state, b.prepared.output_size,
                                     Mode::kEval, rng),
               Error);
}

TEST(Decoder, InitialStates) {
  {
    Bench b = make_bench(false);
    Tape tape;
    Rng rng(0);
    auto ctx = context_of(tape, b);
    auto state = abstract::init_state(tape, b.model.abstract, ctx, std::nullopt, Mode::kEval, rng);
    EXPECT_EQ(state.s.h.value(), ctx.fused.d_prime.value());
    EXPECT_FALSE(state.r.has_value());
  }
  Bench b = make_bench(true);
  Tape tape;
  Rng rng(0);
  auto ctx = context_of(tape, b);
  auto zero = abstract::init_state(tape, b.model.abstract, ctx, std::nullopt, Mode::kEval, rng);
  ASSERT_TRUE(zero.r.has_value());
  EXPECT_EQ(zero.r->h.value(), Tensor(zero.r->h.shape(), 0.0));
  auto full = abstract::init_state(tape, b.model.abstract, ctx,
                                   std::span<const TokenId>(b.prepared.extract_tokens), Mode::kEval, rng);
  EXPECT_NE(full.r->h.value(), zero.r->h.value());
  EXPECT_THROW(abstract::init_state(tape, b.model.abstract, ctx, std::span<const TokenId>{}, Mode::kEval, rng),
               Error);
}

TEST(Decoder, SingleExtractFeedsThatReview) {
  Bench b = make_bench(true);
  PreparedCluster one = prepare_cluster(b.model, b.corpus.clusters[0], 1);
  ASSERT_EQ(one.extract_indices.size(), 1u);
  EXPECT_EQ(one.extract_tokens, b.corpus.clusters[0].reviews[one.extract_indices[0]].ids);
}

TEST(Decoder, GoldTargetsUseCopyableIds) {
  Bench b = make_bench(false);
  const auto& v = b.model.vocab;
  EXPECT_EQ(abstract::gold_targets(*b.corpus.clusters[0].summary),
            (std::vector<TokenId>{v.id("good"), v.size(), v.id("film"), kUnkId, kEosId}));
}

TEST(Decoder, GenerationLossIsSumOfStepLosses) {
  Bench b = make_bench(true);
  const auto gold = abstract::gold_targets(*b.corpus.clusters[0].summary);
  Tape tape;
  Rng rng(0);
  auto ctx = context_of(tape, b);
  auto state = abstract::init_state(tape, b.model.abstract, ctx,
                                    std::span<const TokenId>(b.prepared.extract_tokens), Mode::kEval, rng);
  const double loss = abstract::generation_loss(tape, b.model.abstract, ctx, state, gold, Mode::kEval, rng)
                          .value()
                          .item();
  double expected = 0.0;
  TokenId prev = kBosId;
  for (TokenId y : gold) {
    auto [out, next] = abstract::decode_step(tape, b.model.abstract, ctx, state, prev, Mode::kEval, rng);
    expected -= std::log(out.distribution.value()[y]);
    state = next;
    prev = y;
  }
  EXPECT_NEAR(loss, expected, 1e-4);
  EXPECT_GT(loss, 0.0);
}

TEST(Decoder, FullLossGradientCheck) {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Bench b = make_bench(true, seed);
    Rng rng(seed);
    std::vector<Tensor> negatives;
    for (int i = 0; i < 5; ++i) negatives.push_back(uniform_tensor({8}, 0.5, rng));
    std::vector<const Tensor*> refs;
    for (const auto& n : negatives) refs.push_back(&n);
    auto builder = [&](Tape& tape, const ParameterSet& params) {
      Rng unused(0);
      return abstract_loss(tape, params, b.prepared, refs, Mode::kEval, unused, 0.0).total;
    };
    GradCheckResult r = grad_check(builder, b.model.abstract, fixtures::wide_check());
    EXPECT_LE(r.max_relative_error, 1e-4)
        << r.worst_parameter << "[" << r.worst_index << "] " << r.worst_analytic << " vs "
        << r.worst_numeric;
  }
}

TEST(Decoder, AbstractLossIsUnweightedSum) {
  Bench b = make_bench(true);
  Rng rng(3);
  std::vector<Tensor> negatives;
  for (int i = 0; i < 5; ++i) negatives.push_back(uniform_tensor({8}, 0.5, rng));
  std::vector<const Tensor*> refs;
  for (const auto& n : negatives) refs.push_back(&n);
  Tape tape;
  auto parts = abstract_loss(tape, b.model.abstract, b.prepared, refs, Mode::kEval, rng, 0.0);
  ASSERT_TRUE(parts.fusion.has_value());
  EXPECT_DOUBLE_EQ(parts.total.value().item(),
                   static_cast<float>(parts.generation.value().item() + parts.fusion->value().item()));
  Tape plain;
  auto gen_only = abstract_loss(plain, b.model.abstract, b.prepared, {}, Mode::kEval, rng, 0.0);
  EXPECT_FALSE(gen_only.fusion.has_value());
  EXPECT_EQ(gen_only.total.value(), parts.generation.value());
}
