#include <benchmark/benchmark.h>

#include <vector>

#include "opsum/condense.hpp"
#include "opsum/extractive.hpp"
#include "opsum/oracle.hpp"
#include "opsum/pipeline.hpp"
#include "opsum/rouge.hpp"
#include "opsum/toy_corpus.hpp"

using namespace opsum;

namespace {

std::vector<std::uint32_t> random_sequence(Rng& rng, std::size_t length, std::size_t alphabet) {
  std::vector<std::uint32_t> s(length);
  for (auto& t : s) t = static_cast<std::uint32_t>(uniform_index(rng, alphabet));
  return s;
}

// Untrained model over a toy corpus with condense hidden = dim / 2.
struct DecodeBench {
  ToyCorpus toy;
  Model model;
  std::vector<PreparedCluster> prepared;

  explicit DecodeBench(std::size_t dim) : toy(generate_toy_corpus(ToyCorpusSpec::standard(2, 6, 1))) {
    model.vocab = build_vocab(toy.corpus);
    toy.corpus.assign_ids(model.vocab);
    Rng rng(1);
    condense::Config cc;
    cc.vocab_size = model.vocab.size();
    cc.embedding_dim = dim / 2;
    cc.hidden = dim / 2;
    model.condense = condense::init_params(cc, rng);
    abstract::Config ac;
    ac.vocab_size = model.vocab.size();
    ac.embedding_dim = dim / 2;
    ac.hidden = dim;
    ac.attention_dim = dim;
    model.abstract = abstract::init_params(ac, rng);
    prepared = prepare_corpus(model, toy.corpus);
  }
};

}  // namespace

static void BM_DecodeStep(benchmark::State& state) {
  DecodeBench bench(static_cast<std::size_t>(state.range(0)));
  DecoderBeamModel decoder(bench.model.vocab, bench.model.abstract, bench.prepared[0],
                           bench.prepared[0].mean_query, true);
  BeamModel beam = decoder.beam_model();
  std::size_t handle = beam.initial_state;
  for (auto _ : state) {
    auto [log_probs, next] = beam.step(handle, kBosId);
    benchmark::DoNotOptimize(log_probs.data());
    handle = next;
  }
}
// Every step stays on the decoder's tape, so the iteration count is capped.
BENCHMARK(BM_DecodeStep)->Arg(64)->Arg(256)->Iterations(300)->Unit(benchmark::kMicrosecond);

static void BM_Summarize(benchmark::State& state) {
  DecodeBench bench(static_cast<std::size_t>(state.range(0)));
  SummarizeOptions options;
  options.max_length = 12;
  for (auto _ : state) benchmark::DoNotOptimize(summarize(bench.model, bench.prepared[0], options));
}
BENCHMARK(BM_Summarize)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_RougeL(benchmark::State& state) {
  Rng rng(1);
  const auto a = random_sequence(rng, static_cast<std::size_t>(state.range(0)), 50);
  const auto b = random_sequence(rng, static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(rouge::rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(40)->Arg(400);

static void BM_RougeSU4(benchmark::State& state) {
  Rng rng(2);
  const auto a = random_sequence(rng, static_cast<std::size_t>(state.range(0)), 50);
  const auto b = random_sequence(rng, static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(rouge::rouge_su4(a, b));
}
BENCHMARK(BM_RougeSU4)->Arg(40)->Arg(400);

static void BM_BeamSearch(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    // The toy model remembers every prefix it has seen, so start fresh.
    oracle::ToyBeamModel toy(20, 2, 3);
    benchmark::DoNotOptimize(beam_search(toy.beam_model(), width, 20));
  }
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

static void BM_SelectTopK(benchmark::State& state) {
  Rng rng(4);
  std::vector<Tensor> reviews;
  for (int i = 0; i < state.range(0); ++i) reviews.push_back(uniform_tensor({256}, 1.0, rng));
  for (auto _ : state) benchmark::DoNotOptimize(extractive::select_top_k(reviews, 3));
}
BENCHMARK(BM_SelectTopK)->Arg(10)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
