#include "opsum/pipeline.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "opsum/condense.hpp"
#include "opsum/error.hpp"
#include "opsum/rouge.hpp"

namespace opsum {

namespace {

const std::string kCondensePrefix = "condense.";
const std::string kAbstractPrefix = "abstract.";

bool has_salience(const ParameterSet& abstract_params) {
  return abstract_params.contains("abstract.sal_dec.W");
}

Summary summarize_with(const Vocabulary& vocab, const ParameterSet& abstract_params,
                       const PreparedCluster& prepared, const SummarizeOptions& options) {
  require(abstract_params.size() > 0, ErrorKind::kArgument, "summarize: no Abstract parameters");
  const Tensor& query = options.query ? *options.query : prepared.mean_query;
  const bool extracts = options.use_extracts.value_or(has_salience(abstract_params));
  DecoderBeamModel decoder(vocab, abstract_params, prepared, query, extracts);
  const auto hyps = beam_search(decoder.beam_model(), options.beam, options.max_length);
  require(!hyps.empty(), ErrorKind::kNumeric, "summarize: beam search produced no hypothesis");
  const Hypothesis& best = hyps.front();

  Summary out;
  out.ids = best.tokens;
  if (!out.ids.empty() && out.ids.back() == kEosId) out.ids.pop_back();
  for (TokenId id : out.ids) out.tokens.push_back(prepared.cluster->surface(id, vocab));
  out.text = detokenize(unmask_title(out.tokens, prepared.cluster->title_tokens()));
  out.pooling_weights = decoder.pooling_weights();
  out.log_prob = best.log_prob;
  out.score = best.normalized_score();
  return out;
}

double mean_rouge_l_with(const Vocabulary& vocab, const ParameterSet& abstract_params,
                         const std::vector<PreparedCluster>& clusters,
                         const SummarizeOptions& options) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& p : clusters) {
    if (!p.cluster->summary) continue;
    const Summary s = summarize_with(vocab, abstract_params, p, options);
    const Tokens title = p.cluster->title_tokens();
    total += rouge::rouge_l(unmask_title(s.tokens, title), unmask_title(p.cluster->summary->words, title)).f1;
    ++count;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace

bool Model::uses_extracts() const { return has_salience(abstract); }

Checkpoint to_checkpoint(const Model& model) {
  Checkpoint c;
  c.params.merge(model.condense);
  c.params.merge(model.abstract);
  c.precision = precision();
  c.meta["vocab_size"] = std::to_string(model.vocab.size());
  c.meta["use_extracts"] = model.uses_extracts() ? "1" : "0";
  return c;
}

Model from_checkpoint(const Checkpoint& checkpoint, Vocabulary vocab) {
  Model m;
  m.vocab = std::move(vocab);
  m.condense.merge(checkpoint.params, kCondensePrefix);
  m.abstract.merge(checkpoint.params, kAbstractPrefix);
  require(m.condense.size() > 0, ErrorKind::kData, "checkpoint has no Condense parameters");
  const std::size_t rows = m.condense.at("condense.embedding").rows();
  require(rows == m.vocab.size(), ErrorKind::kData,
          "checkpoint vocabulary size " + std::to_string(rows) + " does not match vocabulary file (" +
              std::to_string(m.vocab.size()) + ")");
  return m;
}

PreparedCluster prepare_cluster(const Model& model, const ReviewCluster& cluster, std::size_t k) {
  require(k >= 1, ErrorKind::kArgument, "prepare_cluster: k must be at least 1");
  PreparedCluster p;
  p.cluster = &cluster;
  p.encodings = fusion::encode_cluster(model.condense, cluster);
  p.words = fusion::fuse_words(p.encodings);
  p.mean_query = fusion::mean_query(p.encodings);
  std::vector<Tensor> embeddings;
  embeddings.reserve(cluster.reviews.size());
  for (const auto& words : p.encodings.word_encodings) {
    if (words.empty()) {
      embeddings.emplace_back(p.mean_query.shape(), 0.0);
    } else {
      embeddings.push_back(extractive::mean_of(words));
    }
  }
  const auto selection =
      extractive::select_top_k(embeddings, std::min(k, cluster.reviews.size()));
  p.extract_indices = selection.selected;
  for (std::size_t i : p.extract_indices) {
    const auto& ids = cluster.reviews[i].ids;
    p.extract_tokens.insert(p.extract_tokens.end(), ids.begin(), ids.end());
  }
  if (cluster.summary) {
    p.summary_encoding = condense::encode_review(model.condense, cluster.summary->ids).d;
  }
  p.output_size = cluster.output_size(model.vocab);
  return p;
}

std::vector<PreparedCluster> prepare_corpus(const Model& model, const Corpus& corpus,
                                            std::size_t k) {
  std::vector<PreparedCluster> out;
  out.reserve(corpus.clusters.size());
  for (const auto& c : corpus.clusters) out.push_back(prepare_cluster(model, c, k));
  return out;
}

DecoderBeamModel::DecoderBeamModel(const Vocabulary& vocab, const ParameterSet& abstract_params,
                                   const PreparedCluster& prepared, const Tensor& query,
                                   bool use_extracts)
    : params_(abstract_params) {
  require(!use_extracts || has_salience(abstract_params), ErrorKind::kArgument,
          "summarize: extracts requested but the model has no salience encoder");
  require(abstract_params.at("abstract.embedding").rows() == vocab.size(), ErrorKind::kArgument,
          "summarize: Abstract vocabulary size does not match the vocabulary");
  auto fused = fusion::fuse(tape_, params_, prepared.encodings, prepared.words, query);
  pooling_weights_ = fused.pooling_weights.value();
  context_ = abstract::make_context(tape_, params_, std::move(fused), prepared.output_size, 0.0);
  std::optional<std::span<const TokenId>> extracts;
  if (use_extracts) extracts = std::span<const TokenId>(prepared.extract_tokens);
  states_.push_back(abstract::init_state(tape_, params_, context_, extracts, Mode::kEval, rng_));
}

BeamModel DecoderBeamModel::beam_model() {
  BeamModel m;
  m.initial_state = 0;
  m.step = [this](std::size_t handle, TokenId prev) {
    auto [step, next] =
        abstract::decode_step(tape_, params_, context_, states_[handle], prev, Mode::kEval, rng_);
    states_.push_back(std::move(next));
    const Tensor& p = step.distribution.value();
    std::vector<double> log_probs(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      log_probs[i] = p[i] > 0.0 ? std::log(p[i]) : -std::numeric_limits<double>::infinity();
    }
    log_probs[kPadId] = -std::numeric_limits<double>::infinity();
    log_probs[kBosId] = -std::numeric_limits<double>::infinity();
    return std::make_pair(std::move(log_probs), states_.size() - 1);
  };
  return m;
}

Summary summarize(const Model& model, const PreparedCluster& prepared,
                  const SummarizeOptions& options) {
  return summarize_with(model.vocab, model.abstract, prepared, options);
}

std::vector<Summary> summarize_all(const Model& model, const std::vector<PreparedCluster>& clusters,
                                   const SummarizeOptions& options, std::size_t workers) {
  std::vector<Summary> out(clusters.size());
  workers = std::max<std::size_t>(1, std::min(workers, clusters.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < clusters.size(); ++i) out[i] = summarize(model, clusters[i], options);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < clusters.size(); i += workers) {
          out[i] = summarize(model, clusters[i], options);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

LossParts abstract_loss(Tape& tape, const ParameterSet& abstract_params,
                        const PreparedCluster& prepared, const std::vector<const Tensor*>& negatives,
                        Mode mode, Rng& rng, double dropout) {
  const ReviewCluster& cluster = *prepared.cluster;
  require(cluster.summary.has_value(), ErrorKind::kData,
          "abstract_loss: cluster " + cluster.id + " has no reference summary");
  auto fused = fusion::fuse(tape, abstract_params, prepared.encodings, prepared.words,
                            prepared.mean_query);
  const abstract::Context ctx =
      abstract::make_context(tape, abstract_params, std::move(fused), prepared.output_size, dropout);
  std::optional<std::span<const TokenId>> extracts;
  if (has_salience(abstract_params)) extracts = std::span<const TokenId>(prepared.extract_tokens);
  const auto state = abstract::init_state(tape, abstract_params, ctx, extracts, mode, rng);
  const auto gold = abstract::gold_targets(*cluster.summary);

  LossParts out;
  out.generation = abstract::generation_loss(tape, abstract_params, ctx, state, gold, mode, rng);
  out.total = out.generation;
  if (!negatives.empty()) {
    require(prepared.summary_encoding.has_value(), ErrorKind::kData,
            "abstract_loss: summary encoding missing for cluster " + cluster.id);
    Var z = tape.constant(*prepared.summary_encoding);
    std::vector<Var> negs;
    negs.reserve(negatives.size());
    for (const Tensor* n : negatives) negs.push_back(tape.constant(*n));
    out.fusion = fusion::fusion_loss(ctx.fused.d_prime, z, negs);
    out.total = add(out.generation, *out.fusion);
  }
  return out;
}

ParameterSet train_abstract(const Model& model, const std::vector<PreparedCluster>& train,
                            const std::vector<PreparedCluster>* dev,
                            const AbstractTrainOptions& options, AbstractTrainReport* report) {
  require(options.batch_size >= 1, ErrorKind::kArgument, "batch size must be at least 1");
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].cluster->summary) usable.push_back(i);
  }
  require(!usable.empty(), ErrorKind::kData, "abstract: no training cluster has a summary");
  require(!options.use_fusion_loss || usable.size() >= 2, ErrorKind::kData,
          "abstract: the fusion loss needs at least 2 training clusters with summaries");

  Rng rng(options.seed);
  abstract::Config config;
  config.vocab_size = model.vocab.size();
  config.embedding_dim = options.embedding_dim;
  config.hidden = condense::config_of(model.condense).encoding_dim();
  config.attention_dim = options.attention_dim;
  config.use_extracts = options.use_extracts;
  config.dropout = options.dropout;
  ParameterSet params = abstract::init_params(config, rng);

  AbstractTrainReport local;
  AbstractTrainReport& rep = report ? *report : local;
  rep = AbstractTrainReport{};

  SummarizeOptions dev_options;
  dev_options.beam = options.dev_beam;
  dev_options.max_length = options.max_length;

  OptimizerState state;
  ParameterSet best = params;
  double best_dev = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order = usable;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    AbstractEpochReport er;
    er.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      GradMap batch;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        std::vector<const Tensor*> negatives;
        if (options.use_fusion_loss) {
          std::vector<std::size_t> others;
          for (std::size_t u : usable)
            if (u != idx) others.push_back(u);
          for (std::size_t n = 0; n < fusion::kNegatives; ++n) {
            negatives.push_back(&*train[others[uniform_index(rng, others.size())]].summary_encoding);
          }
        }
        Tape tape;
        const LossParts loss =
            abstract_loss(tape, params, train[idx], negatives, Mode::kTrain, rng, options.dropout);
        er.train_loss += loss.total.value().item();
        er.generation_loss += loss.generation.value().item();
        if (loss.fusion) er.fusion_loss += loss.fusion->value().item();
        add_gradients(batch, tape.backward(loss.total));
      }
      scale_gradients(batch, 1.0 / static_cast<double>(end - start));
      adam_step(params, batch, state, options.adam);
    }
    const double inv = 1.0 / static_cast<double>(order.size());
    er.train_loss *= inv;
    er.generation_loss *= inv;
    er.fusion_loss *= inv;
    if (dev && !dev->empty()) er.dev_rouge_l = mean_rouge_l_with(model.vocab, params, *dev, dev_options);
    rep.epochs.push_back(er);
    if (options.on_epoch) options.on_epoch(er);

    if (!dev || dev->empty()) continue;
    if (er.dev_rouge_l > best_dev) {
      best_dev = er.dev_rouge_l;
      best = params;
      rep.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  if (!dev || dev->empty()) {
    rep.best_epoch = rep.epochs.size();
    return params;
  }
  return best;
}

double mean_rouge_l(const Model& model, const std::vector<PreparedCluster>& clusters,
                    const SummarizeOptions& options) {
  return mean_rouge_l_with(model.vocab, model.abstract, clusters, options);
}

}  // namespace opsum
