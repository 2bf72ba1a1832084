#include "opsum/condense.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "opsum/error.hpp"
#include "opsum/lstm.hpp"

namespace opsum::condense {

namespace {

const std::string kEmbedding = "condense.embedding";
const std::string kForward = "condense.enc_fwd";
const std::string kBackward = "condense.enc_bwd";
const std::string kDecoder = "condense.dec";
const std::string kOutW = "condense.out.W";
const std::string kOutB = "condense.out.b";

std::vector<const std::vector<TokenId>*> instances(const Corpus& corpus, bool summaries) {
  std::vector<const std::vector<TokenId>*> out;
  for (const auto& c : corpus.clusters) {
    for (const auto& r : c.reviews) {
      require(r.ids.size() == r.words.size() && !r.ids.empty(), ErrorKind::kData,
              "condense: review without assigned ids in cluster " + c.id);
      out.push_back(&r.ids);
    }
    if (summaries && c.summary && !c.summary->ids.empty()) out.push_back(&c.summary->ids);
  }
  return out;
}

double mean_eval_loss(const ParameterSet& params,
                      const std::vector<const std::vector<TokenId>*>& data) {
  if (data.empty()) return 0.0;
  Rng unused(0);
  double total = 0.0;
  for (const auto* ids : data) {
    Tape tape;
    total += review_loss(tape, params, *ids, Mode::kEval, unused).value().item();
  }
  return total / static_cast<double>(data.size());
}

}  // namespace

ParameterSet init_params(const Config& config, Rng& rng) {
  require(config.vocab_size > kReservedCount - 1, ErrorKind::kArgument,
          "condense: vocabulary must include the reserved tokens");
  ParameterSet p;
  p.add(kEmbedding, uniform_tensor({config.vocab_size, config.embedding_dim}, 0.1, rng));
  init_lstm(p, kForward, config.embedding_dim, config.hidden, rng);
  init_lstm(p, kBackward, config.embedding_dim, config.hidden, rng);
  init_lstm(p, kDecoder, config.embedding_dim, config.encoding_dim(), rng);
  p.add(kOutW, uniform_tensor({config.vocab_size, config.encoding_dim()}, 0.1, rng));
  p.add(kOutB, Tensor({config.vocab_size}, 0.0));
  return p;
}

Config config_of(const ParameterSet& params) {
  Config c;
  const Tensor& E = params.at(kEmbedding);
  c.vocab_size = E.rows();
  c.embedding_dim = E.cols();
  c.hidden = lstm_hidden(params, kForward);
  return c;
}

Encoding encode(Tape& tape, const ParameterSet& params, std::span<const TokenId> ids, Mode mode,
                Rng& rng, double dropout) {
  require(!ids.empty(), ErrorKind::kArgument, "condense::encode: empty review");
  Var E = tape.param(params, kEmbedding);
  std::vector<Var> inputs;
  inputs.reserve(ids.size());
  for (TokenId id : ids) inputs.push_back(opsum::dropout(embedding_lookup(E, id), dropout, mode, rng));
  BiLstmOutput out = bilstm(tape, params, kForward, kBackward, inputs);
  return {out.final, std::move(out.states)};
}

std::vector<Var> reconstruction(Tape& tape, const ParameterSet& params, Var d,
                                std::span<const TokenId> target, Mode mode, Rng& rng,
                                double dropout) {
  require(!target.empty(), ErrorKind::kArgument, "condense::reconstruction: empty target");
  Var E = tape.param(params, kEmbedding);
  Var W = tape.param(params, kOutW);
  Var b = tape.param(params, kOutB);
  LstmState z{d, tape.constant(Tensor(d.shape(), 0.0))};
  std::vector<Var> dists;
  dists.reserve(target.size());
  TokenId prev = kBosId;
  for (TokenId y : target) {
    z = lstm_step(tape, params, kDecoder, embedding_lookup(E, prev), z);
    dists.push_back(softmax(add(matvec(W, opsum::dropout(z.h, dropout, mode, rng)), b)));
    prev = y;
  }
  return dists;
}

Var reconstruction_loss(std::span<const Var> distributions, std::span<const TokenId> target) {
  require(distributions.size() == target.size() && !target.empty(), ErrorKind::kArgument,
          "reconstruction_loss: " + std::to_string(distributions.size()) +
              " distributions for " + std::to_string(target.size()) + " targets");
  std::vector<Var> terms;
  terms.reserve(target.size());
  for (std::size_t t = 0; t < target.size(); ++t) {
    terms.push_back(cross_entropy(distributions[t], target[t]));
  }
  return add_n(terms);
}

Var review_loss(Tape& tape, const ParameterSet& params, std::span<const TokenId> ids, Mode mode,
                Rng& rng, double dropout) {
  Encoding enc = encode(tape, params, ids, mode, rng, dropout);
  auto dists = reconstruction(tape, params, enc.d, ids, mode, rng, dropout);
  return reconstruction_loss(dists, ids);
}

ReviewEncoding encode_review(const ParameterSet& params, std::span<const TokenId> ids) {
  Tape tape;
  Rng unused(0);
  Encoding enc = encode(tape, params, ids, Mode::kEval, unused);
  ReviewEncoding out;
  out.d = enc.d.value();
  out.words.reserve(enc.words.size());
  for (const Var& w : enc.words) out.words.push_back(w.value());
  return out;
}

ParameterSet train(const Corpus& train_corpus, const Corpus* dev, const Config& config,
                   const TrainOptions& options, TrainReport* report) {
  require(options.batch_size >= 1, ErrorKind::kArgument, "batch size must be at least 1");
  Rng rng(options.seed);
  ParameterSet params = init_params(config, rng);
  const auto data = instances(train_corpus, options.include_summaries);
  const auto dev_data = dev ? instances(*dev, options.include_summaries)
                            : std::vector<const std::vector<TokenId>*>{};
  require(!data.empty(), ErrorKind::kData, "condense: empty training corpus");

  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = TrainReport{};
  rep.initial_loss = mean_eval_loss(params, data);

  OptimizerState state;
  ParameterSet best = params;
  double best_dev = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      GradMap batch;
      for (std::size_t k = start; k < end; ++k) {
        Tape tape;
        Var loss = review_loss(tape, params, *data[order[k]], Mode::kTrain, rng, config.dropout);
        epoch_total += loss.value().item();
        add_gradients(batch, tape.backward(loss));
      }
      scale_gradients(batch, 1.0 / static_cast<double>(end - start));
      adam_step(params, batch, state, options.adam);
    }
    EpochReport er;
    er.epoch = epoch;
    er.train_loss = epoch_total / static_cast<double>(data.size());
    er.eval_loss = mean_eval_loss(params, data);
    if (!dev_data.empty()) er.dev_loss = mean_eval_loss(params, dev_data);
    rep.epochs.push_back(er);
    if (options.on_epoch) options.on_epoch(er);

    const double criterion = dev_data.empty() ? er.eval_loss : er.dev_loss;
    if (criterion < best_dev) {
      best_dev = criterion;
      best = params;
      rep.best_epoch = epoch;
      since_best = 0;
    } else if (!dev_data.empty() && ++since_best >= options.patience) {
      break;
    }
  }
  return dev_data.empty() ? params : best;
}

std::size_t load_embeddings(ParameterSet& params, const std::string& parameter,
                            const Vocabulary& vocab, const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open embedding file " + path);
  Tensor& E = params.at(parameter);
  std::string line;
  std::size_t line_no = 0, loaded = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    std::vector<double> values;
    double v;
    while (ls >> v) values.push_back(v);
    require(values.size() == E.cols(), ErrorKind::kData,
            path + ":" + std::to_string(line_no) + ": expected " + std::to_string(E.cols()) +
                " values, found " + std::to_string(values.size()));
    if (!vocab.contains(word)) continue;
    std::copy(values.begin(), values.end(), E.row(vocab.id(word)).begin());
    ++loaded;
  }
  return loaded;
}

}  // namespace opsum::condense
