#include "opsum/decoder.hpp"

#include "opsum/error.hpp"

namespace opsum::abstract {

namespace {

const std::string kEmbedding = "abstract.embedding";
const std::string kDecoder = "abstract.dec";
const std::string kSalienceForward = "abstract.sal_enc_fwd";
const std::string kSalienceBackward = "abstract.sal_enc_bwd";
const std::string kSalienceDecoder = "abstract.sal_dec";

}  // namespace

ParameterSet init_params(const Config& config, Rng& rng) {
  require(config.vocab_size >= kReservedCount, ErrorKind::kArgument,
          "abstract: vocabulary must include the reserved tokens");
  require(config.hidden % 2 == 0, ErrorKind::kArgument, "abstract: hidden size must be even");
  const std::size_t E = config.embedding_dim, D = config.hidden, A = config.attention_dim;
  const std::size_t S = config.state_dim();
  ParameterSet p;
  p.add(kEmbedding, uniform_tensor({config.vocab_size, E}, 0.1, rng));
  p.add("abstract.W_p", fusion::init_pooling_matrix(D, 0.01, rng));
  init_lstm(p, kDecoder, E, D, rng);
  p.add("abstract.att.W_h", uniform_tensor({A, D}, 0.1, rng));
  p.add("abstract.att.W_s", uniform_tensor({A, S}, 0.1, rng));
  p.add("abstract.att.b_a", Tensor({A}, 0.0));
  p.add("abstract.att.v", uniform_tensor({A}, 0.1, rng));
  p.add("abstract.gen.W_g", uniform_tensor({config.vocab_size, S + D}, 0.1, rng));
  p.add("abstract.gen.b_g", Tensor({config.vocab_size}, 0.0));
  p.add("abstract.gate.v_s", uniform_tensor({S}, 0.1, rng));
  p.add("abstract.gate.v_c", uniform_tensor({D}, 0.1, rng));
  p.add("abstract.gate.v_y", uniform_tensor({E}, 0.1, rng));
  if (config.use_extracts) {
    init_lstm(p, kSalienceForward, E, D / 2, rng);
    init_lstm(p, kSalienceBackward, E, D / 2, rng);
    init_lstm(p, kSalienceDecoder, E, D, rng);
  }
  return p;
}

Config config_of(const ParameterSet& params) {
  Config c;
  const Tensor& E = params.at(kEmbedding);
  c.vocab_size = E.rows();
  c.embedding_dim = E.cols();
  c.hidden = lstm_hidden(params, kDecoder);
  c.attention_dim = params.at("abstract.att.v").size();
  c.use_extracts = params.contains(kSalienceDecoder + ".W");
  return c;
}

Context make_context(Tape& tape, const ParameterSet& params, fusion::FusedCluster fused,
                     std::size_t output_size, double dropout) {
  for (TokenId id : fused.word_ids) {
    require(id < output_size, ErrorKind::kArgument,
            "make_context: fused word id " + std::to_string(id) + " outside output size " +
                std::to_string(output_size));
  }
  Var W_h = tape.param(params, "abstract.att.W_h");
  Var b_a = tape.param(params, "abstract.att.b_a");
  Context ctx;
  ctx.keys = add_rows(matmul(fused.word_matrix, transpose(W_h)), b_a);
  ctx.fused = std::move(fused);
  ctx.output_size = output_size;
  ctx.dropout = dropout;
  return ctx;
}

DecoderState init_state(Tape& tape, const ParameterSet& params, const Context& context,
                        std::optional<std::span<const TokenId>> extracts, Mode mode, Rng& rng) {
  const bool salience = params.contains(kSalienceDecoder + ".W");
  DecoderState state;
  const Var& d_prime = context.fused.d_prime;
  state.s = {d_prime, tape.constant(Tensor(d_prime.shape(), 0.0))};
  if (!salience) return state;

  const std::size_t hidden = lstm_hidden(params, kSalienceDecoder);
  if (!extracts) {
    state.r = lstm_zero_state(tape, hidden);
    return state;
  }
  require(!extracts->empty(), ErrorKind::kArgument,
          "init_state: extracts enabled but the selection is empty");
  Var E = tape.param(params, kEmbedding);
  const std::size_t vocab = E.value().rows();
  std::vector<Var> inputs;
  inputs.reserve(extracts->size());
  for (TokenId id : *extracts) {
    inputs.push_back(
        dropout(embedding_lookup(E, id < vocab ? id : kUnkId), context.dropout, mode, rng));
  }
  BiLstmOutput enc = bilstm(tape, params, kSalienceForward, kSalienceBackward, inputs);
  state.r = LstmState{enc.final, tape.constant(Tensor(enc.final.shape(), 0.0))};
  return state;
}

std::pair<StepOutput, DecoderState> decode_step(Tape& tape, const ParameterSet& params,
                                                const Context& context, const DecoderState& state,
                                                TokenId prev_token, Mode mode, Rng& rng) {
  require(prev_token < context.output_size, ErrorKind::kArgument,
          "decode_step: token " + std::to_string(prev_token) + " outside output size " +
              std::to_string(context.output_size));
  Var E = tape.param(params, kEmbedding);
  const std::size_t vocab = E.value().rows();
  Var x = embedding_lookup(E, prev_token < vocab ? prev_token : kUnkId);

  DecoderState next;
  next.t = state.t + 1;
  next.s = lstm_step(tape, params, kDecoder, x, state.s);
  Var s_hat = next.s.h;
  if (state.r) {
    next.r = lstm_step(tape, params, kSalienceDecoder, x, *state.r);
    s_hat = concat(next.s.h, next.r->h);
  }

  StepOutput out;
  // e_t^i = v^T tanh(W_h h'_i + W_s s_hat + b_a); keys carry W_h h'_i + b_a.
  Var query = matvec(tape.param(params, "abstract.att.W_s"), s_hat);
  Var scores = matvec(tanh(add_rows(context.keys, query)), tape.param(params, "abstract.att.v"));
  out.attention = softmax(scores);
  out.context = vecmat(out.attention, context.fused.word_matrix);

  Var projected = concat(dropout(s_hat, context.dropout, mode, rng), out.context);
  Var logits = add(matvec(tape.param(params, "abstract.gen.W_g"), projected),
                   tape.param(params, "abstract.gen.b_g"));
  out.generation = softmax(logits);

  const Var gate_terms[] = {dot(tape.param(params, "abstract.gate.v_s"), s_hat),
                            dot(tape.param(params, "abstract.gate.v_c"), out.context),
                            dot(tape.param(params, "abstract.gate.v_y"), x)};
  out.gate = sigmoid(add_n(gate_terms));

  out.copy = scatter_add(out.attention, context.fused.word_ids, context.output_size);
  Var generated = scale_by(out.gate, pad(out.generation, context.output_size));
  Var copied = scale_by(affine(out.gate, -1.0, 1.0), out.copy);
  out.distribution = add(generated, copied);
  return {out, next};
}

Var generation_loss(Tape& tape, const ParameterSet& params, const Context& context,
                    const DecoderState& initial, std::span<const TokenId> gold, Mode mode,
                    Rng& rng) {
  require(!gold.empty(), ErrorKind::kArgument, "generation_loss: empty reference");
  std::vector<Var> terms;
  terms.reserve(gold.size());
  DecoderState state = initial;
  TokenId prev = kBosId;
  for (TokenId y : gold) {
    auto [step, next] = decode_step(tape, params, context, state, prev, mode, rng);
    terms.push_back(cross_entropy(step.distribution, y));
    state = std::move(next);
    prev = y;
  }
  return add_n(terms);
}

std::vector<TokenId> gold_targets(const Review& summary) {
  require(summary.extended_ids.size() == summary.words.size(), ErrorKind::kData,
          "gold_targets: summary ids not assigned");
  std::vector<TokenId> out = summary.extended_ids;
  out.push_back(kEosId);
  return out;
}

}  // namespace opsum::abstract
