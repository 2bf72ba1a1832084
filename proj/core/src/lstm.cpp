#include "opsum/lstm.hpp"

#include "opsum/error.hpp"

namespace opsum {

void init_lstm(ParameterSet& params, const std::string& prefix, std::size_t input,
               std::size_t hidden, Rng& rng, double scale) {
  params.add(prefix + ".W", uniform_tensor({4 * hidden, input + hidden}, scale, rng));
  Tensor b({4 * hidden}, 0.0);
  for (std::size_t i = hidden; i < 2 * hidden; ++i) b[i] = 1.0;
  params.add(prefix + ".b", std::move(b));
}

std::size_t lstm_hidden(const ParameterSet& params, const std::string& prefix) {
  return params.at(prefix + ".b").size() / 4;
}

LstmState lstm_zero_state(Tape& tape, std::size_t hidden) {
  return {tape.constant(Tensor({hidden}, 0.0)), tape.constant(Tensor({hidden}, 0.0))};
}

LstmState lstm_step(Tape& tape, const ParameterSet& params, const std::string& prefix, Var x,
                    const LstmState& prev) {
  Var W = tape.param(params, prefix + ".W");
  Var b = tape.param(params, prefix + ".b");
  const std::size_t hidden = b.size() / 4;
  require(prev.h.size() == hidden && prev.c.size() == hidden, ErrorKind::kShape,
          "lstm_step(" + prefix + "): state width " + std::to_string(prev.h.size()) +
              " does not match hidden size " + std::to_string(hidden));
  Var gates = add(matvec(W, concat(x, prev.h)), b);
  Var i = sigmoid(slice(gates, 0, hidden));
  Var f = sigmoid(slice(gates, hidden, hidden));
  Var g = tanh(slice(gates, 2 * hidden, hidden));
  Var o = sigmoid(slice(gates, 3 * hidden, hidden));
  Var c = add(mul(f, prev.c), mul(i, g));
  Var h = mul(o, tanh(c));
  return {h, c};
}

BiLstmOutput bilstm(Tape& tape, const ParameterSet& params, const std::string& forward_prefix,
                    const std::string& backward_prefix, std::span<const Var> inputs) {
  require(!inputs.empty(), ErrorKind::kArgument, "bilstm: empty input sequence");
  const std::size_t n = inputs.size();
  std::vector<Var> fwd(n), bwd(n);
  LstmState s = lstm_zero_state(tape, lstm_hidden(params, forward_prefix));
  for (std::size_t i = 0; i < n; ++i) {
    s = lstm_step(tape, params, forward_prefix, inputs[i], s);
    fwd[i] = s.h;
  }
  s = lstm_zero_state(tape, lstm_hidden(params, backward_prefix));
  for (std::size_t i = n; i-- > 0;) {
    s = lstm_step(tape, params, backward_prefix, inputs[i], s);
    bwd[i] = s.h;
  }
  BiLstmOutput out;
  out.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.states.push_back(concat(fwd[i], bwd[i]));
  out.final = concat(fwd[n - 1], bwd[0]);
  return out;
}

}  // namespace opsum
