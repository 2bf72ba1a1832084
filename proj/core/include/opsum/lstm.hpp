#pragma once

#include <span>
#include <string>
#include <vector>

#include "opsum/autodiff.hpp"

namespace opsum {

struct LstmState {
  Var h;
  Var c;
};

/// Adds "<prefix>.W" [4H, input+H] and "<prefix>.b" [4H]. Gate order is
/// input, forget, candidate, output; the forget bias starts at 1.
void init_lstm(ParameterSet& params, const std::string& prefix, std::size_t input,
               std::size_t hidden, Rng& rng, double scale = 0.1);

/// Hidden size of the cell stored under `prefix`.
std::size_t lstm_hidden(const ParameterSet& params, const std::string& prefix);

LstmState lstm_zero_state(Tape& tape, std::size_t hidden);

LstmState lstm_step(Tape& tape, const ParameterSet& params, const std::string& prefix, Var x,
                    const LstmState& prev);

struct BiLstmOutput {
  /// [forward_i; backward_i] per position.
  std::vector<Var> states;
  /// [forward_last; backward_first].
  Var final;
};

BiLstmOutput bilstm(Tape& tape, const ParameterSet& params, const std::string& forward_prefix,
                    const std::string& backward_prefix, std::span<const Var> inputs);

}  // namespace opsum
