#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "opsum/autodiff.hpp"
#include "opsum/fusion.hpp"
#include "opsum/lstm.hpp"

namespace opsum::abstract {

/// Summary generator over a fused cluster. Parameter names carry the
/// "abstract." prefix:
///
///   embedding [V,E]            W_p [D,D]
///   dec.{W,b}                  main LSTM, hidden D, s_0 = d'
///   att.{W_h [A,D], W_s [A,S], b_a [A], v [A]}
///   gen.{W_g [V,S+D], b_g [V]}
///   gate.{v_s [S], v_c [D], v_y [E]}
///   sal_enc_fwd / sal_enc_bwd  salience BiLSTM, hidden D/2 per direction
///   sal_dec.{W,b}              salience LSTM producing r_t, hidden D
///
/// S is D without extracts and 2D with them (the output pathway reads
/// [s_t; r_t]).
struct Config {
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 128;
  /// Decoder width; must equal the Condense encoding width.
  std::size_t hidden = 256;
  std::size_t attention_dim = 256;
  bool use_extracts = true;
  double dropout = kDropoutRate;

  std::size_t state_dim() const { return use_extracts ? 2 * hidden : hidden; }
};

ParameterSet init_params(const Config& config, Rng& rng);
Config config_of(const ParameterSet& params);

struct DecoderState {
  LstmState s;
  /// Salience state; absent when the model has no extract pathway.
  std::optional<LstmState> r;
  std::size_t t = 0;
};

/// Per-cluster values reused across decoding steps.
struct Context {
  fusion::FusedCluster fused;
  /// [V, A]: W_h h'_i + b_a per fused word.
  Var keys;
  /// Base plus extended vocabulary size.
  std::size_t output_size = 0;
  /// Dropout rate used in train mode.
  double dropout = kDropoutRate;
};

Context make_context(Tape& tape, const ParameterSet& params, fusion::FusedCluster fused,
                     std::size_t output_size, double dropout = kDropoutRate);

/// s_0 = d'. With an extract-enabled model, `extracts` (the selected reviews
/// concatenated, base ids) are encoded by the salience BiLSTM and its final
/// state initializes r. Passing std::nullopt to an extract-enabled model
/// runs it with r fixed at zero; an empty span is rejected.
DecoderState init_state(Tape& tape, const ParameterSet& params, const Context& context,
                        std::optional<std::span<const TokenId>> extracts, Mode mode, Rng& rng);

struct StepOutput {
  Var attention;     // a_t over fused words
  Var context;       // c_t
  Var gate;          // sigma_t, scalar
  Var generation;    // p_g over the base vocabulary
  Var copy;          // p_c over base + extended ids
  Var distribution;  // sigma p_g + (1 - sigma) p_c over base + extended ids
};

/// One decoder step consuming `prev_token` (extended ids are fed as the
/// unknown token).
std::pair<StepOutput, DecoderState> decode_step(Tape& tape, const ParameterSet& params,
                                                const Context& context, const DecoderState& state,
                                                TokenId prev_token, Mode mode, Rng& rng);

/// Teacher-forced sum of -log p(y_t) over `gold` (cluster-level ids, the
/// caller appends the end token).
Var generation_loss(Tape& tape, const ParameterSet& params, const Context& context,
                    const DecoderState& initial, std::span<const TokenId> gold, Mode mode,
                    Rng& rng);

/// Reference ids for training: extended ids for copyable OOV words, then the
/// end-of-sequence token.
std::vector<TokenId> gold_targets(const Review& summary);

}  // namespace opsum::abstract
