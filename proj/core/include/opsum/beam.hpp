#pragma once

#include <functional>
#include <vector>

#include "opsum/vocab.hpp"

namespace opsum {

/// Default beam width and output length cap.
inline constexpr std::size_t kDefaultBeam = 5;
inline constexpr std::size_t kDefaultMaxLength = 40;

/// Step function for beam search. Decoder states live behind opaque handles
/// owned by the caller: given the handle of a prefix's state and the prefix's
/// last token, it returns log-probabilities over every output id and the
/// handle of the advanced state. -infinity marks ids that cannot be emitted.
struct BeamModel {
  std::size_t initial_state = 0;
  TokenId start_token = kBosId;
  TokenId end_token = kEosId;
  std::function<std::pair<std::vector<double>, std::size_t>(std::size_t state, TokenId prev)> step;
};

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  std::size_t state = 0;
  bool finished = false;

  /// Cumulative log-probability divided by token count.
  double normalized_score() const {
    return tokens.empty() ? 0.0 : log_prob / static_cast<double>(tokens.size());
  }
};

/// Length-normalized beam search.
///
/// Each round expands every live hypothesis over all ids, keeps the `beam`
/// best candidates by cumulative log-probability (ties: earlier parent, then
/// lower id), and retires candidates that emit the end token or reach
/// `max_length`. Returns finished hypotheses by descending normalized score
/// (ties keep retirement order).
std::vector<Hypothesis> beam_search(const BeamModel& model, std::size_t beam, std::size_t max_length);

}  // namespace opsum
