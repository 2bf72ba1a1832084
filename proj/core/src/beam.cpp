#include "opsum/beam.hpp"

#include <algorithm>
#include <cmath>

#include "opsum/error.hpp"

namespace opsum {

namespace {

struct Candidate {
  std::size_t parent;
  TokenId token;
  double log_prob;
  std::size_t state;
};

}  // namespace

std::vector<Hypothesis> beam_search(const BeamModel& model, std::size_t beam, std::size_t max_length) {
  require(beam >= 1, ErrorKind::kArgument, "beam_search: beam must be at least 1");
  require(max_length >= 1, ErrorKind::kArgument, "beam_search: max_length must be at least 1");
  require(static_cast<bool>(model.step), ErrorKind::kArgument, "beam_search: missing step function");

  std::vector<Hypothesis> live(1);
  live[0].state = model.initial_state;
  std::vector<Hypothesis> finished;

  for (std::size_t length = 1; length <= max_length && !live.empty(); ++length) {
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < live.size(); ++h) {
      const TokenId prev = live[h].tokens.empty() ? model.start_token : live[h].tokens.back();
      auto [log_probs, next_state] = model.step(live[h].state, prev);
      for (TokenId id = 0; id < log_probs.size(); ++id) {
        if (std::isinf(log_probs[id]) && log_probs[id] < 0) continue;
        candidates.push_back({h, id, live[h].log_prob + log_probs[id], next_state});
      }
    }
    const std::size_t keep = std::min(beam, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = candidates[c];
      Hypothesis hyp;
      hyp.tokens = live[cand.parent].tokens;
      hyp.tokens.push_back(cand.token);
      hyp.log_prob = cand.log_prob;
      hyp.state = cand.state;
      hyp.finished = cand.token == model.end_token || length == max_length;
      (hyp.finished ? finished : next).push_back(std::move(hyp));
    }
    live = std::move(next);
  }

  std::stable_sort(finished.begin(), finished.end(), [](const Hypothesis& a, const Hypothesis& b) {
    return a.normalized_score() > b.normalized_score();
  });
  return finished;
}

}  // namespace opsum
