#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opsum::selfcheck {

// Each check draws its random instances from `seed` and returns plain
// numbers, so repeated runs can be compared value by value.

/// Worst gradient-check relative error over `instances` random problems.
double condense_gradient_error(std::size_t instances, std::uint64_t seed);
double fusion_gradient_error(std::size_t instances, std::uint64_t seed);
/// Full Abstract loss (generation plus fusion) with extracts enabled.
double abstract_gradient_error(std::size_t instances, std::uint64_t seed);

struct DistributionStats {
  std::size_t steps = 0;
  /// Largest |sum - 1| over attention, copy and final distributions.
  double max_sum_error = 0.0;
  double min_entry = 0.0;
  double min_gate = 1.0;
  double max_gate = 0.0;
  bool valid() const {
    return max_sum_error <= 1e-6 && min_entry >= 0.0 && min_gate > 0.0 && max_gate < 1.0;
  }
};

/// Random decode steps on random small models, with and without extracts.
DistributionStats decode_distributions(std::size_t steps, std::uint64_t seed);

struct OracleStats {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
};

/// Beam search at width vocab^max_len against exhaustive enumeration.
OracleStats beam_oracle(std::size_t models, std::uint64_t seed);
/// ROUGE-1/2/L/SU4 on every ordered pair of sequences up to max_length.
OracleStats rouge_oracle(std::uint32_t alphabet, std::size_t max_length);
/// Centroid selection against a full distance sort.
OracleStats extraction_oracle(std::size_t instances, std::size_t max_reviews, std::uint64_t seed);

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// A quick version of every check above.
std::vector<CheckLine> run_all(std::uint64_t seed);

}  // namespace opsum::selfcheck
