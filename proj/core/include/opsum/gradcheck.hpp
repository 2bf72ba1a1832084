#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "opsum/autodiff.hpp"

namespace opsum {

/// Builds a scalar loss on `tape` from `params`. Must be deterministic.
using LossBuilder = std::function<Var(Tape& tape, const ParameterSet& params)>;

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates checked; every coordinate when the model is smaller.
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  /// Adds the +-2h points, cancelling the h^2 truncation term. Lets a larger
  /// step be used where round-off in a large loss would swamp small gradients.
  bool five_point = false;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares reverse-mode gradients with central differences at 64-bit
/// precision. Relative error per coordinate is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
///
/// Throws ErrorKind::kCheck when two forward passes of the builder disagree.
GradCheckResult grad_check(const LossBuilder& builder, ParameterSet params,
                           const GradCheckOptions& options = {});

}  // namespace opsum
