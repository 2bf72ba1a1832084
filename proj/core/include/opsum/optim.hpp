#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opsum/params.hpp"

namespace opsum {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Cap on the Euclidean norm of every weight-matrix row (<= 0 disables).
  double max_norm = 2.0;
};

struct OptimizerState {
  std::map<std::string, Tensor> first_moment;
  std::map<std::string, Tensor> second_moment;
  std::uint64_t step = 0;
};

struct StepReport {
  std::size_t updated = 0;
  /// Parameters whose gradient had NaN/Inf entries; they were left untouched.
  std::vector<std::string> skipped_nonfinite;
};

/// One bias-corrected Adam update followed by per-row max-norm clipping of
/// every updated rank-2 parameter. Parameters absent from `grads` are left
/// unchanged.
StepReport adam_step(ParameterSet& params, const GradMap& grads,
                     OptimizerState& state, const AdamConfig& config);

/// Rescales each row of a matrix whose norm exceeds `cap` down to `cap`.
/// Rows already within `cap` (up to a relative slack of 1e-12) are left
/// bitwise unchanged, which makes the constraint idempotent.
void apply_max_norm(Tensor& matrix, double cap);

/// into += g, parameter by parameter.
void add_gradients(GradMap& into, GradMap&& g);
void scale_gradients(GradMap& grads, double factor);

}  // namespace opsum
