#include "opsum/optim.hpp"

#include <cmath>

#include "opsum/error.hpp"

namespace opsum {

namespace {
constexpr double kNormSlack = 1e-12;
}  // namespace

void apply_max_norm(Tensor& matrix, double cap) {
  if (cap <= 0.0 || matrix.rank() != 2) return;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto row = matrix.row(r);
    const double norm = l2_norm(row);
    if (norm > cap * (1.0 + kNormSlack)) {
      const double scale = cap / norm;
      for (double& v : row) v *= scale;
    }
  }
}

StepReport adam_step(ParameterSet& params, const GradMap& grads,
                     OptimizerState& state, const AdamConfig& config) {
  StepReport report;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  for (const auto& [name, grad] : grads) {
    Tensor& param = params.at(name);
    require(grad.shape() == param.shape(), ErrorKind::kShape,
            "adam_step: gradient for '" + name + "' has shape " +
                shape_string(grad.shape()) + ", parameter has " +
                shape_string(param.shape()));
    if (!grad.all_finite()) {
      report.skipped_nonfinite.push_back(name);
      continue;
    }
    auto [m_it, m_new] = state.first_moment.try_emplace(name, param.shape(), 0.0);
    auto [v_it, v_new] = state.second_moment.try_emplace(name, param.shape(), 0.0);
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double g = grad[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      param[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
    param.round_to_precision();
    apply_max_norm(param, config.max_norm);
    ++report.updated;
  }
  return report;
}

void add_gradients(GradMap& into, GradMap&& g) {
  for (auto& [name, t] : g) {
    auto [it, inserted] = into.try_emplace(name, std::move(t));
    if (inserted) continue;
    require(it->second.shape() == t.shape(), ErrorKind::kShape,
            "add_gradients: shape mismatch for " + name);
    auto dst = it->second.values();
    auto src = t.values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

void scale_gradients(GradMap& grads, double factor) {
  for (auto& [_, t] : grads)
    for (double& v : t.values()) v *= factor;
}

}  // namespace opsum
