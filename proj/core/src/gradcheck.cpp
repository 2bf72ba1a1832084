#include "opsum/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "opsum/error.hpp"

namespace opsum {

namespace {

double evaluate(const LossBuilder& builder, const ParameterSet& params) {
  Tape tape;
  return builder(tape, params).value().item();
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& builder, ParameterSet params,
                           const GradCheckOptions& options) {
  PrecisionScope f64(Precision::kFloat64);

  GradMap analytic;
  double first = 0.0;
  {
    Tape tape;
    Var loss = builder(tape, params);
    first = loss.value().item();
    analytic = tape.backward(loss);
  }
  const double second = evaluate(builder, params);
  if (first != second) {
    fail(ErrorKind::kCheck, "grad_check: loss builder is not deterministic (" +
                                std::to_string(first) + " vs " + std::to_string(second) + ")");
  }

  // Flatten (parameter, index) coordinates in name order.
  std::vector<std::pair<std::string, std::size_t>> extents;
  std::size_t total = 0;
  for (const auto& [name, t] : params) {
    extents.emplace_back(name, t.size());
    total += t.size();
  }
  std::vector<std::size_t> picks;
  if (total <= options.samples) {
    picks.resize(total);
    for (std::size_t i = 0; i < total; ++i) picks[i] = i;
  } else {
    Rng rng(options.seed);
    std::set<std::size_t> chosen;
    while (chosen.size() < options.samples) chosen.insert(uniform_index(rng, total));
    picks.assign(chosen.begin(), chosen.end());
  }

  GradCheckResult result;
  result.coordinates = picks.size();
  std::size_t cursor = 0, base = 0;
  for (std::size_t flat : picks) {
    while (flat >= base + extents[cursor].second) {
      base += extents[cursor].second;
      ++cursor;
    }
    const std::string& name = extents[cursor].first;
    const std::size_t index = flat - base;
    Tensor& p = params.at(name);
    const double original = p[index];
    auto at = [&](double offset) {
      p[index] = original + offset;
      return evaluate(builder, params);
    };
    const double h = options.step;
    const double near = at(h) - at(-h);
    const double far = options.five_point ? at(2.0 * h) - at(-2.0 * h) : 0.0;
    p[index] = original;

    const double numeric = options.five_point ? (8.0 * near - far) / (12.0 * h)
                                              : near / (2.0 * h);
    auto it = analytic.find(name);
    const double a = it == analytic.end() ? 0.0 : it->second[index];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double err = std::abs(a - numeric) / denom;
    if (result.worst_parameter.empty() || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_parameter = name;
      result.worst_index = index;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace opsum
