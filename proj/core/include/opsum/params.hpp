#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "opsum/tensor.hpp"

namespace opsum {

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built directly from the generator bits so the
/// stream is identical across standard library implementations.
double uniform(Rng& rng, double lo, double hi);

/// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Gradient per parameter name.
using GradMap = std::map<std::string, Tensor>;

/// Named model parameters, iterated in name order.
class ParameterSet {
 public:
  void add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);

  std::vector<std::string> names() const;
  std::size_t size() const { return params_.size(); }
  std::size_t total_values() const;

  /// Copies every parameter of `other` whose name starts with `prefix`.
  void merge(const ParameterSet& other, const std::string& prefix = "");

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::map<std::string, Tensor> params_;
};

Tensor uniform_tensor(Shape shape, double scale, Rng& rng);

}  // namespace opsum
