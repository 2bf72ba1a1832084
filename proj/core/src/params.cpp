#include "opsum/params.hpp"

#include "opsum/error.hpp"

namespace opsum {

double uniform(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  require(n > 0, ErrorKind::kArgument, "uniform_index over an empty range");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % n);
}

void ParameterSet::add(const std::string& name, Tensor value) {
  require(!params_.count(name), ErrorKind::kArgument,
          "duplicate parameter '" + name + "'");
  params_.emplace(name, std::move(value));
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = params_.find(name);
  require(it != params_.end(), ErrorKind::kArgument,
          "unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = params_.find(name);
  require(it != params_.end(), ErrorKind::kArgument,
          "unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParameterSet::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::size_t ParameterSet::total_values() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.size();
  return n;
}

void ParameterSet::merge(const ParameterSet& other, const std::string& prefix) {
  for (const auto& [name, t] : other.params_) {
    if (name.rfind(prefix, 0) == 0) params_[name] = t;
  }
}

Tensor uniform_tensor(Shape shape, double scale, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = uniform(rng, -scale, scale);
  return t;
}

}  // namespace opsum
