#include "opsum/tensor.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>

#include "opsum/error.hpp"

namespace opsum {

namespace {
std::atomic<Precision> g_precision{Precision::kFloat32};
}  // namespace

Precision precision() { return g_precision.load(std::memory_order_relaxed); }

void set_precision(Precision p) { g_precision.store(p, std::memory_order_relaxed); }

const char* precision_name(Precision p) {
  return p == Precision::kFloat32 ? "f32" : "f64";
}

Precision parse_precision(const std::string& name) {
  if (name == "f32" || name == "32") return Precision::kFloat32;
  if (name == "f64" || name == "64") return Precision::kFloat64;
  fail(ErrorKind::kArgument, "unknown precision '" + name + "' (expected f32 or f64)");
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::ostream& operator<<(std::ostream& out, const Tensor& t) {
  out << shape_string(t.shape()) << " {";
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? ", " : "") << t[i];
  return out << "}";
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (std::size_t extent : shape_) {
    require(extent > 0, ErrorKind::kShape,
            "tensor extents must be positive, got " + shape_string(shape_));
  }
  values_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  for (std::size_t extent : shape_) {
    require(extent > 0, ErrorKind::kShape,
            "tensor extents must be positive, got " + shape_string(shape_));
  }
  require(shape_size(shape_) == values_.size(), ErrorKind::kShape,
          "shape " + shape_string(shape_) + " does not match " +
              std::to_string(values_.size()) + " values");
}

double Tensor::item() const {
  require(values_.size() == 1, ErrorKind::kShape,
          "item() on non-scalar tensor " + shape_string(shape_));
  return values_[0];
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void Tensor::round_to_precision() {
  if (precision() != Precision::kFloat32) return;
  for (double& v : values_) v = static_cast<double>(static_cast<float>(v));
}

double dot(std::span<const double> a, std::span<const double> b) {
  // Four interleaved partial sums; the order is fixed, so results are
  // reproducible.
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace opsum
