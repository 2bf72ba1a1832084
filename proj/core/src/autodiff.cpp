#include "opsum/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "opsum/error.hpp"

namespace opsum {

namespace {

[[noreturn]] void shape_error(const char* kind, const Shape& a) {
  fail(ErrorKind::kShape, std::string(kind) + ": unsupported shape " + shape_string(a));
}

[[noreturn]] void shape_error(const char* kind, const Shape& a, const Shape& b) {
  fail(ErrorKind::kShape, std::string(kind) + ": incompatible shapes " +
                              shape_string(a) + " and " + shape_string(b));
}

void check_same_tape(const Var& a, const Var& b, const char* kind) {
  require(a.valid() && b.valid() && &a.tape() == &b.tape(), ErrorKind::kArgument,
          std::string(kind) + ": operands belong to different tapes");
}

bool is_vector(const Tensor& t) { return t.rank() == 1; }
bool is_matrix(const Tensor& t) { return t.rank() == 2; }

// Accumulates `scale * src` into the gradient of input `k` of node `self`.
void accumulate(Tape& tape, std::size_t self, std::size_t k, const Tensor& src,
                double scale = 1.0) {
  const std::size_t in = tape.input(self, k);
  if (!tape.requires_grad(in)) return;
  auto dst = tape.grad_buffer(in).values();
  auto s = src.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * s[i];
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::push(Node node) {
  node.value.round_to_precision();
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  require(value.all_finite(), ErrorKind::kNumeric, "constant: non-finite input");
  Node n;
  n.kind = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  require(value.all_finite(), ErrorKind::kNumeric, "leaf: non-finite input");
  Node n;
  n.kind = "leaf";
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(const ParameterSet& params, const std::string& name) {
  if (auto it = param_nodes_.find(name); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  const Tensor& t = params.at(name);
  require(t.all_finite(), ErrorKind::kNumeric,
          "param: parameter '" + name + "' is not finite");
  Node n;
  n.kind = "param";
  n.value = t;
  n.requires_grad = true;
  n.param_name = name;
  Var v = push(std::move(n));
  param_nodes_.emplace(name, v.id());
  return v;
}

Var Tape::record(const char* kind, Tensor value, std::vector<Var> inputs,
                 BackwardFn backward) {
  if (!value.all_finite()) {
    fail(ErrorKind::kNumeric,
         std::string(kind) + ": non-finite output of shape " + shape_string(value.shape()));
  }
  Node n;
  n.kind = kind;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    require(v.valid() && &v.tape() == this, ErrorKind::kArgument,
            std::string(kind) + ": input from a different tape");
    n.inputs.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

GradMap Tape::backward(Var loss) {
  require(loss.valid() && &loss.tape() == this, ErrorKind::kArgument,
          "backward: loss is not on this tape");
  require(loss.size() == 1, ErrorKind::kShape,
          "backward: loss must be a scalar, got " + shape_string(loss.shape()));
  for (Node& n : nodes_) n.grad = Tensor();
  GradMap grads;
  if (!nodes_[loss.id()].requires_grad) return grads;

  grad_buffer(loss.id()).fill(1.0);
  const bool round = precision() == Precision::kFloat32;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad.empty() || !n.backward) continue;
    // Every consumer of this node has run, so its gradient is complete.
    if (round) n.grad.round_to_precision();
    n.backward(*this, id);
  }
  for (Node& n : nodes_) {
    if (n.param_name.empty()) continue;
    if (round && !n.grad.empty()) n.grad.round_to_precision();
    grads.emplace(n.param_name,
                  n.grad.empty() ? Tensor(n.value.shape(), 0.0) : n.grad);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

Var matmul(Var a, Var b) {
  check_same_tape(a, b, "matmul");
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!is_matrix(A) || !is_matrix(B) || A.cols() != B.rows()) {
    shape_error("matmul", A.shape(), B.shape());
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor out({m, n}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto orow = out.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A.at(i, p);
      auto brow = B.row(p);
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return a.tape().record("matmul", std::move(out), {a, b}, [m, k, n](Tape& t, std::size_t self) {
    const Tensor& G = t.grad(self);
    const std::size_t ia = t.input(self, 0), ib = t.input(self, 1);
    const Tensor& A = t.value(ia);
    const Tensor& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Tensor& dA = t.grad_buffer(ia);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) dA.at(i, p) += dot(G.row(i), B.row(p));
    }
    if (t.requires_grad(ib)) {
      Tensor& dB = t.grad_buffer(ib);
      for (std::size_t i = 0; i < m; ++i) {
        auto grow = G.row(i);
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A.at(i, p);
          auto drow = dB.row(p);
          for (std::size_t j = 0; j < n; ++j) drow[j] += aip * grow[j];
        }
      }
    }
  });
}

Var matvec(Var a, Var x) {
  check_same_tape(a, x, "matvec");
  const Tensor& A = a.value();
  const Tensor& X = x.value();
  if (!is_matrix(A) || !is_vector(X) || A.cols() != X.size()) {
    shape_error("matvec", A.shape(), X.shape());
  }
  const std::size_t m = A.rows(), k = A.cols();
  Tensor out({m}, 0.0);
  for (std::size_t i = 0; i < m; ++i) out[i] = dot(A.row(i), X.values());
  return a.tape().record("matvec", std::move(out), {a, x}, [m, k](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const std::size_t ia = t.input(self, 0), ix = t.input(self, 1);
    const Tensor& A = t.value(ia);
    const Tensor& X = t.value(ix);
    if (t.requires_grad(ia)) {
      Tensor& dA = t.grad_buffer(ia);
      auto xv = X.values();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        auto drow = dA.row(i);
        for (std::size_t j = 0; j < k; ++j) drow[j] += gi * xv[j];
      }
    }
    if (t.requires_grad(ix)) {
      auto dx = t.grad_buffer(ix).values();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        auto arow = A.row(i);
        for (std::size_t j = 0; j < k; ++j) dx[j] += gi * arow[j];
      }
    }
  });
}

Var vecmat(Var x, Var a) {
  check_same_tape(x, a, "vecmat");
  const Tensor& X = x.value();
  const Tensor& A = a.value();
  if (!is_vector(X) || !is_matrix(A) || A.rows() != X.size()) {
    shape_error("vecmat", X.shape(), A.shape());
  }
  const std::size_t m = A.rows(), n = A.cols();
  Tensor out({n}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    auto arow = A.row(i);
    for (std::size_t j = 0; j < n; ++j) out[j] += X[i] * arow[j];
  }
  return x.tape().record("vecmat", std::move(out), {x, a}, [m, n](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const std::size_t ix = t.input(self, 0), ia = t.input(self, 1);
    const Tensor& X = t.value(ix);
    const Tensor& A = t.value(ia);
    if (t.requires_grad(ix)) {
      auto dx = t.grad_buffer(ix).values();
      for (std::size_t i = 0; i < m; ++i) dx[i] += dot(A.row(i), g.values());
    }
    if (t.requires_grad(ia)) {
      Tensor& dA = t.grad_buffer(ia);
      for (std::size_t i = 0; i < m; ++i) {
        auto drow = dA.row(i);
        for (std::size_t j = 0; j < n; ++j) drow[j] += X[i] * g[j];
      }
    }
  });
}

Var transpose(Var a) {
  const Tensor& A = a.value();
  if (!is_matrix(A)) shape_error("transpose", A.shape());
  const std::size_t m = A.rows(), n = A.cols();
  Tensor out({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = A.at(i, j);
  return a.tape().record("transpose", std::move(out), {a}, [m, n](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& G = t.grad(self);
    Tensor& D = t.grad_buffer(in);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) D.at(i, j) += G.at(j, i);
  });
}

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

Var add(Var a, Var b) {
  check_same_tape(a, b, "add");
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  Tensor out = a.value();
  auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.tape().record("add", std::move(out), {a, b}, [](Tape& t, std::size_t self) {
    accumulate(t, self, 0, t.grad(self));
    accumulate(t, self, 1, t.grad(self));
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b, "sub");
  if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
  Tensor out = a.value();
  auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.tape().record("sub", std::move(out), {a, b}, [](Tape& t, std::size_t self) {
    accumulate(t, self, 0, t.grad(self));
    accumulate(t, self, 1, t.grad(self), -1.0);
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b, "mul");
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  Tensor out = a.value();
  auto bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.tape().record("mul", std::move(out), {a, b}, [](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const std::size_t ia = t.input(self, 0), ib = t.input(self, 1);
    if (t.requires_grad(ia)) {
      auto da = t.grad_buffer(ia).values();
      auto bv = t.value(ib).values();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      auto db = t.grad_buffer(ib).values();
      auto av = t.value(ia).values();
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += g[i] * av[i];
    }
  });
}

Var add_rows(Var a, Var b) {
  check_same_tape(a, b, "add_rows");
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!is_matrix(A) || !is_vector(B) || A.cols() != B.size()) {
    shape_error("add_rows", A.shape(), B.shape());
  }
  Tensor out = A;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += B[j];
  }
  return a.tape().record("add_rows", std::move(out), {a, b}, [](Tape& t, std::size_t self) {
    const Tensor& G = t.grad(self);
    accumulate(t, self, 0, G);
    const std::size_t ib = t.input(self, 1);
    if (t.requires_grad(ib)) {
      auto db = t.grad_buffer(ib).values();
      for (std::size_t r = 0; r < G.rows(); ++r) {
        auto grow = G.row(r);
        for (std::size_t j = 0; j < db.size(); ++j) db[j] += grow[j];
      }
    }
  });
}

Var affine(Var x, double alpha, double beta) {
  Tensor out = x.value();
  for (double& v : out.values()) v = alpha * v + beta;
  return x.tape().record("affine", std::move(out), {x}, [alpha](Tape& t, std::size_t self) {
    accumulate(t, self, 0, t.grad(self), alpha);
  });
}

Var scale_by(Var s, Var x) {
  check_same_tape(s, x, "scale_by");
  if (s.size() != 1) shape_error("scale_by", s.shape(), x.shape());
  const double sv = s.value()[0];
  Tensor out = x.value();
  for (double& v : out.values()) v *= sv;
  return x.tape().record("scale_by", std::move(out), {s, x}, [](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const std::size_t is = t.input(self, 0), ix = t.input(self, 1);
    if (t.requires_grad(is)) {
      t.grad_buffer(is)[0] += dot(g.values(), t.value(ix).values());
    }
    accumulate(t, self, 1, g, t.value(is)[0]);
  });
}

Var add_n(std::span<const Var> terms) {
  require(!terms.empty(), ErrorKind::kArgument, "add_n: no terms");
  Tensor out = terms[0].value();
  std::vector<Var> inputs(terms.begin(), terms.end());
  for (std::size_t k = 1; k < terms.size(); ++k) {
    check_same_tape(terms[0], terms[k], "add_n");
    if (terms[k].shape() != out.shape()) shape_error("add_n", out.shape(), terms[k].shape());
    auto v = terms[k].value().values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  const std::size_t count = terms.size();
  return terms[0].tape().record("add_n", std::move(out), std::move(inputs),
                                [count](Tape& t, std::size_t self) {
                                  for (std::size_t k = 0; k < count; ++k)
                                    accumulate(t, self, k, t.grad(self));
                                });
}

// ---------------------------------------------------------------------------
// Structural
// ---------------------------------------------------------------------------

Var concat(std::span<const Var> parts) {
  require(!parts.empty(), ErrorKind::kArgument, "concat: no parts");
  std::vector<double> out;
  std::vector<std::size_t> lengths;
  for (const Var& p : parts) {
    check_same_tape(parts[0], p, "concat");
    if (!is_vector(p.value())) shape_error("concat", p.shape());
    auto v = p.value().values();
    out.insert(out.end(), v.begin(), v.end());
    lengths.push_back(v.size());
  }
  return parts[0].tape().record(
      "concat", Tensor::vector(std::move(out)), std::vector<Var>(parts.begin(), parts.end()),
      [lengths](Tape& t, std::size_t self) {
        const Tensor& g = t.grad(self);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < lengths.size(); ++k) {
          const std::size_t in = t.input(self, k);
          if (t.requires_grad(in)) {
            auto d = t.grad_buffer(in).values();
            for (std::size_t i = 0; i < lengths[k]; ++i) d[i] += g[offset + i];
          }
          offset += lengths[k];
        }
      });
}

Var concat(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat(parts);
}

Var slice(Var x, std::size_t offset, std::size_t length) {
  const Tensor& X = x.value();
  if (!is_vector(X) || length == 0 || offset + length > X.size()) {
    fail(ErrorKind::kShape, "slice: range [" + std::to_string(offset) + ", " +
                                std::to_string(offset + length) + ") outside " +
                                shape_string(X.shape()));
  }
  std::vector<double> out(X.values().begin() + offset,
                          X.values().begin() + offset + length);
  return x.tape().record("slice", Tensor::vector(std::move(out)), {x},
                         [offset](Tape& t, std::size_t self) {
                           const std::size_t in = t.input(self, 0);
                           if (!t.requires_grad(in)) return;
                           const Tensor& g = t.grad(self);
                           auto d = t.grad_buffer(in).values();
                           for (std::size_t i = 0; i < g.size(); ++i) d[offset + i] += g[i];
                         });
}

Var stack(std::span<const Var> rows) {
  require(!rows.empty(), ErrorKind::kArgument, "stack: no rows");
  const std::size_t width = rows[0].size();
  std::vector<double> out;
  out.reserve(rows.size() * width);
  for (const Var& r : rows) {
    check_same_tape(rows[0], r, "stack");
    if (!is_vector(r.value()) || r.size() != width) shape_error("stack", rows[0].shape(), r.shape());
    auto v = r.value().values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return rows[0].tape().record(
      "stack", Tensor::matrix(rows.size(), width, std::move(out)),
      std::vector<Var>(rows.begin(), rows.end()), [](Tape& t, std::size_t self) {
        const Tensor& G = t.grad(self);
        for (std::size_t r = 0; r < G.rows(); ++r) {
          const std::size_t in = t.input(self, r);
          if (!t.requires_grad(in)) continue;
          auto d = t.grad_buffer(in).values();
          auto grow = G.row(r);
          for (std::size_t j = 0; j < d.size(); ++j) d[j] += grow[j];
        }
      });
}

Var pad(Var x, std::size_t length) {
  const Tensor& X = x.value();
  if (!is_vector(X) || length < X.size()) shape_error("pad", X.shape(), Shape{length});
  std::vector<double> out(length, 0.0);
  std::copy(X.values().begin(), X.values().end(), out.begin());
  return x.tape().record("pad", Tensor::vector(std::move(out)), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& g = t.grad(self);
    auto d = t.grad_buffer(in).values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
  });
}

Var scatter_add(Var x, std::vector<std::size_t> index, std::size_t length) {
  const Tensor& X = x.value();
  if (!is_vector(X) || index.size() != X.size()) {
    shape_error("scatter_add", X.shape(), Shape{index.size()});
  }
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    require(index[i] < length, ErrorKind::kShape,
            "scatter_add: index " + std::to_string(index[i]) + " outside length " +
                std::to_string(length));
    out[index[i]] += X[i];
  }
  return x.tape().record("scatter_add", Tensor::vector(std::move(out)), {x},
                         [index = std::move(index)](Tape& t, std::size_t self) {
                           const std::size_t in = t.input(self, 0);
                           if (!t.requires_grad(in)) return;
                           const Tensor& g = t.grad(self);
                           auto d = t.grad_buffer(in).values();
                           for (std::size_t i = 0; i < index.size(); ++i) d[i] += g[index[i]];
                         });
}

// ---------------------------------------------------------------------------
// Nonlinearities
// ---------------------------------------------------------------------------

Var tanh(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::tanh(v);
  return x.tape().record("tanh", std::move(out), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    auto d = t.grad_buffer(in).values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var sigmoid(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) {
    v = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return x.tape().record("sigmoid", std::move(out), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    auto d = t.grad_buffer(in).values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::max(v, 0.0);
  return x.tape().record("relu", std::move(out), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& g = t.grad(self);
    const Tensor& X = t.value(in);
    auto d = t.grad_buffer(in).values();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (X[i] > 0.0) d[i] += g[i];
    }
  });
}

Var softmax(Var x) {
  const Tensor& X = x.value();
  if (X.rank() < 1 || X.rank() > 2) shape_error("softmax", X.shape());
  Tensor out = X;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return x.tape().record("softmax", std::move(out), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const Tensor& G = t.grad(self);
    const Tensor& Y = t.value(self);
    Tensor& D = t.grad_buffer(in);
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      auto g = G.row(r);
      auto y = Y.row(r);
      auto d = D.row(r);
      const double gy = dot(g, y);
      for (std::size_t i = 0; i < y.size(); ++i) d[i] += y[i] * (g[i] - gy);
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions and lookups
// ---------------------------------------------------------------------------

Var dot(Var a, Var b) {
  check_same_tape(a, b, "dot");
  if (a.shape() != b.shape()) shape_error("dot", a.shape(), b.shape());
  const double v = dot(a.value().values(), b.value().values());
  return a.tape().record("dot", Tensor::scalar(v), {a, b}, [](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    const std::size_t ia = t.input(self, 0), ib = t.input(self, 1);
    accumulate(t, self, 0, t.value(ib), g);
    accumulate(t, self, 1, t.value(ia), g);
  });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return x.tape().record("sum", Tensor::scalar(total), {x}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.input(self, 0);
    if (!t.requires_grad(in)) return;
    const double g = t.grad(self)[0];
    for (double& d : t.grad_buffer(in).values()) d += g;
  });
}

Var embedding_lookup(Var table, std::size_t id) {
  const Tensor& E = table.value();
  if (!is_matrix(E)) shape_error("embedding_lookup", E.shape());
  require(id < E.rows(), ErrorKind::kShape,
          "embedding_lookup: id " + std::to_string(id) + " outside table " +
              shape_string(E.shape()));
  auto r = E.row(id);
  return table.tape().record("embedding_lookup",
                             Tensor::vector(std::vector<double>(r.begin(), r.end())), {table},
                             [id](Tape& t, std::size_t self) {
                               const std::size_t in = t.input(self, 0);
                               if (!t.requires_grad(in)) return;
                               const Tensor& g = t.grad(self);
                               auto d = t.grad_buffer(in).row(id);
                               for (std::size_t j = 0; j < d.size(); ++j) d[j] += g[j];
                             });
}

Var cross_entropy(Var probabilities, std::size_t target) {
  const Tensor& P = probabilities.value();
  if (!is_vector(P)) shape_error("cross_entropy", P.shape());
  require(target < P.size(), ErrorKind::kShape,
          "cross_entropy: target " + std::to_string(target) + " outside " +
              shape_string(P.shape()));
  const double p = P[target];
  const bool clamped = p < kProbabilityFloor;
  if (clamped) probabilities.tape().note_clamp();
  const double loss = -std::log(clamped ? kProbabilityFloor : p);
  return probabilities.tape().record(
      "cross_entropy", Tensor::scalar(loss), {probabilities},
      [target, clamped](Tape& t, std::size_t self) {
        const std::size_t in = t.input(self, 0);
        if (clamped || !t.requires_grad(in)) return;
        const double g = t.grad(self)[0];
        t.grad_buffer(in)[target] += -g / t.value(in)[target];
      });
}

Var dropout(Var x, double rate, Mode mode, Rng& rng) {
  require(rate >= 0.0 && rate < 1.0, ErrorKind::kArgument, "dropout: rate must be in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = uniform(rng, 0.0, 1.0) < rate ? 0.0 : keep_scale;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return x.tape().record("dropout", std::move(out), {x},
                         [mask = std::move(mask)](Tape& t, std::size_t self) {
                           const std::size_t in = t.input(self, 0);
                           if (!t.requires_grad(in)) return;
                           const Tensor& g = t.grad(self);
                           auto d = t.grad_buffer(in).values();
                           for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * mask[i];
                         });
}

}  // namespace opsum
