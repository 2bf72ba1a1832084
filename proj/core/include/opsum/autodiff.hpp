#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "opsum/params.hpp"
#include "opsum/tensor.hpp"

namespace opsum {

enum class Mode { kTrain, kEval };

/// Rate used by every dropout site in the models.
inline constexpr double kDropoutRate = 0.5;

/// Probabilities below this are clamped before taking a log.
inline constexpr double kProbabilityFloor = 1e-12;

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Ordered record of primitive operations. Nodes are appended in evaluation
/// order, so every node's inputs precede it and a reverse sweep is a valid
/// topological order for backpropagation.
///
/// A tape and its nodes are confined to one thread.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Input that never receives a gradient.
  Var constant(Tensor value);
  /// Unnamed input that receives a gradient (readable via grad()).
  Var leaf(Tensor value);
  /// Named parameter leaf; repeated calls with one name share a node.
  Var param(const ParameterSet& params, const std::string& name);

  /// Appends an operation node. `kind` names the primitive in diagnostics.
  Var record(const char* kind, Tensor value, std::vector<Var> inputs,
             BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  /// Gradient accumulated during the last backward(); empty if none.
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  const Tensor& grad(Var v) const { return grad(v.id()); }
  /// Accumulation buffer for node `id`, zero-initialized on first use.
  Tensor& grad_buffer(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t input(std::size_t id, std::size_t k) const {
    return nodes_[id].inputs[k];
  }
  std::size_t input_count(std::size_t id) const { return nodes_[id].inputs.size(); }
  const std::string& kind(std::size_t id) const { return nodes_[id].kind; }

  /// Reverse sweep from a scalar loss; returns gradients of named parameters.
  GradMap backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  /// Number of probabilities clamped at kProbabilityFloor so far.
  std::size_t clamp_events() const { return clamp_events_; }
  void note_clamp() { ++clamp_events_; }

 private:
  struct Node {
    std::string kind;
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    std::string param_name;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> param_nodes_;
  std::size_t clamp_events_ = 0;
};

// ---------------------------------------------------------------------------
// Primitives. Each validates shapes (throwing ErrorKind::kShape with the
// primitive name and offending shapes) and rejects non-finite results.
// ---------------------------------------------------------------------------

/// [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
/// [m,k] x [k] -> [m]
Var matvec(Var a, Var x);
/// [m] x [m,n] -> [n], i.e. x^T A.
Var vecmat(Var x, Var a);
/// [m,n] -> [n,m]
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// Adds vector `b` to every row of matrix `a`.
Var add_rows(Var a, Var b);
/// alpha * x + beta, elementwise.
Var affine(Var x, double alpha, double beta = 0.0);
/// Multiplies every entry of `x` by the scalar node `s`.
Var scale_by(Var s, Var x);
/// Sum of same-shaped nodes.
Var add_n(std::span<const Var> terms);

Var concat(std::span<const Var> parts);
Var concat(Var a, Var b);
Var slice(Var x, std::size_t offset, std::size_t length);
/// Stacks equal-length vectors as matrix rows.
Var stack(std::span<const Var> rows);
/// Extends a vector with trailing zeros to `length`.
Var pad(Var x, std::size_t length);
/// out[index[i]] += x[i] over an output of `length` entries.
Var scatter_add(Var x, std::vector<std::size_t> index, std::size_t length);

Var tanh(Var x);
Var sigmoid(Var x);
Var relu(Var x);
/// Softmax over the last axis (each row of a matrix).
Var softmax(Var x);

Var dot(Var a, Var b);
Var sum(Var x);

/// Row `id` of an embedding matrix.
Var embedding_lookup(Var table, std::size_t id);
/// -log max(p[target], kProbabilityFloor) for a probability vector.
Var cross_entropy(Var probabilities, std::size_t target);
/// Inverted dropout: identity in eval mode; in train mode zeroes entries
/// with probability `rate` and scales survivors by 1/(1-rate).
Var dropout(Var x, double rate, Mode mode, Rng& rng);

}  // namespace opsum
