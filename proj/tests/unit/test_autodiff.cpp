#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "opsum/autodiff.hpp"
#include "opsum/error.hpp"
#include "opsum/gradcheck.hpp"

using namespace opsum;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return uniform_tensor(std::move(shape), scale, rng);
}

// Checks d/dparams of sum(w * op(params)) for a fixed random weighting w.
double primitive_error(ParameterSet params, const std::function<Var(Tape&, const ParameterSet&)>& op) {
  PrecisionScope scope(Precision::kFloat64);
  auto builder = [&op](Tape& tape, const ParameterSet& p) {
    Var out = op(tape, p);
    Var w = tape.constant(random_tensor(out.shape(), 99));
    return sum(mul(out, w));
  };
  return grad_check(builder, std::move(params)).max_relative_error;
}

ParameterSet one(const std::string& name, Tensor t) {
  ParameterSet p;
  p.add(name, std::move(t));
  return p;
}

ParameterSet two(Tensor a, Tensor b) {
  ParameterSet p;
  p.add("a", std::move(a));
  p.add("b", std::move(b));
  return p;
}

}  // namespace

TEST(Autodiff, SoftmaxOfEqualLogitsIsUniform) {
  Tape tape;
  Var p = softmax(tape.constant(Tensor({3}, 0.0)));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.value()[i], 1.0 / 3.0, 1e-7);
}

TEST(Autodiff, SoftmaxRowsSumToOneAndShiftInvariant) {
  Tape tape;
  Tensor logits = random_tensor({4, 7}, 1, 5.0);
  Tensor shifted = logits;
  for (double& v : shifted.values()) v += 3.25;
  Var a = softmax(tape.constant(logits));
  Var b = softmax(tape.constant(shifted));
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0.0;
    std::size_t arg_a = 0, arg_b = 0;
    for (std::size_t c = 0; c < 7; ++c) {
      s += a.value().at(r, c);
      EXPECT_GE(a.value().at(r, c), 0.0);
      if (a.value().at(r, c) > a.value().at(r, arg_a)) arg_a = c;
      if (b.value().at(r, c) > b.value().at(r, arg_b)) arg_b = c;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
    EXPECT_EQ(arg_a, arg_b);
  }
}

TEST(Autodiff, MatmulByIdentity) {
  PrecisionScope scope(Precision::kFloat64);
  Tape tape;
  Tensor eye({3, 3}, 0.0);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  Tensor A = random_tensor({3, 4}, 2);
  EXPECT_EQ(matmul(tape.constant(eye), tape.constant(A)).value(), A);
}

TEST(Autodiff, SumGradientIsOnes) {
  ParameterSet p = one("w", random_tensor({5}, 3));
  Tape tape;
  GradMap g = tape.backward(sum(tape.param(p, "w")));
  EXPECT_EQ(g.at("w"), Tensor({5}, 1.0));
}

TEST(Autodiff, DotWithSelfGradientIsTwiceW) {
  PrecisionScope scope(Precision::kFloat64);
  ParameterSet p = one("w", random_tensor({4}, 4));
  Tape tape;
  Var w = tape.param(p, "w");
  GradMap g = tape.backward(dot(w, w));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.at("w")[i], 2.0 * p.at("w")[i]);
}

TEST(Autodiff, CrossEntropyOfSoftmaxGradient) {
  PrecisionScope scope(Precision::kFloat64);
  ParameterSet p = one("logits", random_tensor({6}, 5, 2.0));
  Tape tape;
  Var probs = softmax(tape.param(p, "logits"));
  GradMap g = tape.backward(cross_entropy(probs, 2));
  for (std::size_t i = 0; i < 6; ++i) {
    const double expected = probs.value()[i] - (i == 2 ? 1.0 : 0.0);
    EXPECT_NEAR(g.at("logits")[i], expected, 1e-12);
  }
}

TEST(Autodiff, CrossEntropyClampsZeroProbability) {
  Tape tape;
  Var p = tape.constant(Tensor::vector({1.0, 0.0}));
  Var loss = cross_entropy(p, 1);
  EXPECT_NEAR(loss.value().item(), -std::log(kProbabilityFloor), 1e-6);
  EXPECT_EQ(tape.clamp_events(), 1u);
}

TEST(Autodiff, BackwardRejectsNonScalar) {
  ParameterSet p = one("w", random_tensor({3}, 6));
  Tape tape;
  EXPECT_THROW(tape.backward(tape.param(p, "w")), Error);
}

TEST(Autodiff, ConstantsGetNoGradient) {
  ParameterSet p = one("w", random_tensor({3}, 7));
  Tape tape;
  Var c = tape.constant(random_tensor({3}, 8));
  GradMap g = tape.backward(dot(tape.param(p, "w"), c));
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(tape.grad(c).empty());
}

TEST(Autodiff, ShapeErrorsNameThePrimitive) {
  Tape tape;
  try {
    matmul(tape.constant(Tensor({2, 3})), tape.constant(Tensor({2, 3})));
    FAIL() << "expected a shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
    EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[2x3]"), std::string::npos);
  }
  EXPECT_THROW(add(tape.constant(Tensor({2})), tape.constant(Tensor({3}))), Error);
}

TEST(Autodiff, NaNInputIsRejected) {
  Tape tape;
  Tensor bad = Tensor::vector({1.0, std::nan("")});
  try {
    tanh(tape.constant(bad));
    FAIL() << "expected a numeric error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(Autodiff, DropoutIdentityInEvalAndScaledInTrain) {
  PrecisionScope scope(Precision::kFloat64);
  Tape tape;
  Rng rng(1);
  Tensor x = random_tensor({1000}, 9);
  EXPECT_EQ(dropout(tape.constant(x), 0.5, Mode::kEval, rng).value(), x);
  Var y = dropout(tape.constant(x), 0.5, Mode::kTrain, rng);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y.value()[i] == 0.0) continue;
    ++kept;
    EXPECT_FLOAT_EQ(y.value()[i], 2.0 * x[i]);
  }
  EXPECT_GT(kept, 400u);
  EXPECT_LT(kept, 600u);
}

TEST(Autodiff, ReplayIsBitwiseIdentical) {
  ParameterSet p = one("w", random_tensor({4, 4}, 10));
  auto run = [&p] {
    Tape tape;
    Var w = tape.param(p, "w");
    Var h = tanh(matvec(w, tape.constant(random_tensor({4}, 11))));
    Var loss = cross_entropy(softmax(h), 1);
    return std::make_pair(loss.value(), tape.backward(loss));
  };
  EXPECT_EQ(run(), run());
}

TEST(AutodiffGrad, Matmul) {
  EXPECT_LE(primitive_error(two(random_tensor({3, 4}, 1), random_tensor({4, 2}, 2)),
                            [](Tape& t, const ParameterSet& p) {
                              return matmul(t.param(p, "a"), t.param(p, "b"));
                            }),
            1e-6);
}

TEST(AutodiffGrad, MatvecAndVecmat) {
  EXPECT_LE(primitive_error(two(random_tensor({3, 4}, 1), random_tensor({4}, 2)),
                            [](Tape& t, const ParameterSet& p) {
                              return matvec(t.param(p, "a"), t.param(p, "b"));
                            }),
            1e-6);
  EXPECT_LE(primitive_error(two(random_tensor({3}, 1), random_tensor({3, 4}, 2)),
                            [](Tape& t, const ParameterSet& p) {
                              return vecmat(t.param(p, "a"), t.param(p, "b"));
                            }),
            1e-6);
}

TEST(AutodiffGrad, ElementwiseAndActivations) {
  auto pair = two(random_tensor({5}, 1), random_tensor({5}, 2));
  using Op = std::function<Var(Tape&, const ParameterSet&)>;
  const std::vector<Op> ops = {
      [](Tape& t, const ParameterSet& p) { return add(t.param(p, "a"), t.param(p, "b")); },
      [](Tape& t, const ParameterSet& p) { return sub(t.param(p, "a"), t.param(p, "b")); },
      [](Tape& t, const ParameterSet& p) { return mul(t.param(p, "a"), t.param(p, "b")); },
      [](Tape& t, const ParameterSet& p) { return tanh(t.param(p, "a")); },
      [](Tape& t, const ParameterSet& p) { return sigmoid(t.param(p, "a")); },
      [](Tape& t, const ParameterSet& p) { return softmax(t.param(p, "a")); },
      [](Tape& t, const ParameterSet& p) { return affine(t.param(p, "a"), -2.0, 0.5); },
      [](Tape& t, const ParameterSet& p) {
        return scale_by(sum(t.param(p, "a")), t.param(p, "b"));
      },
      [](Tape& t, const ParameterSet& p) { return concat(t.param(p, "a"), t.param(p, "b")); },
      [](Tape& t, const ParameterSet& p) { return slice(t.param(p, "a"), 1, 3); },
      [](Tape& t, const ParameterSet& p) { return pad(t.param(p, "a"), 8); },
      [](Tape& t, const ParameterSet& p) {
        return scatter_add(t.param(p, "a"), {0, 2, 2, 1, 0}, 4);
      },
      [](Tape& t, const ParameterSet& p) {
        const Var terms[] = {t.param(p, "a"), t.param(p, "b"), t.param(p, "a")};
        return add_n(terms);
      },
      [](Tape& t, const ParameterSet& p) {
        const Var rows[] = {t.param(p, "a"), t.param(p, "b")};
        return stack(rows);
      },
  };
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_LE(primitive_error(pair, ops[i]), 1e-6) << "op " << i;
  }
}

TEST(AutodiffGrad, ReluAwayFromKink) {
  Tensor x = Tensor::vector({-1.0, 0.5, 2.0, -0.3});
  EXPECT_LE(primitive_error(one("a", x),
                            [](Tape& t, const ParameterSet& p) { return relu(t.param(p, "a")); }),
            1e-8);
}

TEST(AutodiffGrad, MatrixOps) {
  auto p = two(random_tensor({3, 4}, 1), random_tensor({4}, 2));
  EXPECT_LE(primitive_error(p, [](Tape& t, const ParameterSet& q) { return transpose(t.param(q, "a")); }),
            1e-8);
  EXPECT_LE(primitive_error(p, [](Tape& t, const ParameterSet& q) {
              return add_rows(t.param(q, "a"), t.param(q, "b"));
            }),
            1e-8);
  EXPECT_LE(primitive_error(p, [](Tape& t, const ParameterSet& q) {
              return softmax(t.param(q, "a"));
            }),
            1e-6);
  EXPECT_LE(primitive_error(p, [](Tape& t, const ParameterSet& q) {
              return embedding_lookup(t.param(q, "a"), 2);
            }),
            1e-8);
}

TEST(AutodiffGrad, CrossEntropy) {
  auto p = one("a", random_tensor({6}, 3, 2.0));
  PrecisionScope scope(Precision::kFloat64);
  auto builder = [](Tape& t, const ParameterSet& q) {
    return cross_entropy(softmax(t.param(q, "a")), 4);
  };
  EXPECT_LE(grad_check(builder, p).max_relative_error, 1e-6);
}
