#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "quanvnext/autodiff/gradcheck.hpp"
#include "quanvnext/autodiff/nadam.hpp"
#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/error.hpp"

using namespace quanvnext;
using namespace quanvnext::autodiff;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Tensor t(r, c);
  for (double& v : t.flat()) v = nd(rng);
  return t;
}

// Records f on leaves built from `inputs`, reduces with a fixed random weight,
// and compares each leaf gradient against central differences.
void check_vjp(const std::vector<Tensor>& inputs,
               const std::function<Var(Tape&, const std::vector<Var>&)>& f, double tol = 1e-4) {
  std::mt19937_64 rng(99);
  Tensor weight;
  auto eval = [&](const std::vector<Tensor>& in, bool grads, std::vector<Tensor>* out_grads) {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& t : in) leaves.push_back(tape.parameter(t));
    const Var y = f(tape, leaves);
    if (weight.empty()) weight = random_tensor(tape.value(y).rows(), tape.value(y).cols(), rng);
    const Var w = tape.constant(weight);
    // sum(w * y) via 0.5 * (|y + w|^2 - |y|^2 - |w|^2) keeps to recorded ops.
    const Var loss_a = half_sum_squares(tape, add(tape, y, w));
    const double value = tape.value(loss_a)(0, 0) - 0.5 * [&] {
      double s = 0;
      for (double v : tape.value(y).values()) s += v * v;
      for (double v : weight.values()) s += v * v;
      return s;
    }();
    if (grads) {
      tape.backward(loss_a);
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        // d/dx of 0.5|y+w|^2 = J^T (y + w); remove the J^T y part with a
        // second sweep on 0.5|y|^2.
        (*out_grads).push_back(tape.grad(leaves[i]));
      }
      Tape t2;
      std::vector<Var> l2;
      for (const auto& t : in) l2.push_back(t2.parameter(t));
      const Var y2 = f(t2, l2);
      t2.backward(half_sum_squares(t2, y2));
      for (std::size_t i = 0; i < l2.size(); ++i) {
        const auto g2 = t2.grad(l2[i]);
        for (std::size_t k = 0; k < g2.size(); ++k) (*out_grads)[i].flat()[k] -= g2.flat()[k];
      }
    }
    return value;
  };
  std::vector<Tensor> grads;
  eval(inputs, true, &grads);
  const double h = 1e-6;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      auto p = inputs, m = inputs;
      p[i].flat()[k] += h;
      m[i].flat()[k] -= h;
      const double fd = (eval(p, false, nullptr) - eval(m, false, nullptr)) / (2 * h);
      EXPECT_LT(relative_error(fd, grads[i].flat()[k]), tol) << "input " << i << " element " << k;
    }
  }
}

}  // namespace

TEST(Tape, ConstantLossGivesZeroGradients) {
  Tape tape;
  const Var p = tape.parameter(Tensor(2, 2, 3.0));
  const Var c = tape.constant(Tensor(1, 1, 4.0));
  tape.backward(c);
  EXPECT_EQ(tape.grad(p), Tensor(2, 2, 0.0));
}

TEST(Tape, HalfSumSquaresGradientIsIdentity) {
  std::mt19937_64 rng(1);
  Tape tape;
  const auto x = random_tensor(3, 4, rng);
  const Var p = tape.parameter(x);
  tape.backward(half_sum_squares(tape, p));
  EXPECT_EQ(tape.grad(p), x);
}

TEST(Tape, Errors) {
  Tape a, b;
  const Var pa = a.parameter(Tensor(1, 1, 1.0));
  EXPECT_THROW(b.backward(pa), StateError);
  const Var big = a.parameter(Tensor(2, 1, 1.0));
  EXPECT_THROW(a.backward(big), ArgumentError);
}

TEST(Tape, UntouchedParameterGetsZero) {
  Tape tape;
  const Var used = tape.parameter(Tensor(1, 2, 1.0));
  const Var unused = tape.parameter(Tensor(3, 1, 1.0));
  tape.backward(half_sum_squares(tape, used));
  EXPECT_EQ(tape.grad(unused), Tensor(3, 1, 0.0));
}

TEST(Tape, ReusedValueAccumulates) {
  Tape tape;
  const Var p = tape.parameter(Tensor(1, 1, 2.0));
  tape.backward(half_sum_squares(tape, add(tape, p, p)));  // 0.5 (2p)^2 -> 4p
  EXPECT_DOUBLE_EQ(tape.grad(p)(0, 0), 8.0);
}

TEST(Ops, VjpAdd) {
  std::mt19937_64 rng(2);
  check_vjp({random_tensor(3, 5, rng), random_tensor(3, 5, rng)},
            [](Tape& t, const std::vector<Var>& v) { return add(t, v[0], v[1]); });
}

TEST(Ops, VjpShuffle) {
  std::mt19937_64 rng(3);
  check_vjp({random_tensor(8, 3, rng)},
            [](Tape& t, const std::vector<Var>& v) { return channel_shuffle(t, v[0], 4); });
}

TEST(Ops, VjpLayerNorm) {
  std::mt19937_64 rng(4);
  check_vjp({random_tensor(6, 4, rng), random_tensor(1, 6, rng), random_tensor(1, 6, rng)},
            [](Tape& t, const std::vector<Var>& v) { return layer_norm(t, v[0], v[1], v[2]); });
}

TEST(Ops, VjpMish) {
  std::mt19937_64 rng(5);
  check_vjp({random_tensor(4, 6, rng)}, [](Tape& t, const std::vector<Var>& v) { return mish(t, v[0]); });
}

TEST(Ops, VjpConcatSlicePool) {
  std::mt19937_64 rng(6);
  check_vjp({random_tensor(2, 5, rng), random_tensor(3, 5, rng)}, [](Tape& t, const std::vector<Var>& v) {
    const Var c = concat_channels(t, v[0], v[1]);
    return global_avg_pool(t, slice_channels(t, c, 1, 3));
  });
}

TEST(Ops, VjpQuanv) {
  std::mt19937_64 rng(7);
  quanv::QuanvConfig cfg{.c_in = 2, .c_out = 3, .kernel = 3, .stride = 1, .padding = 1, .temperature = 0.9};
  const auto layer = quanv::QuanvLayer::random(cfg, rng);
  check_vjp({random_tensor(2, 6, rng), layer.theta, layer.lambda},
            [&](Tape& t, const std::vector<Var>& v) { return quanv1d(t, v[0], v[1], v[2], layer); });
}

TEST(Ops, VjpCrossEntropy) {
  std::mt19937_64 rng(8);
  for (int label : {0, 1}) {
    check_vjp({random_tensor(2, 1, rng)},
              [label](Tape& t, const std::vector<Var>& v) { return cross_entropy(t, v[0], label); });
  }
}

TEST(CrossEntropy, Values) {
  EXPECT_NEAR(cross_entropy(std::vector<double>{0.3, 0.3}, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(cross_entropy(std::vector<double>{1.0, 0.0}, 0), 0.31326168751822286, 1e-15);
  EXPECT_NEAR(cross_entropy(std::vector<double>{1.0, 0.0}, 0), 0.3133, 1e-4);
  EXPECT_LT(cross_entropy(std::vector<double>{30.0, 0.0}, 0), 1e-12);
  EXPECT_TRUE(std::isfinite(cross_entropy(std::vector<double>{-800.0, 800.0}, 0)));
  const auto p = softmax(std::vector<double>{1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
}

TEST(NAdam, ReferenceStep) {
  NAdam opt(1);
  std::vector<double> p{0.0};
  opt.step(p, std::vector<double>{1.0});
  // Published update equations evaluated in double precision.
  EXPECT_NEAR(p[0], -0.0010564517677908707, 1e-15);
}

TEST(NAdam, ZeroGradientKeepsParameters) {
  NAdam opt(3);
  std::vector<double> p{1.0, -2.0, 0.5};
  for (int i = 0; i < 5; ++i) opt.step(p, std::vector<double>(3, 0.0));
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 0.5}));
}

TEST(NAdam, SymmetryAndDirection) {
  NAdam opt(2, {.learning_rate = 0.01});
  std::vector<double> p{0.3, 0.3};
  double prev = p[0];
  for (int i = 0; i < 200; ++i) {
    opt.step(p, std::vector<double>{0.7, 0.7});
    EXPECT_EQ(p[0], p[1]);
    EXPECT_LT(p[0], prev);
    prev = p[0];
  }
  for (double v : opt.second_moment()) EXPECT_GE(v, 0.0);
}

TEST(NAdam, ShapeMismatchThrows) {
  NAdam opt(2);
  std::vector<double> p{0.0, 0.0};
  EXPECT_THROW(opt.step(p, std::vector<double>{1.0}), ArgumentError);
}

TEST(GradCheck, FilterSuite) {
  const auto s = check_filter_gradients(100, 11);
  EXPECT_TRUE(s.ok()) << s.first_failure;
  EXPECT_EQ(s.cases, 100u);
}

TEST(GradCheck, ModelSuiteSmall) {
  const auto s = check_model_gradients(5, 12);
  EXPECT_TRUE(s.ok()) << s.first_failure;
}

TEST(GradCheck, StateSuite) {
  const auto s = check_state_invariants(200, 13);
  EXPECT_TRUE(s.ok()) << s.first_failure;
}

TEST(GradCheck, RelativeError) {
  EXPECT_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(1.0, 1.1), 0.1 / 1.1, 1e-15);
  EXPECT_NEAR(relative_error(0.0, 1e-9), 1e-9 / 1e-6, 1e-15);
}
