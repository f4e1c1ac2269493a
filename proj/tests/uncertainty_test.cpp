#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/data/synth.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/eval/uncertainty.hpp"
#include "quanvnext/model/quanvnext.hpp"

using namespace quanvnext;
using namespace quanvnext::eval;

namespace {

Tensor random_input(std::size_t c, std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Tensor t(c, len);
  for (double& v : t.flat()) v = nd(rng);
  return t;
}

double mean_of(const Tensor& x) {
  double s = 0;
  for (double v : x.values()) s += v;
  return s / static_cast<double>(x.size());
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<data::Window> constant_label_set(std::size_t n_pos, std::size_t n_neg) {
  std::vector<data::Window> w;
  for (std::size_t i = 0; i < n_pos + n_neg; ++i)
    w.push_back({"s" + std::to_string(i), i < n_pos ? 1 : 0, Tensor(1, 4, static_cast<double>(i))});
  return w;
}

}  // namespace

TEST(PerturbPredict, ZeroEpsilonIsExact) {
  const auto m = model::build_model(model::ModelConfig::micro(4, 96, 8), 3);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = random_input(4, 96, s);
    const auto r = perturb_predict(m, x, 0.0, 50, s);
    EXPECT_EQ(r.uncertainty, 0.0);
    EXPECT_EQ(r.mean_probabilities, autodiff::softmax(model::quanvnext_forward(x, m).values()));
  }
}

TEST(PerturbPredict, SingleCopyHasNoSpread) {
  const auto m = model::build_model(model::ModelConfig::micro(4, 96, 8), 3);
  EXPECT_EQ(perturb_predict(m, random_input(4, 96, 1), 0.1, 1, 7).uncertainty, 0.0);
}

TEST(PerturbPredict, SeededAndArgumentChecked) {
  const auto m = model::build_model(model::ModelConfig::micro(4, 96, 8), 3);
  const auto x = random_input(4, 96, 2);
  const auto a = perturb_predict(m, x, 0.05, 8, 11), b = perturb_predict(m, x, 0.05, 8, 11);
  EXPECT_EQ(a.mean_probabilities, b.mean_probabilities);
  EXPECT_EQ(a.uncertainty, b.uncertainty);
  EXPECT_NE(perturb_predict(m, x, 0.05, 8, 12).uncertainty, a.uncertainty);
  EXPECT_THROW(perturb_predict(m, x, -0.1), ArgumentError);
  EXPECT_THROW(perturb_predict(m, x, 0.1, 0), ArgumentError);
}

TEST(PerturbPredict, LinearSurrogateMatchesAnalyticPropagation) {
  // logits = (0, w * mean(x)). With x' = x + eps*N(0,1) the positive logit is
  // Gaussian with sd w*eps/sqrt(size); integrate sigmoid against it.
  const double w = 40.0;
  const auto x = random_input(2, 8, 5);
  const LogitFn f = [w](const Tensor& t) { return std::vector<double>{0.0, w * mean_of(t)}; };
  for (double eps : {0.1, 0.05}) {
    const double mu = w * mean_of(x), sd = w * eps / 4.0;
    double m1 = 0, m2 = 0, mass = 0;
    for (double z = -10; z <= 10; z += 1e-3) {
      const double pdf = std::exp(-0.5 * z * z), p = sigmoid(mu + sd * z);
      mass += pdf;
      m1 += pdf * p;
      m2 += pdf * p * p;
    }
    m1 /= mass;
    m2 /= mass;
    const double expected = std::sqrt(m2 - m1 * m1);
    const auto r = perturb_predict(f, x, eps, 10000, 9);
    EXPECT_NEAR(r.uncertainty, expected, 0.04 * expected) << eps;
    EXPECT_NEAR(r.mean_probabilities[1], m1, 4.0 * expected / 100.0) << eps;
  }
}

TEST(Report, OneRecordPerEpsilonAndAbsentGroup) {
  const LogitFn perfect = [](const Tensor& t) { return std::vector<double>{0.0, t(0, 0) < 4.5 ? 20.0 : -20.0}; };
  const auto recs = uncertainty_report(perfect, constant_label_set(5, 5), kDefaultEpsilons, 1, 10);
  ASSERT_EQ(recs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(recs[i].epsilon, kDefaultEpsilons[i]);
    EXPECT_EQ(recs[i].samples, 10u);
    EXPECT_EQ(recs[i].accuracy, 1.0);
    EXPECT_TRUE(recs[i].mean_uncertainty_correct.has_value());
    EXPECT_FALSE(recs[i].mean_uncertainty_incorrect.has_value());
  }
  const auto csv = uncertainty_csv(recs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epsilon,samples,accuracy,ci_lower,ci_upper,mean_uncertainty_correct,mean_uncertainty_incorrect,ece");
  EXPECT_NE(csv.find(",,"), std::string::npos) << csv;  // absent incorrect group
}

TEST(Report, ConstantConfidenceEce) {
  // Always predicts class 1 with probability 0.8; 7 of 10 samples are class 1.
  const LogitFn constant = [](const Tensor&) { return std::vector<double>{0.0, std::log(4.0)}; };
  const auto recs = uncertainty_report(constant, constant_label_set(7, 3), {0.1}, 0, 5);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].accuracy, 0.7, 1e-15);
  EXPECT_NEAR(recs[0].ece, std::abs(0.7 - 0.8), 1e-12);
}

TEST(Report, Errors) {
  const LogitFn f = [](const Tensor&) { return std::vector<double>{0.0, 0.0}; };
  EXPECT_THROW(uncertainty_report(f, {}, {0.1}, 0), ArgumentError);
  EXPECT_THROW(uncertainty_report(f, constant_label_set(1, 1), {-1.0}, 0), ArgumentError);
}

TEST(Report, LargerNoiseGivesLargerUncertainty) {
  // Paired over 30 seeds on synthetic windows; at least 28 must agree.
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto recs = data::synth_generate({.subjects_per_class = 2, .channels = 4, .sampling_rate_hz = 32, .duration_s = 8, .seed = seed});
    auto prep = data::prepare(recs, {.window_s = 4.0, .overlap = 0.5, .train_fraction = 0.5, .seed = seed});
    auto test = prep.test.windows;
    if (test.size() > 8) test.resize(8);
    const auto m = model::build_model(model::ModelConfig::micro(4, 128, 8), seed);
    const auto r = uncertainty_report(m, test, {0.1, 0.01}, seed, 20);
    auto mean_u = [](const UncertaintyRecord& rec) {
      const double nc = static_cast<double>(rec.samples) * rec.accuracy;
      const double ni = static_cast<double>(rec.samples) - nc;
      return (rec.mean_uncertainty_correct.value_or(0) * nc + rec.mean_uncertainty_incorrect.value_or(0) * ni) /
             static_cast<double>(rec.samples);
    };
    agree += mean_u(r[0]) >= mean_u(r[1]);
  }
  EXPECT_GE(agree, 28);
}
