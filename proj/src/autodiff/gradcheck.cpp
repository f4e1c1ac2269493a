#include "quanvnext/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/autodiff/train.hpp"
#include "quanvnext/model/quanvnext.hpp"
#include "quanvnext/qsim/filter.hpp"

namespace quanvnext::autodiff {

double relative_error(double a, double b) noexcept {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

namespace {

void record(CheckSummary& s, double err, double tol, const std::string& what) {
  s.worst = std::max(s.worst, err);
  if (!(err <= tol)) {
    ++s.failures;
    if (s.first_failure.empty()) s.first_failure = what + " (error " + std::to_string(err) + ")";
  }
}

// sum_i u_i <Z_i> for amplitudes taken as given (no renormalization), so the
// features can be perturbed off the unit sphere.
double weighted_z(const qsim::CompiledFilter& f, std::span<const double> amps,
                  std::span<const double> upstream) {
  qsim::StateVector sv(f.n_qubits());
  auto a = sv.amplitudes();
  std::fill(a.begin(), a.end(), qsim::Complex{});
  for (std::size_t k = 0; k < amps.size(); ++k) a[k] = amps[k];
  f.evolve(sv);
  double total = 0.0;
  for (std::size_t k = 0; k < sv.dim(); ++k) {
    const double p = std::norm(sv[k]);
    for (int q = 0; q < f.n_qubits(); ++q) total += upstream[q] * p * ((k >> q) & 1 ? -1.0 : 1.0);
  }
  return total;
}

}  // namespace

CheckSummary check_filter_gradients(std::size_t cases, std::uint64_t seed, double tolerance) {
  CheckSummary s;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> qubits(1, 4), depths(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr double h = 1e-6;
  for (std::size_t c = 0; c < cases; ++c) {
    const int n = qubits(rng), depth = depths(rng);
    auto circuit = qsim::FilterCircuit::random(n, depth, rng);
    const std::size_t dim = std::size_t{1} << n;
    std::uniform_int_distribution<std::size_t> len(1, dim);
    std::vector<double> x(len(rng));
    double norm = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm += v * v;
    }
    for (double& v : x) v /= std::sqrt(norm);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& v : u) v = normal(rng);

    const auto g = qsim::filter_gradients(x, circuit, u);
    const std::string tag = "filter case " + std::to_string(c);
    auto angle_check = [&](Tensor& angles, const Tensor& grad, const char* name) {
      for (std::size_t k = 0; k < angles.size(); ++k) {
        const double keep = angles.flat()[k];
        angles.flat()[k] = keep + h;
        const double up = weighted_z(qsim::CompiledFilter(circuit), x, u);
        angles.flat()[k] = keep - h;
        const double down = weighted_z(qsim::CompiledFilter(circuit), x, u);
        angles.flat()[k] = keep;
        record(s, relative_error((up - down) / (2 * h), grad.flat()[k]), tolerance,
               tag + " d" + name + "[" + std::to_string(k) + "]");
      }
    };
    angle_check(circuit.theta(), g.theta, "theta");
    angle_check(circuit.lambda(), g.lambda, "lambda");
    const qsim::CompiledFilter compiled(circuit);
    for (std::size_t k = 0; k < x.size(); ++k) {
      auto xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (weighted_z(compiled, xp, u) - weighted_z(compiled, xm, u)) / (2 * h);
      record(s, relative_error(fd, g.features[k]), tolerance,
             tag + " dfeature[" + std::to_string(k) + "]");
    }
    ++s.cases;
  }
  return s;
}

CheckSummary check_model_gradients(std::size_t cases, std::uint64_t seed, double tolerance) {
  CheckSummary s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> toggle(0, 1), length(64, 96);
  constexpr double h = 1e-5;
  for (std::size_t c = 0; c < cases; ++c) {
    auto cfg = model::ModelConfig::micro(2 + 2 * toggle(rng), length(rng), 8);
    cfg.use_skip = toggle(rng);
    cfg.use_aggregation = toggle(rng);
    cfg.use_shuffle = toggle(rng);
    auto m = model::build_model(cfg, rng());
    Tensor x(static_cast<std::size_t>(cfg.input_channels), static_cast<std::size_t>(cfg.input_length));
    for (double& v : x.flat()) v = normal(rng);
    const int label = toggle(rng);

    const auto lg = sample_gradient(m, x, label);
    auto params = m.flat_parameters();
    const auto names = m.trainable_names();
    auto loss_at = [&](std::size_t k, double value) {
      auto q = params;
      q[k] = value;
      m.set_flat_parameters(q);
      return cross_entropy(model::quanvnext_forward(x, m).flat(), label);
    };
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double fd = (loss_at(k, params[k] + h) - loss_at(k, params[k] - h)) / (2 * h);
      record(s, relative_error(fd, lg.gradient[k]), tolerance,
             "model case " + std::to_string(c) + " parameter " + std::to_string(k));
    }
    m.set_flat_parameters(params);
    ++s.cases;
  }
  return s;
}

CheckSummary check_state_invariants(std::size_t cases, std::uint64_t seed) {
  CheckSummary s;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> qubits(1, 6), depths(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t c = 0; c < cases; ++c) {
    const int n = qubits(rng);
    const auto circuit = qsim::FilterCircuit::random(n, depths(rng), rng);
    std::vector<double> x(std::size_t{1} << n);
    double norm = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm += v * v;
    }
    for (double& v : x) v /= std::sqrt(norm);
    auto sv = qsim::amplitude_embed(x, n);
    qsim::CompiledFilter(circuit).evolve(sv);
    const std::string tag = "state case " + std::to_string(c);
    record(s, std::abs(sv.norm_squared() - 1.0), 1e-9, tag + " norm");
    for (int q = 0; q < n; ++q) {
      double z = 0.0;
      for (std::size_t k = 0; k < sv.dim(); ++k) z += std::norm(sv[k]) * ((k >> q) & 1 ? -1.0 : 1.0);
      record(s, std::max(0.0, std::abs(z) - 1.0), 0.0, tag + " expectation range");
    }
    ++s.cases;
  }
  return s;
}

}  // namespace quanvnext::autodiff
