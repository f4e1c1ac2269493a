#include "quanvnext/eval/uncertainty.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/parallel.hpp"

namespace quanvnext::eval {

namespace {

std::mt19937_64 noise_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t copy) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(copy), static_cast<std::uint32_t>(copy >> 32)};
  return std::mt19937_64(seq);
}

PerturbedPrediction aggregate(const std::vector<std::vector<double>>& probs) {
  PerturbedPrediction out;
  const std::size_t n = probs.size();
  // Accumulate offsets from the first copy so identical copies average to
  // exactly that copy.
  const auto& ref = probs.front();
  std::vector<double> offset(ref.size(), 0.0);
  for (const auto& p : probs) {
    for (std::size_t c = 0; c < p.size(); ++c) offset[c] += p[c] - ref[c];
  }
  out.mean_probabilities = ref;
  for (std::size_t c = 0; c < ref.size(); ++c) {
    out.mean_probabilities[c] += offset[c] / static_cast<double>(n);
  }
  const double mu = out.mean_probabilities.size() > 1 ? out.mean_probabilities[1] : 0.0;
  double var = 0.0;
  for (const auto& p : probs) {
    const double d = (p.size() > 1 ? p[1] : 0.0) - mu;
    var += d * d;
  }
  out.uncertainty = std::sqrt(var / static_cast<double>(n));
  return out;
}

std::vector<double> perturbed_probs(const LogitFn& logits, const Tensor& x, double epsilon,
                                    std::uint64_t seed, std::uint64_t stream, std::uint64_t copy) {
  if (epsilon == 0.0) return autodiff::softmax(logits(x));
  auto rng = noise_stream(seed, stream, copy);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor noisy = x;
  for (double& v : noisy.flat()) v += epsilon * normal(rng);
  return autodiff::softmax(logits(noisy));
}

void check_args(double epsilon, int n) {
  if (!(epsilon >= 0.0)) throw ArgumentError("perturb_predict: epsilon must be >= 0");
  if (n < 1) throw ArgumentError("perturb_predict: n must be >= 1");
}

LogitFn model_logits(const model::Model& model) {
  return [&model](const Tensor& x) { return model::quanvnext_forward(x, model).values(); };
}

}  // namespace

PerturbedPrediction perturb_predict(const LogitFn& logits, const Tensor& x, double epsilon, int n,
                                    std::uint64_t seed, std::uint64_t stream) {
  check_args(epsilon, n);
  std::vector<std::vector<double>> probs(static_cast<std::size_t>(n));
  parallel_for(probs.size(), [&](std::size_t k) {
    probs[k] = perturbed_probs(logits, x, epsilon, seed, stream, k);
  });
  return aggregate(probs);
}

PerturbedPrediction perturb_predict(const model::Model& model, const Tensor& x, double epsilon,
                                    int n, std::uint64_t seed, std::uint64_t stream) {
  return perturb_predict(model_logits(model), x, epsilon, n, seed, stream);
}

std::vector<UncertaintyRecord> uncertainty_report(const LogitFn& logits,
                                                  const std::vector<data::Window>& test,
                                                  const std::vector<double>& epsilons,
                                                  std::uint64_t seed, int n) {
  if (test.empty()) throw ArgumentError("uncertainty_report: empty test set");
  for (double eps : epsilons) check_args(eps, n);

  std::vector<UncertaintyRecord> records;
  for (double eps : epsilons) {
    // Flatten (sample, copy) so a single parallel loop covers the whole set.
    const std::size_t copies = static_cast<std::size_t>(n);
    std::vector<std::vector<double>> probs(test.size() * copies);
    parallel_for(probs.size(), [&](std::size_t job) {
      const std::size_t i = job / copies, k = job % copies;
      probs[job] = perturbed_probs(logits, test[i].signal, eps, seed, i, k);
    });

    std::vector<int> predicted, labels, correct;
    std::vector<double> confidence;
    double u_ok = 0.0, u_bad = 0.0;
    std::size_t n_ok = 0, n_bad = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const std::vector<std::vector<double>> mine(probs.begin() + i * copies,
                                                  probs.begin() + (i + 1) * copies);
      const auto pp = aggregate(mine);
      const auto& m = pp.mean_probabilities;
      const int pred = m[1] > m[0] ? 1 : 0;
      predicted.push_back(pred);
      labels.push_back(test[i].label);
      confidence.push_back(std::min(1.0, std::max(m[0], m[1])));
      const bool ok = pred == test[i].label;
      correct.push_back(ok ? 1 : 0);
      (ok ? u_ok : u_bad) += pp.uncertainty;
      ++(ok ? n_ok : n_bad);
    }

    UncertaintyRecord r;
    r.epsilon = eps;
    r.samples = test.size();
    const auto counts = confusion(predicted, labels);
    r.accuracy = accuracy(counts);
    r.accuracy_ci = wilson_interval(counts.tp + counts.tn, counts.total());
    if (n_ok) r.mean_uncertainty_correct = u_ok / static_cast<double>(n_ok);
    if (n_bad) r.mean_uncertainty_incorrect = u_bad / static_cast<double>(n_bad);
    r.ece = ece(confidence, correct, 10);
    records.push_back(r);
  }
  return records;
}

std::vector<UncertaintyRecord> uncertainty_report(const model::Model& model,
                                                  const std::vector<data::Window>& test,
                                                  const std::vector<double>& epsilons,
                                                  std::uint64_t seed, int n) {
  return uncertainty_report(model_logits(model), test, epsilons, seed, n);
}

std::string uncertainty_csv(const std::vector<UncertaintyRecord>& records) {
  std::string out =
      "epsilon,samples,accuracy,ci_lower,ci_upper,mean_uncertainty_correct,"
      "mean_uncertainty_incorrect,ece\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : records) {
    out += num(r.epsilon) + "," + std::to_string(r.samples) + "," + num(r.accuracy) + "," +
           num(r.accuracy_ci.lower) + "," + num(r.accuracy_ci.upper) + "," +
           opt(r.mean_uncertainty_correct) + "," + opt(r.mean_uncertainty_incorrect) + "," +
           num(r.ece) + "\n";
  }
  return out;
}

}  // namespace quanvnext::eval
