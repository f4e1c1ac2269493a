#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/eval/metrics.hpp"
#include "quanvnext/model/quanvnext.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::eval {

// Maps one input window to class logits.
using LogitFn = std::function<std::vector<double>(const Tensor&)>;

struct PerturbedPrediction {
  std::vector<double> mean_probabilities;
  // Standard deviation (population) of the positive-class probability across
  // the perturbed copies.
  double uncertainty = 0.0;
};

// Forwards n copies x + epsilon * N(0, 1) and averages their softmax outputs.
// Copy k draws its noise from a stream keyed on (seed, stream, k), so results
// do not depend on evaluation order or thread count.
PerturbedPrediction perturb_predict(const LogitFn& logits, const Tensor& x, double epsilon,
                                    int n = 50, std::uint64_t seed = 0, std::uint64_t stream = 0);
PerturbedPrediction perturb_predict(const model::Model& model, const Tensor& x, double epsilon,
                                    int n = 50, std::uint64_t seed = 0, std::uint64_t stream = 0);

struct UncertaintyRecord {
  double epsilon = 0.0;
  std::size_t samples = 0;
  double accuracy = 0.0;
  Interval accuracy_ci;
  // Absent when no prediction falls in the group.
  std::optional<double> mean_uncertainty_correct;
  std::optional<double> mean_uncertainty_incorrect;
  double ece = 0.0;
};

inline const std::vector<double> kDefaultEpsilons = {0.1, 0.05, 0.01};

// One record per epsilon. Sample i uses noise stream i. Throws ArgumentError on
// an empty test set or a negative epsilon.
std::vector<UncertaintyRecord> uncertainty_report(const LogitFn& logits,
                                                  const std::vector<data::Window>& test,
                                                  const std::vector<double>& epsilons,
                                                  std::uint64_t seed, int n = 50);
std::vector<UncertaintyRecord> uncertainty_report(const model::Model& model,
                                                  const std::vector<data::Window>& test,
                                                  const std::vector<double>& epsilons =
                                                      kDefaultEpsilons,
                                                  std::uint64_t seed = 0, int n = 50);

// epsilon,samples,accuracy,ci_lower,ci_upper,mean_uncertainty_correct,
// mean_uncertainty_incorrect,ece  (absent groups are empty cells)
std::string uncertainty_csv(const std::vector<UncertaintyRecord>& records);

}  // namespace quanvnext::eval
