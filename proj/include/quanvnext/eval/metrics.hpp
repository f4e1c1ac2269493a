#pragma once

#include <cstdint>
#include <span>

namespace quanvnext::eval {

// Positive class is label 1.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> labels);

double accuracy(const ConfusionCounts& c) noexcept;

// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionCounts& c) noexcept;

// Area under the empirical ROC curve, computed as the normalized Mann-Whitney
// U statistic (ties count 1/2). Throws ArgumentError if a class is missing.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// Expected calibration error over equal-width bins [i/M, (i+1)/M); a
// confidence of exactly 1 lands in the top bin. `correct` holds 0/1 flags.
double ece(std::span<const double> confidences, std::span<const int> correct, int n_bins = 10);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double z = 1.959963984540054);

}  // namespace quanvnext::eval
