#include "quanvnext/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "quanvnext/error.hpp"

namespace quanvnext::eval {

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) throw ArgumentError("confusion: size mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = predicted[i] == 1;
    const bool actual = labels[i] == 1;
    if (pos && actual) ++c.tp;
    else if (!pos && !actual) ++c.tn;
    else if (pos) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double accuracy(const ConfusionCounts& c) noexcept {
  return c.total() ? static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()) : 0.0;
}

double mcc(const ConfusionCounts& c) noexcept {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("auc_roc: size mismatch");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ArgumentError("auc_roc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U counted directly: each positive scores 1 per lower negative
  // and 1/2 per tied negative. Counts stay integral (in halves) until the end.
  std::uint64_t twice_u = 0;
  std::uint64_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos : neg)++;
      ++j;
    }
    twice_u += pos * (2 * negatives_below + neg);
    negatives_below += neg;
    i = j;
  }
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double ece(std::span<const double> confidences, std::span<const int> correct, int n_bins) {
  if (confidences.size() != correct.size()) throw ArgumentError("ece: size mismatch");
  if (n_bins < 1) throw ArgumentError("ece: n_bins must be positive");
  if (confidences.empty()) return 0.0;
  const auto m = static_cast<std::size_t>(n_bins);
  std::vector<double> conf_sum(m, 0.0);
  std::vector<double> hits(m, 0.0);
  std::vector<std::size_t> count(m, 0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) throw ArgumentError("ece: confidence outside [0, 1]");
    auto bin = static_cast<std::size_t>(std::floor(c * static_cast<double>(n_bins)));
    // keep the bin consistent with the interval bounds i/M under rounding
    if (bin > 0 && c < static_cast<double>(bin) / static_cast<double>(n_bins)) --bin;
    if (bin + 1 < m && c >= static_cast<double>(bin + 1) / static_cast<double>(n_bins)) ++bin;
    bin = std::min(bin, m - 1);
    conf_sum[bin] += c;
    hits[bin] += correct[i] ? 1.0 : 0.0;
    ++count[bin];
  }
  const auto n = static_cast<double>(confidences.size());
  double total = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    if (count[b] == 0) continue;
    const auto nb = static_cast<double>(count[b]);
    total += nb / n * std::abs(hits[b] / nb - conf_sum[b] / nb);
  }
  return total;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace quanvnext::eval
