#pragma once

#include <cstdint>
#include <string>

namespace quanvnext::autodiff {

// |a - b| / max(|a|, |b|, 1e-6): relative where it matters, absolute near 0.
double relative_error(double a, double b) noexcept;

struct CheckSummary {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // worst relative error (or worst violation) seen
  std::string first_failure;
  bool ok() const noexcept { return cases > 0 && failures == 0; }
};

// Random circuits (1-4 qubits, depth 1-3), random features and upstream
// weights: adjoint gradients for θ, λ and the features against central
// differences.
CheckSummary check_filter_gradients(std::size_t cases, std::uint64_t seed, double tolerance = 1e-4);

// Random micro models and inputs: tape gradients of the cross-entropy for
// every trainable parameter against central differences.
CheckSummary check_model_gradients(std::size_t cases, std::uint64_t seed, double tolerance = 1e-3);

// Random embedded states pushed through random circuits (n <= 6): norm within
// 1e-9 of 1 and every raw Z expectation inside [-1, 1].
CheckSummary check_state_invariants(std::size_t cases, std::uint64_t seed);

}  // namespace quanvnext::autodiff
