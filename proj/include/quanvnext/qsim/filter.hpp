#pragma once

#include <array>
#include <random>
#include <span>
#include <vector>

#include "quanvnext/qsim/statevector.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::qsim {

// One quanvolutional filter: `depth` layers, each applying U(θ, φ, λ) to every
// qubit in index order. θ and λ are trainable, φ is frozen at construction.
// All three are (depth, n_qubits).
class FilterCircuit {
 public:
  FilterCircuit(int n_qubits, int depth, Tensor theta, Tensor lambda, Tensor phi);

  // θ, λ ~ U(-1, 1); φ ~ U(0, 2π).
  static FilterCircuit random(int n_qubits, int depth, std::mt19937_64& rng);
  // All angles zero: the identity circuit.
  static FilterCircuit identity(int n_qubits, int depth);

  int n_qubits() const noexcept { return n_qubits_; }
  int depth() const noexcept { return depth_; }
  const Tensor& theta() const noexcept { return theta_; }
  const Tensor& lambda() const noexcept { return lambda_; }
  const Tensor& phi() const noexcept { return phi_; }

  Tensor& theta() noexcept { return theta_; }
  Tensor& lambda() noexcept { return lambda_; }

 private:
  int n_qubits_;
  int depth_;
  Tensor theta_;
  Tensor lambda_;
  Tensor phi_;
};

struct FilterGradients {
  Tensor theta;                  // (depth, n_qubits)
  Tensor lambda;                 // (depth, n_qubits)
  std::vector<double> features;  // same length as the input features
};

// Gate matrices of a circuit precomputed once, reused across many patches.
// Scratch buffers are per call, so a compiled filter is safe to share between
// threads.
class CompiledFilter {
 public:
  explicit CompiledFilter(const FilterCircuit& circuit);

  int n_qubits() const noexcept { return n_qubits_; }
  int depth() const noexcept { return depth_; }
  std::size_t dim() const noexcept { return std::size_t{1} << n_qubits_; }

  // Evolves `state` (already embedded) through all layers.
  void evolve(StateVector& state) const;
  ExpectationVector run(std::span<const double> features) const;
  FilterGradients gradients(std::span<const double> features,
                            std::span<const double> upstream) const;

 private:
  using Matrix = std::array<Complex, 4>;

  int n_qubits_;
  int depth_;
  std::vector<Matrix> gates_;     // layer-major, qubit-minor
  std::vector<Matrix> adjoints_;  // conjugate transposes of gates_
  std::vector<Matrix> d_theta_;
  std::vector<Matrix> d_lambda_;
};

// Embed, evolve, measure.
ExpectationVector run_filter(std::span<const double> features, const FilterCircuit& circuit);

// Exact gradients of sum_i upstream_i * E_i with respect to θ, λ and the input
// features, by adjoint differentiation of the simulation. φ is frozen and gets
// no gradient.
FilterGradients filter_gradients(std::span<const double> features, const FilterCircuit& circuit,
                                 std::span<const double> upstream);

}  // namespace quanvnext::qsim
