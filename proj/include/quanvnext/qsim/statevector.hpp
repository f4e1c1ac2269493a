#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace quanvnext::qsim {

using Complex = std::complex<double>;

// Z expectation per qubit, each in [-1, 1].
using ExpectationVector = std::vector<double>;

// Amplitudes of an n-qubit register. Qubit i is bit i of the basis index
// (little-endian), so |q1 q0> = |1 0> is amplitude index 2.
class StateVector {
 public:
  // |0...0>
  explicit StateVector(int n_qubits);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amplitudes_.size(); }

  std::span<Complex> amplitudes() noexcept { return amplitudes_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

  double norm_squared() const noexcept;

 private:
  int n_qubits_;
  std::vector<Complex> amplitudes_;
};

// Row-major 2x2 matrix of the single-qubit gate
//   [ cos(θπ/2)            -e^{iλ} sin(θπ/2)      ]
//   [ e^{iφ} sin(θπ/2)      e^{i(φ+λ)} cos(θπ/2)  ]
// θ is measured in half-turns; φ and λ are plain phases in radians.
std::array<Complex, 4> unitary_matrix(double theta, double phi, double lambda) noexcept;
std::array<Complex, 4> unitary_dtheta(double theta, double phi, double lambda) noexcept;
std::array<Complex, 4> unitary_dlambda(double theta, double phi, double lambda) noexcept;

// In-place application to one qubit. Throws ArgumentError for qubit >= n_qubits.
void apply_single_qubit_unitary(StateVector& state, int qubit, double theta, double phi,
                                double lambda);
StateVector apply_single_qubit_unitary(const StateVector& state, int qubit, double theta,
                                       double phi, double lambda);

// Loads a unit-norm real vector of length m <= 2^n into the first m amplitudes
// and zero-fills the rest.
StateVector amplitude_embed(std::span<const double> features, int n_qubits);

ExpectationVector z_expectations(const StateVector& state);

inline constexpr double kNormTolerance = 1e-9;

}  // namespace quanvnext::qsim
