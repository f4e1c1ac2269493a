#include "quanvnext/qsim/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "quanvnext/error.hpp"
#include "quanvnext/qsim/kernels.hpp"

namespace quanvnext::qsim {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw ArgumentError("StateVector: n_qubits must be in [1, 30], got " +
                        std::to_string(n_qubits));
  }
  amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

double StateVector::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

std::array<Complex, 4> unitary_matrix(double theta, double phi, double lambda) noexcept {
  const double half = theta * std::numbers::pi / 2.0;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const Complex e_phi = std::polar(1.0, phi);
  const Complex e_lambda = std::polar(1.0, lambda);
  return {c, -e_lambda * s, e_phi * s, e_phi * e_lambda * c};
}

std::array<Complex, 4> unitary_dtheta(double theta, double phi, double lambda) noexcept {
  const double k = std::numbers::pi / 2.0;
  const double c = std::cos(theta * k);
  const double s = std::sin(theta * k);
  const Complex e_phi = std::polar(1.0, phi);
  const Complex e_lambda = std::polar(1.0, lambda);
  return {-k * s, -e_lambda * (k * c), e_phi * (k * c), -e_phi * e_lambda * (k * s)};
}

std::array<Complex, 4> unitary_dlambda(double theta, double phi, double lambda) noexcept {
  const double half = theta * std::numbers::pi / 2.0;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const Complex i{0.0, 1.0};
  const Complex e_phi = std::polar(1.0, phi);
  const Complex e_lambda = std::polar(1.0, lambda);
  return {0.0, -i * e_lambda * s, 0.0, i * e_phi * e_lambda * c};
}

void apply_single_qubit_unitary(StateVector& state, int qubit, double theta, double phi,
                                double lambda) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw ArgumentError("apply_single_qubit_unitary: qubit " + std::to_string(qubit) +
                        " out of range for " + std::to_string(state.n_qubits()) + " qubits");
  }
  const auto m = unitary_matrix(theta, phi, lambda);
  kernels::apply_gate(state.amplitudes().data(), state.dim(), static_cast<unsigned>(qubit),
                      m.data());
}

StateVector apply_single_qubit_unitary(const StateVector& state, int qubit, double theta,
                                       double phi, double lambda) {
  StateVector out = state;
  apply_single_qubit_unitary(out, qubit, theta, phi, lambda);
  return out;
}

StateVector amplitude_embed(std::span<const double> features, int n_qubits) {
  StateVector state(n_qubits);
  if (features.size() > state.dim()) {
    throw ArgumentError("amplitude_embed: " + std::to_string(features.size()) +
                        " features do not fit in " + std::to_string(n_qubits) + " qubits");
  }
  double norm = 0.0;
  for (double f : features) norm += f * f;
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw ArgumentError("amplitude_embed: features are not unit-norm (sum of squares " +
                        std::to_string(norm) + ")");
  }
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = i < features.size() ? Complex{features[i], 0.0} : Complex{0.0, 0.0};
  }
  return state;
}

ExpectationVector z_expectations(const StateVector& state) {
  const std::size_t dim = state.dim();
  std::vector<double> probs(dim);
  kernels::probabilities(state.amplitudes().data(), probs.data(), dim);
  ExpectationVector out(static_cast<std::size_t>(state.n_qubits()), 0.0);
  for (int q = 0; q < state.n_qubits(); ++q) {
    const std::size_t bit = std::size_t{1} << q;
    double zero = 0.0;
    double one = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) {
        one += probs[i];
      } else {
        zero += probs[i];
      }
    }
    out[static_cast<std::size_t>(q)] = std::clamp(zero - one, -1.0, 1.0);
  }
  return out;
}

}  // namespace quanvnext::qsim
