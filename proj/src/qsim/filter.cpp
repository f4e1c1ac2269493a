#include "quanvnext/qsim/filter.hpp"

#include <numbers>
#include <string>

#include "quanvnext/error.hpp"
#include "quanvnext/qsim/kernels.hpp"

namespace quanvnext::qsim {

FilterCircuit::FilterCircuit(int n_qubits, int depth, Tensor theta, Tensor lambda, Tensor phi)
    : n_qubits_(n_qubits),
      depth_(depth),
      theta_(std::move(theta)),
      lambda_(std::move(lambda)),
      phi_(std::move(phi)) {
  if (n_qubits < 1 || depth < 1) {
    throw ArgumentError("FilterCircuit: n_qubits and depth must be positive");
  }
  const auto rows = static_cast<std::size_t>(depth);
  const auto cols = static_cast<std::size_t>(n_qubits);
  for (const Tensor* t : {&theta_, &lambda_, &phi_}) {
    if (t->rows() != rows || t->cols() != cols) {
      throw ArgumentError("FilterCircuit: angle tensors must be (" + std::to_string(depth) +
                          ", " + std::to_string(n_qubits) + "), got " + t->shape_string());
    }
  }
}

FilterCircuit FilterCircuit::random(int n_qubits, int depth, std::mt19937_64& rng) {
  const auto rows = static_cast<std::size_t>(depth);
  const auto cols = static_cast<std::size_t>(n_qubits);
  std::uniform_real_distribution<double> trainable(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Tensor theta(rows, cols), lambda(rows, cols), phi(rows, cols);
  for (double& v : theta.flat()) v = trainable(rng);
  for (double& v : lambda.flat()) v = trainable(rng);
  for (double& v : phi.flat()) v = phase(rng);
  return {n_qubits, depth, std::move(theta), std::move(lambda), std::move(phi)};
}

FilterCircuit FilterCircuit::identity(int n_qubits, int depth) {
  const auto rows = static_cast<std::size_t>(depth);
  const auto cols = static_cast<std::size_t>(n_qubits);
  return {n_qubits, depth, Tensor(rows, cols), Tensor(rows, cols), Tensor(rows, cols)};
}

namespace {

std::array<Complex, 4> dagger(const std::array<Complex, 4>& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

}  // namespace

CompiledFilter::CompiledFilter(const FilterCircuit& circuit)
    : n_qubits_(circuit.n_qubits()), depth_(circuit.depth()) {
  const std::size_t count = static_cast<std::size_t>(n_qubits_) * static_cast<std::size_t>(depth_);
  gates_.reserve(count);
  adjoints_.reserve(count);
  d_theta_.reserve(count);
  d_lambda_.reserve(count);
  for (int l = 0; l < depth_; ++l) {
    for (int q = 0; q < n_qubits_; ++q) {
      const auto r = static_cast<std::size_t>(l);
      const auto c = static_cast<std::size_t>(q);
      const double th = circuit.theta()(r, c);
      const double ph = circuit.phi()(r, c);
      const double la = circuit.lambda()(r, c);
      gates_.push_back(unitary_matrix(th, ph, la));
      adjoints_.push_back(dagger(gates_.back()));
      d_theta_.push_back(unitary_dtheta(th, ph, la));
      d_lambda_.push_back(unitary_dlambda(th, ph, la));
    }
  }
}

void CompiledFilter::evolve(StateVector& state) const {
  if (state.n_qubits() != n_qubits_) {
    throw ArgumentError("CompiledFilter::evolve: qubit count mismatch");
  }
  Complex* amps = state.amplitudes().data();
  for (std::size_t g = 0; g < gates_.size(); ++g) {
    const auto qubit = static_cast<unsigned>(g % static_cast<std::size_t>(n_qubits_));
    kernels::apply_gate(amps, dim(), qubit, gates_[g].data());
  }
}

ExpectationVector CompiledFilter::run(std::span<const double> features) const {
  StateVector state = amplitude_embed(features, n_qubits_);
  evolve(state);
  return z_expectations(state);
}

FilterGradients CompiledFilter::gradients(std::span<const double> features,
                                          std::span<const double> upstream) const {
  if (upstream.size() != static_cast<std::size_t>(n_qubits_)) {
    throw ArgumentError("filter_gradients: upstream length must equal n_qubits");
  }
  const auto rows = static_cast<std::size_t>(depth_);
  const auto cols = static_cast<std::size_t>(n_qubits_);
  FilterGradients out{Tensor(rows, cols), Tensor(rows, cols),
                      std::vector<double>(features.size(), 0.0)};

  StateVector state = amplitude_embed(features, n_qubits_);
  bool any = false;
  for (double u : upstream) any = any || u != 0.0;
  if (!any) return out;

  evolve(state);
  const std::size_t n = dim();
  std::vector<Complex> ket(state.amplitudes().begin(), state.amplitudes().end());
  // bra = O|ψ_out> with O = Σ_i upstream_i Z_i (diagonal)
  std::vector<Complex> bra(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 0.0;
    for (std::size_t q = 0; q < cols; ++q) w += (k >> q) & 1U ? -upstream[q] : upstream[q];
    bra[k] = w * ket[k];
  }

  for (std::size_t g = gates_.size(); g-- > 0;) {
    const auto qubit = static_cast<unsigned>(g % cols);
    kernels::apply_gate(ket.data(), n, qubit, adjoints_[g].data());
    const std::size_t layer = g / cols;
    const std::size_t q = g % cols;
    out.theta(layer, q) = 2.0 * kernels::gate_inner(bra.data(), ket.data(), n, qubit,
                                                    d_theta_[g].data()).real();
    out.lambda(layer, q) = 2.0 * kernels::gate_inner(bra.data(), ket.data(), n, qubit,
                                                     d_lambda_[g].data()).real();
    kernels::apply_gate(bra.data(), n, qubit, adjoints_[g].data());
  }
  for (std::size_t j = 0; j < features.size(); ++j) out.features[j] = 2.0 * bra[j].real();
  return out;
}

ExpectationVector run_filter(std::span<const double> features, const FilterCircuit& circuit) {
  return CompiledFilter(circuit).run(features);
}

FilterGradients filter_gradients(std::span<const double> features, const FilterCircuit& circuit,
                                 std::span<const double> upstream) {
  return CompiledFilter(circuit).gradients(features, upstream);
}

}  // namespace quanvnext::qsim
