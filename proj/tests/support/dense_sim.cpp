#include "dense_sim.hpp"

#include <cmath>
#include <numbers>

namespace testsupport {

Dense gate(double theta, double phi, double lambda) {
  const double c = std::cos(theta * std::numbers::pi / 2), s = std::sin(theta * std::numbers::pi / 2);
  const C i(0, 1);
  return {{c, -std::exp(i * lambda) * s}, {std::exp(i * phi) * s, std::exp(i * (phi + lambda)) * c}};
}

Dense kron(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), m = b.size();
  Dense out(n * m, std::vector<C>(n * m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out[i * m + k][j * m + l] = a[i][j] * b[k][l];
  return out;
}

Dense identity(std::size_t dim) {
  Dense out(dim, std::vector<C>(dim));
  for (std::size_t i = 0; i < dim; ++i) out[i][i] = 1.0;
  return out;
}

Dense lift(const Dense& g, int qubit, int n) {
  // The leftmost Kronecker factor owns the most significant bit.
  Dense out = identity(1);
  for (int q = n - 1; q >= 0; --q) out = kron(out, q == qubit ? g : identity(2));
  return out;
}

std::vector<C> apply(const Dense& m, const std::vector<C>& v) {
  std::vector<C> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

std::vector<double> z_expect(const std::vector<C>& state, int n) {
  std::vector<double> out;
  const Dense z{{1.0, 0.0}, {0.0, -1.0}};
  for (int q = 0; q < n; ++q) {
    const auto zs = apply(lift(z, q, n), state);
    C acc = 0;
    for (std::size_t k = 0; k < state.size(); ++k) acc += std::conj(state[k]) * zs[k];
    out.push_back(acc.real());
  }
  return out;
}

std::vector<double> run_circuit(const std::vector<double>& features, int n,
                                const quanvnext::Tensor& theta, const quanvnext::Tensor& lambda,
                                const quanvnext::Tensor& phi) {
  std::vector<C> state(std::size_t{1} << n);
  for (std::size_t k = 0; k < features.size(); ++k) state[k] = features[k];
  for (std::size_t l = 0; l < theta.rows(); ++l)
    for (int q = 0; q < n; ++q)
      state = apply(lift(gate(theta(l, q), phi(l, q), lambda(l, q)), q, n), state);
  return z_expect(state, n);
}

}  // namespace testsupport
