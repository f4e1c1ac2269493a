#include "quanvnext/qsim/kernels.hpp"

namespace quanvnext::qsim::kernels::scalar {

void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m) {
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a = amps[i];
      const Complex b = amps[i + stride];
      amps[i] = m[0] * a + m[1] * b;
      amps[i + stride] = m[2] * a + m[3] * b;
    }
  }
}

Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m) {
  const std::size_t stride = std::size_t{1} << qubit;
  Complex acc{0.0, 0.0};
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a = ket[i];
      const Complex b = ket[i + stride];
      acc += std::conj(bra[i]) * (m[0] * a + m[1] * b);
      acc += std::conj(bra[i + stride]) * (m[2] * a + m[3] * b);
    }
  }
  return acc;
}

void probabilities(const Complex* amps, double* probs, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) probs[i] = std::norm(amps[i]);
}

}  // namespace quanvnext::qsim::kernels::scalar
