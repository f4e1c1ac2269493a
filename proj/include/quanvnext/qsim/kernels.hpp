#pragma once

// Inner loops of the statevector simulator. Every kernel has a portable scalar
// reference in `scalar::` and, where the target supports it, a vectorized
// variant. The dispatch functions at namespace scope forward to the backend
// chosen at startup (best available, overridable with QUANVNEXT_SIMD=scalar).

#include <complex>
#include <cstddef>
#include <string_view>

namespace quanvnext::qsim::kernels {

using Complex = std::complex<double>;

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend b) noexcept;
bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
// Throws ArgumentError when the backend is not available on this CPU/build.
void set_backend(Backend b);

// amps <- (I ⊗ M ⊗ I) amps, with M acting on `qubit`. `m` is row-major 2x2
// (m00, m01, m10, m11). dim = 2^n, qubit < n.
void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m);

// <bra| (I ⊗ M ⊗ I) |ket> without materializing M|ket>.
Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m);

// probs[i] = |amps[i]|^2
void probabilities(const Complex* amps, double* probs, std::size_t dim);

namespace scalar {
void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m);
Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m);
void probabilities(const Complex* amps, double* probs, std::size_t dim);
}  // namespace scalar

#if defined(QUANVNEXT_HAVE_AVX2)
namespace avx2 {
void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m);
Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m);
void probabilities(const Complex* amps, double* probs, std::size_t dim);
}  // namespace avx2
#endif

}  // namespace quanvnext::qsim::kernels
