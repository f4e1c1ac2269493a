#include <atomic>
#include <cstdlib>
#include <string>

#include "quanvnext/error.hpp"
#include "quanvnext/qsim/kernels.hpp"

namespace quanvnext::qsim::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(QUANVNEXT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("QUANVNEXT_SIMD")) {
    if (std::string(env) == "scalar") return Backend::kScalar;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend> g_backend{initial_backend()};

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  return b == Backend::kScalar || (b == Backend::kAvx2 && cpu_has_avx2());
}

Backend active_backend() noexcept { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw ArgumentError("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  }
  g_backend.store(b, std::memory_order_relaxed);
}

void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m) {
#if defined(QUANVNEXT_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) return avx2::apply_gate(amps, dim, qubit, m);
#endif
  scalar::apply_gate(amps, dim, qubit, m);
}

Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m) {
#if defined(QUANVNEXT_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) return avx2::gate_inner(bra, ket, dim, qubit, m);
#endif
  return scalar::gate_inner(bra, ket, dim, qubit, m);
}

void probabilities(const Complex* amps, double* probs, std::size_t dim) {
#if defined(QUANVNEXT_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) return avx2::probabilities(amps, probs, dim);
#endif
  scalar::probabilities(amps, probs, dim);
}

}  // namespace quanvnext::qsim::kernels
