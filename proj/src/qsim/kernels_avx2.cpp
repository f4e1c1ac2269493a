#include <immintrin.h>

#include "quanvnext/qsim/kernels.hpp"

// Compiled with -mavx2 -mfma; only reached through the dispatcher after a
// runtime CPU check. Each __m256d holds two interleaved complex doubles.

namespace quanvnext::qsim::kernels::avx2 {
namespace {

// Lane-wise complex multiply: x * (re + i*im) where re/im hold the real and
// imaginary parts duplicated across each complex lane.
inline __m256d cmul(__m256d x, __m256d re, __m256d im) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(x, re, _mm256_mul_pd(swapped, im));
}

inline __m256d splat_re(Complex c) { return _mm256_set1_pd(c.real()); }
inline __m256d splat_im(Complex c) { return _mm256_set1_pd(c.imag()); }

// (c0 in the low complex lane, c1 in the high one)
inline __m256d pair_re(Complex c0, Complex c1) {
  return _mm256_setr_pd(c0.real(), c0.real(), c1.real(), c1.real());
}
inline __m256d pair_im(Complex c0, Complex c1) {
  return _mm256_setr_pd(c0.imag(), c0.imag(), c1.imag(), c1.imag());
}

inline double* raw(Complex* p) { return reinterpret_cast<double*>(p); }
inline const double* raw(const Complex* p) { return reinterpret_cast<const double*>(p); }

// Sum of conj(bra) * t over both complex lanes, as (re, im) accumulators.
inline void accumulate_conj_dot(__m256d bra, __m256d t, __m256d& re_acc, __m256d& im_acc) {
  re_acc = _mm256_fmadd_pd(bra, t, re_acc);
  im_acc = _mm256_fmadd_pd(bra, _mm256_permute_pd(t, 0b0101), im_acc);
}

inline Complex reduce_conj_dot(__m256d re_acc, __m256d im_acc) {
  alignas(32) double re[4];
  alignas(32) double im[4];
  _mm256_store_pd(re, re_acc);
  _mm256_store_pd(im, im_acc);
  // im lanes hold (br*ti, bi*tr); Im(conj(b) t) = br*ti - bi*tr
  return {(re[0] + re[1]) + (re[2] + re[3]), (im[0] - im[1]) + (im[2] - im[3])};
}

}  // namespace

void apply_gate(Complex* amps, std::size_t dim, unsigned qubit, const Complex* m) {
  if (qubit == 0) {
    const __m256d top_re = pair_re(m[0], m[2]);
    const __m256d top_im = pair_im(m[0], m[2]);
    const __m256d bot_re = pair_re(m[1], m[3]);
    const __m256d bot_im = pair_im(m[1], m[3]);
    for (std::size_t i = 0; i < dim; i += 2) {
      const __m256d v = _mm256_loadu_pd(raw(amps + i));
      const __m256d a = _mm256_permute2f128_pd(v, v, 0x00);
      const __m256d b = _mm256_permute2f128_pd(v, v, 0x11);
      _mm256_storeu_pd(raw(amps + i), _mm256_add_pd(cmul(a, top_re, top_im), cmul(b, bot_re, bot_im)));
    }
    return;
  }
  const __m256d m00r = splat_re(m[0]), m00i = splat_im(m[0]);
  const __m256d m01r = splat_re(m[1]), m01i = splat_im(m[1]);
  const __m256d m10r = splat_re(m[2]), m10i = splat_im(m[2]);
  const __m256d m11r = splat_re(m[3]), m11i = splat_im(m[3]);
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; i += 2) {
      const __m256d a = _mm256_loadu_pd(raw(amps + i));
      const __m256d b = _mm256_loadu_pd(raw(amps + i + stride));
      _mm256_storeu_pd(raw(amps + i), _mm256_add_pd(cmul(a, m00r, m00i), cmul(b, m01r, m01i)));
      _mm256_storeu_pd(raw(amps + i + stride),
                       _mm256_add_pd(cmul(a, m10r, m10i), cmul(b, m11r, m11i)));
    }
  }
}

Complex gate_inner(const Complex* bra, const Complex* ket, std::size_t dim, unsigned qubit,
                   const Complex* m) {
  __m256d re_acc = _mm256_setzero_pd();
  __m256d im_acc = _mm256_setzero_pd();
  if (qubit == 0) {
    const __m256d top_re = pair_re(m[0], m[2]);
    const __m256d top_im = pair_im(m[0], m[2]);
    const __m256d bot_re = pair_re(m[1], m[3]);
    const __m256d bot_im = pair_im(m[1], m[3]);
    for (std::size_t i = 0; i < dim; i += 2) {
      const __m256d v = _mm256_loadu_pd(raw(ket + i));
      const __m256d a = _mm256_permute2f128_pd(v, v, 0x00);
      const __m256d b = _mm256_permute2f128_pd(v, v, 0x11);
      const __m256d t = _mm256_add_pd(cmul(a, top_re, top_im), cmul(b, bot_re, bot_im));
      accumulate_conj_dot(_mm256_loadu_pd(raw(bra + i)), t, re_acc, im_acc);
    }
    return reduce_conj_dot(re_acc, im_acc);
  }
  const __m256d m00r = splat_re(m[0]), m00i = splat_im(m[0]);
  const __m256d m01r = splat_re(m[1]), m01i = splat_im(m[1]);
  const __m256d m10r = splat_re(m[2]), m10i = splat_im(m[2]);
  const __m256d m11r = splat_re(m[3]), m11i = splat_im(m[3]);
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; i += 2) {
      const __m256d a = _mm256_loadu_pd(raw(ket + i));
      const __m256d b = _mm256_loadu_pd(raw(ket + i + stride));
      const __m256d top = _mm256_add_pd(cmul(a, m00r, m00i), cmul(b, m01r, m01i));
      const __m256d bot = _mm256_add_pd(cmul(a, m10r, m10i), cmul(b, m11r, m11i));
      accumulate_conj_dot(_mm256_loadu_pd(raw(bra + i)), top, re_acc, im_acc);
      accumulate_conj_dot(_mm256_loadu_pd(raw(bra + i + stride)), bot, re_acc, im_acc);
    }
  }
  return reduce_conj_dot(re_acc, im_acc);
}

void probabilities(const Complex* amps, double* probs, std::size_t dim) {
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(raw(amps + i));
    const __m256d v1 = _mm256_loadu_pd(raw(amps + i + 2));
    // hadd gives (p0, p2, p1, p3); permute restores order
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
    _mm256_storeu_pd(probs + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < dim; ++i) probs[i] = std::norm(amps[i]);
}

}  // namespace quanvnext::qsim::kernels::avx2
