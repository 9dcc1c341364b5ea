#include "bsdelab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace bsdelab::kernels {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  s0 = _mm256_add_pd(s0, s1);
  __m128d lo = _mm256_castpd256_pd128(s0), hi = _mm256_extractf128_pd(s0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

// mul then add, no fma: bit-identical to the scalar loop
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void hermite_avx2(const double* x, double scale, int degree, double* out, std::size_t n,
                  std::size_t stride) {
  const __m256d vs = _mm256_set1_pd(scale), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d u = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    __m256d h0 = one, h1 = u;
    _mm256_storeu_pd(out + i, one);
    if (degree >= 1) _mm256_storeu_pd(out + stride + i, u);
    for (int k = 1; k < degree; ++k) {
      __m256d kk = _mm256_set1_pd(static_cast<double>(k));
      __m256d h2 = _mm256_sub_pd(_mm256_mul_pd(u, h1), _mm256_mul_pd(kk, h0));
      _mm256_storeu_pd(out + (k + 1) * stride + i, h2);
      h0 = h1;
      h1 = h2;
    }
  }
  for (; i < n; ++i) {
    double u = scale * x[i];
    double h0 = 1.0, h1 = u;
    out[i] = 1.0;
    if (degree >= 1) out[stride + i] = u;
    for (int k = 1; k < degree; ++k) {
      double h2 = u * h1 - k * h0;
      out[(k + 1) * stride + i] = h2;
      h0 = h1;
      h1 = h2;
    }
  }
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelTable kAvx2{"avx2", dot_avx2, axpy_avx2, hermite_avx2, mul_avx2};

}  // namespace

const KernelTable* avx2_table() { return cpu_has_avx2() ? &kAvx2 : nullptr; }

}  // namespace bsdelab::kernels

#else

namespace bsdelab::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace bsdelab::kernels

#endif
