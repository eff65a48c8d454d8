// Compiled with -mavx2 -mfma; only reached after the runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace dlr::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void row_dots_avx2(const double* rows, std::size_t nrows, std::size_t dim, const double* v,
                   double* out) {
  if (dim < 4) {
    row_dots_scalar(rows, nrows, dim, v, out);
    return;
  }
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot_avx2(rows + r * dim, v, dim);
}

void weighted_row_sum_avx2(const double* rows, const double* w, std::size_t nrows,
                           std::size_t dim, double* out) {
  if (dim < 4) {
    weighted_row_sum_scalar(rows, w, nrows, dim, out);
    return;
  }
  for (std::size_t r = 0; r < nrows; ++r) axpy_avx2(w[r], rows + r * dim, out, dim);
}

void weighted_gram_avx2(const double* rows, const double* w, std::size_t nrows, std::size_t dim,
                        double* out) {
  if (dim < 4) {
    weighted_gram_scalar(rows, w, nrows, dim, out);
    return;
  }
  for (std::size_t r = 0; r < nrows; ++r) {
    const double* x = rows + r * dim;
    for (std::size_t i = 0; i < dim; ++i) axpy_avx2(w[r] * x[i], x, out + i * dim, dim);
  }
}

}  // namespace dlr::simd::detail
