#include "kernels_impl.hpp"

namespace dlr::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void row_dots_scalar(const double* rows, std::size_t nrows, std::size_t dim, const double* v,
                     double* out) {
  for (std::size_t r = 0; r < nrows; ++r) out[r] = dot_scalar(rows + r * dim, v, dim);
}

void weighted_row_sum_scalar(const double* rows, const double* w, std::size_t nrows,
                             std::size_t dim, double* out) {
  for (std::size_t r = 0; r < nrows; ++r) axpy_scalar(w[r], rows + r * dim, out, dim);
}

void weighted_gram_scalar(const double* rows, const double* w, std::size_t nrows, std::size_t dim,
                          double* out) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const double* x = rows + r * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      const double wi = w[r] * x[i];
      for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] += wi * x[j];
    }
  }
}

}  // namespace dlr::simd::detail
