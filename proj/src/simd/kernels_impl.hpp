#pragma once

#include <cstddef>

namespace dlr::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void row_dots_scalar(const double* rows, std::size_t nrows, std::size_t dim, const double* v,
                     double* out);
void weighted_row_sum_scalar(const double* rows, const double* w, std::size_t nrows,
                             std::size_t dim, double* out);
void weighted_gram_scalar(const double* rows, const double* w, std::size_t nrows, std::size_t dim,
                          double* out);

#if defined(DLR_BUILD_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void row_dots_avx2(const double* rows, std::size_t nrows, std::size_t dim, const double* v,
                   double* out);
void weighted_row_sum_avx2(const double* rows, const double* w, std::size_t nrows,
                           std::size_t dim, double* out);
void weighted_gram_avx2(const double* rows, const double* w, std::size_t nrows, std::size_t dim,
                        double* out);
#endif

}  // namespace dlr::simd::detail
