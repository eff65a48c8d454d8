#pragma once

// Dense double-precision kernels used by the exact support enumerations.
//
// Every kernel has a scalar reference implementation; an AVX2+FMA variant is
// compiled separately and picked at startup when the CPU reports both
// features. Setting DLR_SIMD=scalar in the environment forces the reference
// path. Variants agree to rounding (they reassociate sums), which the kernel
// equivalence tests pin at a relative 1e-12.

#include <cstddef>
#include <span>
#include <string_view>

namespace dlr::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = <rows[r, :], v> for a row-major nrows x dim block
  void (*row_dots)(const double* rows, std::size_t nrows, std::size_t dim, const double* v,
                   double* out);
  // out[:] += sum_r w[r] * rows[r, :]
  void (*weighted_row_sum)(const double* rows, const double* w, std::size_t nrows,
                           std::size_t dim, double* out);
  // out (dim x dim, row-major) += sum_r w[r] * rows[r, :]^T rows[r, :]
  void (*weighted_gram)(const double* rows, const double* w, std::size_t nrows, std::size_t dim,
                        double* out);
};

const KernelTable& scalar_kernels() noexcept;
bool isa_supported(Isa isa) noexcept;
/// Throws dlr::Error if the ISA was not compiled in or the CPU lacks it.
const KernelTable& kernels_for(Isa isa);
/// The table selected for this process.
const KernelTable& kernels() noexcept;
std::string_view isa_name(Isa isa) noexcept;

// Span front-ends over the active table.

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void row_dots(std::span<const double> rows, std::size_t dim, std::span<const double> v,
              std::span<double> out);
void weighted_row_sum(std::span<const double> rows, std::span<const double> w, std::size_t dim,
                      std::span<double> out);
void weighted_gram(std::span<const double> rows, std::span<const double> w, std::size_t dim,
                   std::span<double> out);

}  // namespace dlr::simd
