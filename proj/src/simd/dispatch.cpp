#include <cstdlib>
#include <cstring>
#include <string>

#include "dlr/error.hpp"
#include "dlr/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace dlr::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar,
                              detail::dot_scalar,
                              detail::axpy_scalar,
                              detail::row_dots_scalar,
                              detail::weighted_row_sum_scalar,
                              detail::weighted_gram_scalar};

#if defined(DLR_BUILD_AVX2)
constexpr KernelTable kAvx2{Isa::avx2,
                            detail::dot_avx2,
                            detail::axpy_avx2,
                            detail::row_dots_avx2,
                            detail::weighted_row_sum_avx2,
                            detail::weighted_gram_avx2};
#endif

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("DLR_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0)
    return kScalar;
#if defined(DLR_BUILD_AVX2)
  if (isa_supported(Isa::avx2)) return kAvx2;
#endif
  return kScalar;
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw Error(std::string("simd: length mismatch in ") + what);
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(DLR_BUILD_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) throw Error("simd: ISA not available: " + std::string(isa_name(isa)));
#if defined(DLR_BUILD_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& kernels() noexcept {
  static const KernelTable& active = select();
  return active;
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_len(b.size(), a.size(), "dot");
  return kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_len(y.size(), x.size(), "axpy");
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void row_dots(std::span<const double> rows, std::size_t dim, std::span<const double> v,
              std::span<double> out) {
  check_len(v.size(), dim, "row_dots");
  check_len(rows.size(), out.size() * dim, "row_dots");
  kernels().row_dots(rows.data(), out.size(), dim, v.data(), out.data());
}

void weighted_row_sum(std::span<const double> rows, std::span<const double> w, std::size_t dim,
                      std::span<double> out) {
  check_len(out.size(), dim, "weighted_row_sum");
  check_len(rows.size(), w.size() * dim, "weighted_row_sum");
  kernels().weighted_row_sum(rows.data(), w.data(), w.size(), dim, out.data());
}

void weighted_gram(std::span<const double> rows, std::span<const double> w, std::size_t dim,
                   std::span<double> out) {
  check_len(out.size(), dim * dim, "weighted_gram");
  check_len(rows.size(), w.size() * dim, "weighted_gram");
  kernels().weighted_gram(rows.data(), w.data(), w.size(), dim, out.data());
}

}  // namespace dlr::simd
