#include <random>
#include <vector>

#include "doctest.h"
#include "dlr/error.hpp"
#include "dlr/rng.hpp"
#include "dlr/simd/kernels.hpp"

using namespace dlr;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::kernels_for(simd::Isa::scalar).isa == simd::Isa::scalar);
  CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
}

TEST_CASE("scalar kernels on hand-sized inputs") {
  const auto& k = simd::scalar_kernels();
  const double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(k.dot(a, b, 3) == 32.0);
  double y[] = {1, 1, 1};
  k.axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  const double rows[] = {1, 0, 0, 1, 1, 1};
  double out[3];
  k.row_dots(rows, 3, 2, a, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 3.0);
  const double w[] = {1, 2, 3};
  double sum[2] = {0, 0};
  k.weighted_row_sum(rows, w, 3, 2, sum);
  CHECK(sum[0] == 4.0);
  CHECK(sum[1] == 5.0);
  double g[4] = {0, 0, 0, 0};
  k.weighted_gram(rows, w, 3, 2, g);
  CHECK(g[0] == 4.0);
  CHECK(g[1] == 3.0);
  CHECK(g[2] == 3.0);
  CHECK(g[3] == 5.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!simd::isa_supported(simd::Isa::avx2)) {
    CHECK_THROWS_AS(simd::kernels_for(simd::Isa::avx2), Error);
    return;
  }
  const auto& s = simd::scalar_kernels();
  const auto& v = simd::kernels_for(simd::Isa::avx2);
  std::mt19937_64 rng(42);
  for (std::size_t dim = 1; dim <= 37; ++dim) {
    for (std::size_t nrows : {1, 2, 7, 64}) {
      const auto a = random_vec(nrows * dim, rng);
      const auto x = random_vec(dim, rng);
      const auto w = random_vec(nrows, rng);
      CHECK(rel(v.dot(a.data(), x.data(), dim), s.dot(a.data(), x.data(), dim)) <= 1e-12);

      auto y1 = random_vec(dim, rng);
      auto y2 = y1;
      s.axpy(0.7, x.data(), y1.data(), dim);
      v.axpy(0.7, x.data(), y2.data(), dim);
      for (std::size_t i = 0; i < dim; ++i) CHECK(rel(y2[i], y1[i]) <= 1e-12);

      std::vector<double> r1(nrows), r2(nrows);
      s.row_dots(a.data(), nrows, dim, x.data(), r1.data());
      v.row_dots(a.data(), nrows, dim, x.data(), r2.data());
      for (std::size_t i = 0; i < nrows; ++i) CHECK(rel(r2[i], r1[i]) <= 1e-12);

      std::vector<double> s1(dim, 0.0), s2(dim, 0.0);
      s.weighted_row_sum(a.data(), w.data(), nrows, dim, s1.data());
      v.weighted_row_sum(a.data(), w.data(), nrows, dim, s2.data());
      for (std::size_t i = 0; i < dim; ++i) CHECK(rel(s2[i], s1[i]) <= 1e-12);

      std::vector<double> g1(dim * dim, 0.0), g2(dim * dim, 0.0);
      s.weighted_gram(a.data(), w.data(), nrows, dim, g1.data());
      v.weighted_gram(a.data(), w.data(), nrows, dim, g2.data());
      for (std::size_t i = 0; i < dim * dim; ++i) CHECK(rel(g2[i], g1[i]) <= 1e-12);
    }
  }
}

TEST_CASE("span front-ends check lengths") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(simd::dot(a, b), Error);
  std::vector<double> out(2);
  CHECK_THROWS_AS(simd::row_dots(std::vector<double>(5), 2, a, out), Error);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, Purpose::data, {0}) != derive_seed(1, Purpose::shuffle, {0}));
  Engine a = make_engine(9), b = make_engine(9);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  Engine c = make_engine(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(c);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
