#include <random>

#include "doctest.h"
#include "dlr/bounds.hpp"
#include "dlr/error.hpp"
#include "dlr/linalg.hpp"
#include "dlr/oracles.hpp"

using namespace dlr;

TEST_CASE("identity and diagonal spectra") {
  CHECK(min_eigenvalue(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-14));
  const double diag[] = {3.0, -2.0, 7.0};
  CHECK(min_eigenvalue(Matrix::diagonal(diag)) == -2.0);
  CHECK(max_eigenvalue(Matrix::diagonal(diag)) == 7.0);
  Matrix one(1, 1);
  one(0, 0) = -0.125;
  CHECK(min_eigenvalue(one) == -0.125);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix m = Matrix::identity(3);
  m(0, 2) = 1e-3;
  CHECK_THROWS_AS(jacobi_eigen(m), Error);
  m(0, 2) = 1e-9;
  CHECK_NOTHROW(jacobi_eigen(m));
}

TEST_CASE("random symmetric d=6: smallest eigenvalue certified by LU sign and Rayleigh quotient") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 6;
    Matrix m(d, d);
    oracle::Mat o(d, oracle::Vec(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = o[i][j] = o[j][i] = n01(rng);
    const SymmetricEigen e = jacobi_eigen(m);
    const double lam = e.values.front();

    // Below the smallest eigenvalue M - tI is positive definite: det > 0.
    oracle::Mat shifted = o;
    for (std::size_t i = 0; i < d; ++i) shifted[i][i] -= lam - 1e-6;
    CHECK(oracle::determinant(shifted) > 0.0);
    // Just above it exactly one eigenvalue is negative: det < 0.
    shifted = o;
    for (std::size_t i = 0; i < d; ++i) shifted[i][i] -= lam + 1e-6;
    CHECK(oracle::determinant(shifted) < 0.0);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double vi = e.vectors(i, 0);
      den += vi * vi;
      for (std::size_t j = 0; j < d; ++j) num += vi * o[i][j] * e.vectors(j, 0);
    }
    CHECK(num / den == doctest::Approx(lam).epsilon(1e-9));
    CHECK(lam == doctest::Approx(oracle::min_eigenvalue_bisection(o)).epsilon(1e-9));
    for (std::size_t i = 1; i < d; ++i) CHECK(e.values[i - 1] <= e.values[i]);
  }
}

TEST_CASE("eigenvectors are orthonormal and diagonalize the input") {
  Matrix m(3, 3);
  const double v[3][3] = {{2, 1, 0}, {1, 2, 1}, {0, 1, 2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[i][j];
  const SymmetricEigen e = jacobi_eigen(m);
  CHECK(e.values[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.values[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += e.vectors(i, a) * e.vectors(i, b);
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
    }
}
