#include <cmath>
#include <random>

#include "doctest.h"
#include "dlr/bounds.hpp"
#include "dlr/error.hpp"
#include "dlr/fisher.hpp"
#include "dlr/oracles.hpp"

using namespace dlr;

TEST_CASE("van Trees formula") {
  CHECK(van_trees_bound(1, 1, kUnboundedBox, 1) == 1.0);
  CHECK(van_trees_bound(10, 2, kUnboundedBox, 0.5) == doctest::Approx(0.8).epsilon(1e-15));
  const double b1 = van_trees_bound(100, 5, 0.5, 3.0), b2 = van_trees_bound(100, 5, 1.0, 3.0);
  CHECK(b2 > b1);
  CHECK(b1 == doctest::Approx(25.0 / (300.0 + 5 * M_PI * M_PI / 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(van_trees_bound(0, 1, 1, 1), Error);
}

TEST_CASE("van Trees with the lemma-1 trace reproduces the d^2/(k n sigma^2) branch") {
  const double s2 = 2.0;
  for (double n : {50.0, 500.0, 5000.0})
    for (double k : {1.0, 3.0, 9.0})
      for (double d : {2.0, 20.0, 200.0}) {
        const double vt = van_trees_bound(n, d, kUnboundedBox, 4.0 * s2 * k);
        CHECK(std::abs(vt - d * d / (4.0 * n * k * s2)) <= 1e-12 * vt);
        CHECK(vt / (d * d / (k * n * s2)) == doctest::Approx(0.25).epsilon(1e-14));
      }
}

TEST_CASE("theorem scalings") {
  const TheoremScalings t = theorem_scalings(1000, 5, 10, 1.0, 1.0, 1.0);
  CHECK(t.thm1 == doctest::Approx(0.02).epsilon(1e-15));
  const TheoremScalings big_k = theorem_scalings(1000, 12, 10, 1.0, 1.0, 1.0);
  CHECK(big_k.thm1 == doctest::Approx(10.0 / 1000.0).epsilon(1e-15));
  const TheoremScalings t3 = theorem_scalings(100, 1, 10, 2.0, 1.0, 2.0);
  CHECK(t3.thm3 == doctest::Approx(100.0 / (2.0 * 100.0 * 2.0)).epsilon(1e-15));
  CHECK(t.thm2 == doctest::Approx(std::max(10.0 / 1000.0, 100.0 / (25.0 * 1000.0))).epsilon(1e-15));
  CHECK_THROWS_AS(theorem_scalings(100, 0.5, 10, 1, 1, 1), Error);
}

TEST_CASE("corollary") {
  const CorollaryBound c = corollary_bound(1000, 5, 10, 1.0, 1.0);
  CHECK(c.value == theorem_scalings(1000, 5, 10, 1.0, 1.0, 1.0).thm1);
  CHECK(corollary_bound(1000, 5, 10, 1.0, 0.5).value == doctest::Approx(0.5 * c.value).epsilon(1e-15));
  // d=2, sigma=2: d^4 sigma^4 log(d sigma) = 256 log 4 ~ 355.
  CHECK(corollary_bound(100, 10, 2, 4.0, 1.0).precondition == Precondition::holds);
  CHECK(corollary_bound(10, 10, 2, 4.0, 1.0).precondition == Precondition::fails);
  CHECK(corollary_bound(10, 10, 1, 0.5, 1.0).precondition == Precondition::indeterminate);
  CHECK_THROWS_AS(corollary_bound(10, 10, 1, 1, 0.0), Error);
  CHECK(std::string(to_string(Precondition::holds)) == "holds");
}

TEST_CASE("bound report") {
  BoundInputs in;
  in.n = 1000;
  in.k = 3;
  in.d = 10;
  in.sigma2 = 1.0;
  const BoundReport r = make_bound_report(in);
  CHECK(r.trace_sup == 12.0);
  CHECK(r.van_trees == doctest::Approx(100.0 / 12000.0).epsilon(1e-15));
  CHECK(r.van_trees >= 0.0);
  in.box_radius = 0.1;
  CHECK(make_bound_report(in).van_trees < r.van_trees);
}

TEST_CASE("population Hessian") {
  const auto cube = DistributionSpec::uniform_hypercube(3);
  const Matrix h0 = population_hessian(Parameter::zeros(3), cube);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(h0(i, j) == doctest::Approx(i == j ? 0.25 : 0.0));

  const auto atom = DistributionSpec::finite_support({Atom{{1.0, -2.0}, 1.0}});
  const Matrix ha = population_hessian(Parameter::zeros(2), atom);
  CHECK(ha(0, 1) == -0.5);
  CHECK(ha(1, 1) == 1.0);

  // Matches the finite-difference Hessian of R(theta_hat), which does not depend on theta_true.
  Engine rng = make_engine(12);
  std::normal_distribution<double> n(0.0, 0.7);
  const auto atoms = oracle::hypercube_atoms(3);
  for (int t = 0; t < 5; ++t) {
    Vector th(3), truth(3);
    for (std::size_t j = 0; j < 3; ++j) {
      th[j] = n(rng);
      truth[j] = n(rng);
    }
    const Matrix h = population_hessian(Parameter(th), cube);
    const auto fd = oracle::fd_hessian([&](const oracle::Vec& p) { return oracle::population_risk(truth, p, atoms); }, th);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(h(i, j) - fd[i][j]) <= 1e-5);
        CHECK(h(i, j) == h(j, i));
      }
    CHECK(min_eigenvalue(h) >= -1e-10);
  }
  // p(1-p) is the same for both labels and equals sigma(u) sigma(-u).
  for (double u : {-5.0, -0.3, 0.0, 2.0}) {
    const Parameter one(Vector{u});
    const double p = logistic_prob(one, Vector{1.0}, 1), q = logistic_prob(one, Vector{1.0}, -1);
    CHECK(p * (1 - p) == doctest::Approx(q * (1 - q)).epsilon(1e-15));
    CHECK(p * (1 - p) == doctest::Approx(sigmoid(u) * sigmoid(-u)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(population_hessian(Parameter::zeros(2), DistributionSpec::spherical_gaussian(2, 1.0)), Error);
}

TEST_CASE("second moment matrix") {
  const Matrix m = second_moment_matrix(DistributionSpec::uniform_hypercube(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(m(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("strong convexity check") {
  const auto cube2 = DistributionSpec::uniform_hypercube(2);
  ConvexityParams p{0.1, 0.01, 1.0};
  const ConvexityReport r0 = strong_convexity_check(Parameter::zeros(2), cube2, p, 1.0, 1.0);
  CHECK(r0.lambda_min == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r0.analytic_lower <= 0.25);
  CHECK(r0.t == doctest::Approx(std::sqrt(2.0 * std::log(200.0))).epsilon(1e-14));
  CHECK(r0.delta_ok);

  // Vanishing epsilon and alpha: the analytic value tends to lambda_min(E XX^T) / 4.
  ConvexityParams tiny{1e-12, 1e-12, 1.0};
  CHECK(strong_convexity_check(Parameter::zeros(2), cube2, tiny, 1.0, 1.0).analytic_lower ==
        doctest::Approx(0.25).epsilon(1e-9));

  Engine rng = make_engine(3);
  const double s2 = estimate_subgaussian_param(cube2, {}, rng).value;
  const ConvexityReport r1 = strong_convexity_check(Parameter(Vector{0.1, 0.0}), cube2, p, s2, 1.0);
  // Row sums by brute force over the four points.
  const auto atoms = oracle::hypercube_atoms(2);
  double a00 = 0.0, a01 = 0.0;
  for (const Atom& a : atoms) {
    const double u = 0.1 * a.x[0];
    const double w = a.prob * (oracle::naive_sigmoid(u) * oracle::naive_sigmoid(-u) - 0.9 / 4.0);
    a00 += w * a.x[0] * a.x[0];
    a01 += w * a.x[0] * a.x[1];
  }
  CHECK(r1.row_sums[0] == doctest::Approx(std::abs(a00) + std::abs(a01)).epsilon(1e-14));
  CHECK(r1.row_sum_bound == doctest::Approx(2 * 0.1 * s2 + 2 * 0.01 * s2 * std::log(200.0)).epsilon(1e-14));
  CHECK(r1.row_sum_ok);

  CHECK_THROWS_AS(strong_convexity_check(Parameter(Vector{2.0, 0.0}), cube2, p, 1.0, 1.0), Error);
  CHECK_THROWS_AS(strong_convexity_check(Parameter::zeros(2), cube2, ConvexityParams{1.5, 0.1, 1.0}, 1.0, 1.0), Error);
}

TEST_CASE("default convexity parameters") {
  const ConvexityParams p = default_convexity_params(4, 2.0);
  CHECK(p.epsilon == doctest::Approx(1.0 / 8.0));
  CHECK(p.alpha == doctest::Approx(1.0 / (std::pow(2.0, 1.5) * 8.0)));
  CHECK(p.r == doctest::Approx(1.0 / (4.0 * std::pow(2.0, 1.5) * std::sqrt(std::log(4.0 * std::sqrt(2.0))))));
  const ConvexityParams q = default_convexity_params(1, 0.25);
  CHECK(q.epsilon == 0.5);
  CHECK(q.alpha == 0.5);
  CHECK(q.r == doctest::Approx(8.0));
}
