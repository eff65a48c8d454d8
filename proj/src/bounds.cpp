#include "dlr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dlr/error.hpp"
#include "dlr/simd/kernels.hpp"

namespace dlr {

double van_trees_bound(double n, double d, double box_radius, double trace_msg_sup) {
  if (!(n > 0.0) || !(d > 0.0) || !(box_radius > 0.0) || !(trace_msg_sup >= 0.0))
    throw Error("van_trees_bound: inputs must be positive");
  const double prior = std::isinf(box_radius) ? 0.0 : d * std::numbers::pi * std::numbers::pi / (box_radius * box_radius);
  const double denom = n * trace_msg_sup + prior;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return d * d / denom;
}

TheoremScalings theorem_scalings(double n, double k, double d, double sigma2, double sigma_e, double i0) {
  if (!(n > 0.0) || !(k >= 1.0) || !(d > 0.0) || !(sigma2 > 0.0) || !(sigma_e > 0.0) || !(i0 > 0.0))
    throw Error("theorem_scalings: inputs must be positive and k >= 1");
  const double se2 = sigma_e * sigma_e;
  TheoremScalings t;
  t.thm1 = std::max(d / (n * sigma2), d * d / (k * n * sigma2));
  t.thm2 = std::max(d / (n * se2), d * d / (k * k * n * se2));
  t.thm3 = std::max(d / (n * sigma2), d * d / (std::exp2(k) * n * i0));
  return t;
}

const char* to_string(Precondition p) {
  switch (p) {
    case Precondition::holds: return "holds";
    case Precondition::fails: return "fails";
    case Precondition::indeterminate: return "indeterminate";
  }
  return "?";
}

CorollaryBound corollary_bound(double n, double k, double d, double sigma2, double delta) {
  if (!(delta > 0.0)) throw Error("corollary_bound: delta must be positive");
  CorollaryBound c;
  const double sigma = std::sqrt(sigma2);
  c.value = delta * std::max(d / (n * sigma2), d * d / (k * n * sigma2));
  const double ds = d * sigma;
  if (ds <= 1.0) {
    c.precondition = Precondition::indeterminate;
  } else {
    const double need = std::pow(d, 4) * sigma2 * sigma2 * std::log(ds);
    c.precondition = n * k >= need ? Precondition::holds : Precondition::fails;
  }
  return c;
}

BoundReport make_bound_report(const BoundInputs& in) {
  BoundReport r;
  r.inputs = in;
  r.trace_sup = 4.0 * in.sigma2 * in.k;
  r.van_trees = van_trees_bound(in.n, in.d, in.box_radius, r.trace_sup);
  r.theorems = theorem_scalings(in.n, in.k, in.d, in.sigma2, in.sigma_e, in.i0);
  r.corollary = corollary_bound(in.n, in.k, in.d, in.sigma2, in.delta);
  return r;
}

// ---- matrices --------------------------------------------------------------------

namespace {

void require_enumerable(const DistributionSpec& dist, const char* where) {
  if (!dist.enumerable())
    throw Error(std::string(where) + ": unsupported distribution " + to_string(dist.kind) +
                " (finite support required)");
}

}  // namespace

Matrix second_moment_matrix(const DistributionSpec& dist) {
  require_enumerable(dist, "second_moment_matrix");
  Matrix m(dist.dim, dist.dim);
  for_each_support_block(dist, [&](const SupportBlock& b) { simd::weighted_gram(b.rows, b.probs, b.dim, m.data()); });
  return m;
}

Matrix population_hessian(const Parameter& theta_hat, const DistributionSpec& dist) {
  require_enumerable(dist, "population_hessian");
  if (dist.dim != theta_hat.dim()) throw Error("population_hessian: dimension mismatch");
  Matrix h(dist.dim, dist.dim);
  std::vector<double> margins;
  std::vector<double> w;
  for_each_support_block(dist, [&](const SupportBlock& b) {
    margins.resize(b.count());
    w.resize(b.count());
    simd::row_dots(b.rows, b.dim, theta_hat.values(), margins);
    for (std::size_t r = 0; r < b.count(); ++r) w[r] = b.probs[r] * sigmoid(margins[r]) * sigmoid(-margins[r]);
    simd::weighted_gram(b.rows, w, b.dim, h.data());
  });
  // Symmetrize away accumulation-order differences between (i,j) and (j,i).
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i + 1; j < h.cols(); ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));
  return h;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return m(0, 0);
  return jacobi_eigen(m).values.front();
}

double max_eigenvalue(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return m(0, 0);
  return jacobi_eigen(m).values.back();
}

ConvexityParams default_convexity_params(std::size_t d, double sigma2) {
  if (d == 0 || !(sigma2 > 0.0)) throw Error("default_convexity_params: need d >= 1 and sigma2 > 0");
  const double dd = static_cast<double>(d);
  const double s = std::sqrt(sigma2);
  ConvexityParams p;
  p.epsilon = std::min(0.5, 1.0 / (sigma2 * dd));
  p.alpha = std::min(0.5, 1.0 / (s * s * s * std::pow(dd, 1.5)));
  p.r = 1.0 / (dd * s * s * s * std::sqrt(std::log(std::max(dd * s, std::numbers::e))));
  return p;
}

ConvexityReport strong_convexity_check(const Parameter& theta_hat, const DistributionSpec& dist,
                                       const ConvexityParams& params, double sigma2, double delta) {
  require_enumerable(dist, "strong_convexity_check");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0) || !(params.alpha > 0.0 && params.alpha < 1.0) ||
      !(params.r > 0.0) || !(sigma2 > 0.0))
    throw Error("strong_convexity_check: need 0 < epsilon, alpha < 1, r > 0, sigma2 > 0");
  // Relative slack admits boundary points whose norm rounds above r.
  if (theta_hat.norm() > params.r * (1.0 + 1e-12))
    throw Error("strong_convexity_check: ||theta_hat|| = " + std::to_string(theta_hat.norm()) +
                " exceeds r = " + std::to_string(params.r));

  const std::size_t d = dist.dim;
  const double dd = static_cast<double>(d);
  const double floor_weight = (1.0 - params.epsilon) / 4.0;
  const double log_term = std::log(2.0 / params.alpha);

  ConvexityReport rep;
  rep.params = params;
  rep.hessian = population_hessian(theta_hat, dist);
  rep.lambda_min = min_eigenvalue(rep.hessian);
  rep.lambda_min_second_moment = min_eigenvalue(second_moment_matrix(dist));
  rep.delta_ok = rep.lambda_min_second_moment >= delta;
  rep.analytic_lower = floor_weight * rep.lambda_min_second_moment - dd * params.epsilon * sigma2 -
                       dd * params.alpha * sigma2 * log_term;
  rep.row_sum_bound = dd * params.epsilon * sigma2 + dd * params.alpha * sigma2 * log_term;
  rep.t = std::sqrt(2.0 * params.r * params.r * sigma2 * log_term);

  // A = E[(sigma(u) sigma(-u) - (1-eps)/4) X X^T]; accumulate A itself, then |.|.
  Matrix a(d, d);
  std::vector<double> margins;
  std::vector<double> w;
  for_each_support_block(dist, [&](const SupportBlock& b) {
    margins.resize(b.count());
    w.resize(b.count());
    simd::row_dots(b.rows, b.dim, theta_hat.values(), margins);
    for (std::size_t r = 0; r < b.count(); ++r) {
      const double curv = sigmoid(margins[r]) * sigmoid(-margins[r]);
      if (curv < floor_weight) rep.e_complement_mass += b.probs[r];
      w[r] = b.probs[r] * (curv - floor_weight);
    }
    simd::weighted_gram(b.rows, w, b.dim, a.data());
  });
  rep.row_sums.assign(d, 0.0);
  rep.row_sum_ok = true;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) rep.row_sums[i] += std::abs(a(i, j));
    rep.row_sum_ok = rep.row_sum_ok && rep.row_sums[i] <= rep.row_sum_bound;
  }
  return rep;
}

}  // namespace dlr
