#pragma once

// Numeric evaluation of the van Trees bound, the constant-free theorem
// scalings, and the strong-convexity verifier for the logistic risk.
// Theorem values carry no absolute constant: they are scaling values only.

#include <cstddef>
#include <limits>
#include <optional>

#include "dlr/linalg.hpp"
#include "dlr/model.hpp"

namespace dlr {

inline constexpr double kUnboundedBox = std::numeric_limits<double>::infinity();

/// d^2 / (n Tr(I_M) + d pi^2 / B^2). B = infinity drops the prior term.
double van_trees_bound(double n, double d, double box_radius, double trace_msg_sup);

struct TheoremScalings {
  double thm1 = 0.0;  // max{ d/(n s2), d^2/(k n s2) }
  double thm2 = 0.0;  // max{ d/(n se^2), d^2/(k^2 n se^2) }
  double thm3 = 0.0;  // max{ d/(n s2), d^2/(2^k n I0) }
};

TheoremScalings theorem_scalings(double n, double k, double d, double sigma2, double sigma_e, double i0);

enum class Precondition { holds, fails, indeterminate };
const char* to_string(Precondition p);

struct CorollaryBound {
  double value = 0.0;  // delta * thm1
  Precondition precondition = Precondition::indeterminate;  // n k >= d^4 s^4 log(d s)
};

CorollaryBound corollary_bound(double n, double k, double d, double sigma2, double delta);

struct BoundInputs {
  double n = 1;
  double k = 1;
  double d = 1;
  double sigma2 = 1;
  double sigma_e = 1;
  double i0 = 1;
  double delta = 1;
  double box_radius = kUnboundedBox;
};

struct BoundReport {
  BoundInputs inputs;
  double trace_sup = 0.0;   // 4 sigma^2 k, fed to van Trees
  double van_trees = 0.0;
  TheoremScalings theorems;
  CorollaryBound corollary;
};

BoundReport make_bound_report(const BoundInputs& in);

/// E[X X^T] over an enumerable distribution.
Matrix second_moment_matrix(const DistributionSpec& dist);

/// Hessian of theta_hat -> R_theta(theta_hat): E[sigma(u) sigma(-u) X X^T],
/// u = <theta_hat, X>. Independent of the true parameter.
Matrix population_hessian(const Parameter& theta_hat, const DistributionSpec& dist);

/// Smallest eigenvalue via cyclic Jacobi (1e-10 off-diagonal tolerance,
/// at most 100 sweeps). Throws for asymmetric input or non-convergence.
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

struct ConvexityParams {
  double epsilon = 0.0;
  double alpha = 0.0;
  double r = 0.0;
};

/// epsilon = 1/(s2 d), alpha = 1/(s^3 d^{3/2}), r = 1/(d s^3 sqrt(log(d s))).
/// epsilon and alpha are capped at 1/2 and the log argument is floored at e.
ConvexityParams default_convexity_params(std::size_t d, double sigma2);

struct ConvexityReport {
  Matrix hessian;
  double lambda_min = 0.0;
  double lambda_min_second_moment = 0.0;  // lambda_min(E[X X^T])
  bool delta_ok = false;                  // lambda_min(E[X X^T]) >= delta
  double analytic_lower = 0.0;            // (1-eps)/4 lambda_min(E XX^T) - d eps s2 - d alpha s2 log(2/alpha)
  Vector row_sums;                        // sum_j |A_ij|
  double row_sum_bound = 0.0;             // d eps s2 + d alpha s2 log(2/alpha)
  bool row_sum_ok = false;
  double e_complement_mass = 0.0;         // P(sigma(u) sigma(-u) < (1-eps)/4)
  double t = 0.0;                         // sqrt(2 r^2 s2 log(2/alpha))
  ConvexityParams params;
};

ConvexityReport strong_convexity_check(const Parameter& theta_hat, const DistributionSpec& dist,
                                       const ConvexityParams& params, double sigma2, double delta);

}  // namespace dlr
