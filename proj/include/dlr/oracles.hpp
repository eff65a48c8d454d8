#pragma once

// Definition-level reference computations used only by tests and the verify
// suite. Each one is written from the defining formula with plain loops and
// shares no arithmetic with the library kernels.

#include <cstdint>
#include <functional>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/quantize.hpp"

namespace dlr::oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

double naive_sigmoid(double z);

/// All 2^d points of {-1, 1}^d with probability 2^-d, in the library's atom order.
std::vector<Atom> hypercube_atoms(std::size_t d);

/// Support of a finite law: the hypercube atoms or the explicit atom list.
std::vector<Atom> support_of(const DistributionSpec& dist);

double log_likelihood(const Vec& theta, const Vec& x, int y);

/// Central differences of a scalar function, step h.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& at, double h = 1e-6);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& at, double h = 1e-4);

/// p_theta(m) = sum_x f(x) sum_y p_theta(y|x) q(m|x,y), evaluated from scratch.
Vec message_distribution(const Vec& theta, const std::vector<Atom>& support, const ChannelTable& channel);

/// Trace of E[grad log p_theta(M) grad log p_theta(M)^T] with the gradient
/// of log p_theta(m) taken by central differences.
double fd_message_fisher_trace(const Vec& theta, const std::vector<Atom>& support, const ChannelTable& channel,
                               double h = 1e-5);

/// E ||x||^2 sigma(u) sigma(-u) written as E ||S||^2 summed over both labels.
double raw_fisher_trace(const Vec& theta, const std::vector<Atom>& support);

/// E[S] over the joint law.
Vec score_mean(const Vec& theta, const std::vector<Atom>& support);

/// E_x sum_y sigma(y <theta_true, x>) log(1 + exp(-y <theta_hat, x>)).
double population_risk(const Vec& theta_true, const Vec& theta_hat, const std::vector<Atom>& support);

Mat second_moment(const std::vector<Atom>& support);
Mat hessian(const Vec& theta, const std::vector<Atom>& support);

/// Determinant by Gaussian elimination with partial pivoting.
double determinant(Mat a);

/// Smallest eigenvalue of a symmetric matrix by bisection on the inertia
/// count of A - t I (negative pivots of an unpivoted LDL^T).
double min_eigenvalue_bisection(const Mat& a, double tol = 1e-12);

}  // namespace dlr::oracle
