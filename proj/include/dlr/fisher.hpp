#pragma once

// Exact Fisher-information traces for raw samples and quantized messages on
// finite supports, the per-message budget bounds, and tail-parameter
// estimation under the super-exponential convention
//   sub-Gaussian:    E exp(<u,X>^2 / s2) <= 2
//   sub-exponential: E exp(|<u,X>| / s)  <= 2

#include <cstdint>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/quantize.hpp"

namespace dlr {

/// Message masses below this are treated as zero and contribute nothing.
inline constexpr double kMinMessageMass = 1e-300;

struct LemmaBounds {
  double lemma1 = 0.0;  // 4 sigma^2 k       (sub-Gaussian score)
  double lemma2 = 0.0;  // 4 sigma_e^2 k^2   (sub-exponential score)
  double lemma3 = 0.0;  // 2^k I0            (bounded second moment)
};

LemmaBounds lemma_bounds(unsigned k, double sigma2, double sigma_e, double i0);

struct TailParams {
  double sigma2 = 0.0;
  double sigma_e = 0.0;
  double i0 = 0.0;
};

struct FisherReport {
  unsigned bits = 0;
  double trace_raw = 0.0;
  double trace_msg = 0.0;
  std::vector<double> message_mass;        // p_theta(m), length 2^k
  std::vector<Vector> conditional_score;   // E[S | m]; zero vector when p_theta(m) is zero
  TailParams tails;
  LemmaBounds lemma;
};

/// Tr I_{X,Y}(theta) = E ||S||^2 = E_x[ ||x||^2 sigma(u) sigma(-u) ], u = <theta, x>.
double trace_fisher_raw(const Parameter& theta, const DistributionSpec& dist);

/// Message-side quantities only: masses, conditional score means and
///   Tr I_M(theta) = sum_m p_theta(m) || E[S | m] ||^2.
/// Report fields `tails` and `lemma` are left zero.
FisherReport message_fisher(const Parameter& theta, const DistributionSpec& dist, const ChannelTable& channel);

/// Full report with lemma bounds computed from the given tail parameters.
FisherReport trace_fisher_message(const Parameter& theta, const DistributionSpec& dist,
                                  const Quantizer& quantizer, const TailParams& tails);
/// Full report; tail parameters of the score at theta are estimated with
/// default options and a fixed seed (sigma^2, sigma_e by direction search,
/// I0 exactly).
FisherReport trace_fisher_message(const Parameter& theta, const DistributionSpec& dist,
                                  const Quantizer& quantizer);

struct TailEstimateOptions {
  std::size_t directions = 64;     // random unit directions, on top of the axes
  bool include_axes = true;
  std::size_t mc_samples = 20000;  // draws for distributions without finite support
  double floor = 1e-12;            // returned when every projection is zero
  double cap = 1e8;                // larger answers mean "not sub-Gaussian at this cap"
};

struct TailEstimate {
  double value = 0.0;
  Vector worst_direction;
  std::size_t directions_tested = 0;
  /// Only finitely many directions are searched, so the estimate never
  /// exceeds the true parameter.
  bool lower_estimate = true;
};

TailEstimate estimate_subgaussian_param(const DistributionSpec& dist, const TailEstimateOptions& opts, Engine& rng);
TailEstimate estimate_subexponential_param(const DistributionSpec& dist, const TailEstimateOptions& opts, Engine& rng);

/// Scalar solves on explicit weighted samples (weights sum to 1).
double solve_subgaussian(std::span<const double> values, std::span<const double> weights,
                         double floor = 1e-12, double cap = 1e8);
double solve_subexponential(std::span<const double> values, std::span<const double> weights,
                            double floor = 1e-12, double cap = 1e8);

/// sup_{||u||=1} E <u, X>^2, the largest eigenvalue of E[X X^T].
double second_moment_bound(const DistributionSpec& dist);

/// Law of the score vector S_theta(X, Y) as a finite-support distribution.
DistributionSpec score_distribution(const Parameter& theta, const DistributionSpec& dist);

TailParams estimate_tail_params(const DistributionSpec& dist, std::uint64_t seed = 0x5eedf15e,
                                const TailEstimateOptions& opts = {});

/// Tail parameters of the score vector S_theta(X, Y) under the model. By the
/// pointwise bound |<u, S>| <= |<u, x>| these never exceed those of X when the
/// same directions are searched (same seed).
TailParams estimate_score_tail_params(const Parameter& theta, const DistributionSpec& dist,
                                      std::uint64_t seed = 0x5eedf15e, const TailEstimateOptions& opts = {});

}  // namespace dlr
