#pragma once

// Central estimator for the group-partition scheme: decode each message into
// its group's (k-1)-dimensional logistic problem, solve every problem with
// projected averaged SGD, and scatter the group estimates into theta_hat.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/quantize.hpp"
#include "dlr/rng.hpp"

namespace dlr {

struct SGDConfig {
  double step_scale = 1.0;                      // c0 in eta_t = c0 / sqrt(t)
  std::optional<double> radius;                 // rho; defaults to 2 sqrt(dim)
  std::size_t epochs = 1;
  std::optional<std::size_t> averaging_start;   // defaults to half of the total steps

  void validate() const;
  double radius_for(std::size_t dim) const;
  std::size_t averaging_start_for(std::size_t total_steps) const;
};

/// Gradient of log(1 + exp(-y <theta, x>)) in theta: -y x sigma(-y <theta, x>).
Vector logistic_loss_gradient(std::span<const double> theta, const LabeledSample& sample);

/// theta_{t+1} = P_rho(theta_t - eta_t g_t) from theta_0 = 0, one shuffled
/// pass per epoch; returns the average of the iterates after the averaging
/// start. Throws on empty input or inconsistent dimensions.
Vector sgd_logistic(std::span<const LabeledSample> samples, const SGDConfig& config, Engine& rng);

struct GroupEstimate {
  std::size_t group_id = 0;
  Vector local;
  std::size_t samples = 0;
};

struct DistributedEstimate {
  Parameter theta = Parameter::zeros(1);
  std::vector<GroupEstimate> groups;
  std::vector<std::size_t> empty_groups;   // groups that received no messages; coordinates left at 0
};

/// Stream seed for a group's SGD shuffling, derived from the estimate seed.
std::uint64_t group_stream_seed(std::uint64_t seed, std::size_t group_id);

/// Message i belongs to sample i and is decoded with assignment.group_of(i).
/// Groups run on up to `threads` workers; the result is independent of the
/// worker count.
DistributedEstimate distributed_estimate(std::span<const Message> messages, const GroupAssignment& assignment,
                                         const SGDConfig& config, std::uint64_t seed, std::size_t threads = 1);

// ---- class-conditional construction on the hypercube ------------------------

/// Y ~ unif{-1, +1}; given Y, the X_j are independent with
/// p(x_j | y) = exp(y theta_j x_j / 2) / (exp(theta_j / 2) + exp(-theta_j / 2)),
/// i.e. P(X_j = Y) = sigma(theta_j). The posterior of Y is then logistic in theta.
LabeledSample sample_class_conditional(const Parameter& theta, Engine& rng);

/// Marginal law of X under the construction, as an exact finite support
/// (2^d atoms in hypercube order). d <= 20.
DistributionSpec class_conditional_marginal(const Parameter& theta);

struct ClassConditionalCheck {
  double max_posterior_error = 0.0;   // vs. exp(y a/2) / (exp(a/2) + exp(-a/2)) and sigma(y a)
  double max_block_error = 0.0;       // block marginals product-form and logistic in the sub-vector
  std::size_t blocks_checked = 0;
  bool passed = false;
};

/// Exhaustive Bayes computation over {-1,1}^d for d <= 6, covering every
/// non-empty coordinate block.
ClassConditionalCheck verify_class_conditional_construction(const Parameter& theta, double tolerance = 1e-10);

}  // namespace dlr
