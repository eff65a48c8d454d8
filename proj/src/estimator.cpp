#include "dlr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlr/error.hpp"
#include "dlr/parallel.hpp"
#include "dlr/simd/kernels.hpp"

namespace dlr {

void SGDConfig::validate() const {
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) throw Error("sgd: step scale must be positive");
  if (radius && (!(*radius > 0.0) || !std::isfinite(*radius))) throw Error("sgd: projection radius must be positive");
  if (epochs < 1) throw Error("sgd: epoch count must be at least 1");
}

double SGDConfig::radius_for(std::size_t dim) const {
  return radius ? *radius : 2.0 * std::sqrt(static_cast<double>(dim));
}

std::size_t SGDConfig::averaging_start_for(std::size_t total_steps) const {
  const std::size_t start = averaging_start ? *averaging_start : total_steps / 2;
  if (start >= total_steps)
    throw Error("sgd: averaging start " + std::to_string(start) + " must be below the step count " +
                std::to_string(total_steps));
  return start;
}

Vector logistic_loss_gradient(std::span<const double> theta, const LabeledSample& sample) {
  if (sample.x.size() != theta.size()) throw Error("logistic_loss_gradient: dimension mismatch");
  const double yd = static_cast<double>(sample.y);
  const double coef = -yd * sigmoid(-yd * simd::dot(theta, sample.x));
  Vector g(theta.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = coef * sample.x[i];
  return g;
}

Vector sgd_logistic(std::span<const LabeledSample> samples, const SGDConfig& config, Engine& rng) {
  if (samples.empty()) throw Error("sgd_logistic: no samples");
  config.validate();
  const std::size_t dim = samples.front().x.size();
  if (dim == 0) throw Error("sgd_logistic: zero-dimensional samples");
  for (const auto& s : samples) {
    if (s.x.size() != dim) throw Error("sgd_logistic: inconsistent sample dimensions");
    validate_label(s.y);
  }

  const double rho = config.radius_for(dim);
  const std::size_t total = samples.size() * config.epochs;
  const std::size_t avg_start = config.averaging_start_for(total);

  Vector theta(dim, 0.0);
  Vector avg(dim, 0.0);
  std::size_t averaged = 0;
  std::vector<std::size_t> order(samples.size());
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      ++t;
      const LabeledSample& s = samples[idx];
      const double yd = static_cast<double>(s.y);
      const double eta = config.step_scale / std::sqrt(static_cast<double>(t));
      // theta -= eta * grad, grad = -y x sigma(-y <theta, x>)
      const double coef = eta * yd * sigmoid(-yd * simd::dot(theta, s.x));
      simd::axpy(coef, s.x, theta);
      const double nrm = std::sqrt(simd::dot(theta, theta));
      if (nrm > rho)
        for (double& v : theta) v *= rho / nrm;
      if (t > avg_start) {
        simd::axpy(1.0, theta, avg);
        ++averaged;
      }
    }
  }
  for (double& v : avg) v /= static_cast<double>(averaged);
  return avg;
}

std::uint64_t group_stream_seed(std::uint64_t seed, std::size_t group_id) {
  return derive_seed(seed, Purpose::shuffle, {static_cast<std::uint64_t>(group_id)});
}

DistributedEstimate distributed_estimate(std::span<const Message> messages, const GroupAssignment& assignment,
                                         const SGDConfig& config, std::uint64_t seed, std::size_t threads) {
  config.validate();
  if (assignment.groups.empty()) throw Error("distributed_estimate: assignment has no groups");
  if (messages.size() != assignment.samples)
    throw Error("distributed_estimate: " + std::to_string(messages.size()) + " messages for an assignment of " +
                std::to_string(assignment.samples) + " samples");

  const std::size_t m = assignment.group_count();
  std::vector<std::vector<LabeledSample>> per_group(m);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const std::size_t g = assignment.group_of(i);
    DecodedGroup dec = decode_group(messages[i], assignment, g);
    per_group[g].push_back(LabeledSample{std::move(dec.components), dec.label});
  }

  std::vector<GroupEstimate> estimates(m);
  parallel_for(m, threads, [&](std::size_t g) {
    estimates[g].group_id = g;
    estimates[g].samples = per_group[g].size();
    if (per_group[g].empty()) {
      estimates[g].local.assign(assignment.groups[g].size(), 0.0);
      return;
    }
    Engine rng = make_engine(group_stream_seed(seed, g));
    estimates[g].local = sgd_logistic(per_group[g], config, rng);
  });

  Vector theta(assignment.dim, 0.0);
  std::vector<std::size_t> writes(assignment.dim, 0);
  DistributedEstimate out;
  for (std::size_t g = 0; g < m; ++g) {
    const auto& coords = assignment.groups[g];
    for (std::size_t b = 0; b < coords.size(); ++b) {
      theta[coords[b]] = estimates[g].local[b];
      ++writes[coords[b]];
    }
    if (estimates[g].samples == 0) out.empty_groups.push_back(g);
  }
  for (std::size_t w : writes)
    if (w != 1) throw Error("distributed_estimate: assignment does not partition the coordinates");
  out.theta = Parameter(std::move(theta));
  out.groups = std::move(estimates);
  return out;
}

// ---- class-conditional construction -------------------------------------------

LabeledSample sample_class_conditional(const Parameter& theta, Engine& rng) {
  LabeledSample s;
  s.y = (rng() >> 63) ? 1 : -1;
  s.x.resize(theta.dim());
  for (std::size_t j = 0; j < theta.dim(); ++j) {
    const bool agree = uniform01(rng) < sigmoid(theta[j]);
    s.x[j] = agree ? static_cast<double>(s.y) : -static_cast<double>(s.y);
  }
  return s;
}

namespace {

// log p(x_j | y) for the construction.
double log_coord_given_label(double theta_j, double x_j, int y) {
  // e^{y th x / 2} / (e^{th/2} + e^{-th/2}) = sigma(y th x) since x, y are +-1.
  return std::log(sigmoid(static_cast<double>(y) * theta_j * x_j));
}

}  // namespace

DistributionSpec class_conditional_marginal(const Parameter& theta) {
  const std::size_t d = theta.dim();
  if (d > kMaxExactDim) throw Error("class_conditional_marginal: d exceeds the exact-enumeration limit of 20");
  const std::size_t count = std::size_t{1} << d;
  std::vector<Atom> atoms(count);
  // Per-coordinate log-probabilities for (x_j = +1 / -1) given y = +1 / -1.
  std::vector<double> agree(d), disagree(d);
  for (std::size_t j = 0; j < d; ++j) {
    agree[j] = std::log(sigmoid(theta[j]));
    disagree[j] = std::log(sigmoid(-theta[j]));
  }
  for (std::size_t idx = 0; idx < count; ++idx) {
    Vector x(d);
    double lp_pos = std::log(0.5);
    double lp_neg = std::log(0.5);
    for (std::size_t j = 0; j < d; ++j) {
      const bool plus = (idx >> j) & 1u;
      x[j] = plus ? 1.0 : -1.0;
      lp_pos += plus ? agree[j] : disagree[j];
      lp_neg += plus ? disagree[j] : agree[j];
    }
    atoms[idx] = Atom{std::move(x), std::exp(lp_pos) + std::exp(lp_neg)};
  }
  // Renormalize rounding so the support validates at 1e-12.
  double total = 0.0;
  for (const Atom& a : atoms) total += a.prob;
  for (Atom& a : atoms) a.prob /= total;
  DistributionSpec dist = DistributionSpec::finite_support(std::move(atoms));
  dist.tail = TailClass::sub_gaussian;
  dist.tail_param = 8.0 / 3.0;
  return dist;
}

ClassConditionalCheck verify_class_conditional_construction(const Parameter& theta, double tolerance) {
  const std::size_t d = theta.dim();
  if (d > 6) throw Error("verify_class_conditional_construction: d must be at most 6");
  const std::size_t count = std::size_t{1} << d;
  auto coord = [](std::size_t idx, std::size_t j) { return ((idx >> j) & 1u) ? 1.0 : -1.0; };

  // Joint p(x, y) = 1/2 prod_j p(x_j | y), built from the class-conditional formula as written.
  std::vector<double> joint(2 * count);
  for (std::size_t idx = 0; idx < count; ++idx)
    for (int y : {-1, 1}) {
      double lp = std::log(0.5);
      for (std::size_t j = 0; j < d; ++j) {
        const double th = theta[j];
        lp += static_cast<double>(y) * th * coord(idx, j) / 2.0 - std::log(std::exp(th / 2.0) + std::exp(-th / 2.0));
      }
      joint[2 * idx + (y > 0)] = std::exp(lp);
    }

  ClassConditionalCheck out;
  for (std::size_t idx = 0; idx < count; ++idx) {
    Vector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = coord(idx, j);
    const double a = simd::dot(theta.values(), x);
    const double px = joint[2 * idx] + joint[2 * idx + 1];
    for (int y : {-1, 1}) {
      const double posterior = joint[2 * idx + (y > 0)] / px;
      const double half_form = std::exp(y * a / 2.0) / (std::exp(a / 2.0) + std::exp(-a / 2.0));
      out.max_posterior_error = std::max({out.max_posterior_error, std::abs(posterior - half_form),
                                          std::abs(posterior - logistic_prob(theta, x, y))});
    }
  }

  // Every non-empty block S: p(x_S | y) is the product of its coordinate laws,
  // and p(y | x_S) is logistic in theta_S.
  for (std::size_t mask = 1; mask < count; ++mask) {
    std::vector<std::size_t> block;
    for (std::size_t j = 0; j < d; ++j)
      if ((mask >> j) & 1u) block.push_back(j);
    const std::size_t bcount = std::size_t{1} << block.size();
    std::vector<double> marg(2 * bcount, 0.0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t bidx = 0;
      for (std::size_t b = 0; b < block.size(); ++b)
        if ((idx >> block[b]) & 1u) bidx |= std::size_t{1} << b;
      marg[2 * bidx] += joint[2 * idx];
      marg[2 * bidx + 1] += joint[2 * idx + 1];
    }
    for (std::size_t bidx = 0; bidx < bcount; ++bidx) {
      double a = 0.0;
      for (int y : {-1, 1}) {
        double product = 0.5;
        for (std::size_t b = 0; b < block.size(); ++b)
          product *= std::exp(log_coord_given_label(theta[block[b]], coord(bidx, b), y));
        out.max_block_error = std::max(out.max_block_error, std::abs(marg[2 * bidx + (y > 0)] - product));
      }
      for (std::size_t b = 0; b < block.size(); ++b) a += theta[block[b]] * coord(bidx, b);
      const double pb = marg[2 * bidx] + marg[2 * bidx + 1];
      for (int y : {-1, 1})
        out.max_block_error =
            std::max(out.max_block_error, std::abs(marg[2 * bidx + (y > 0)] / pb - sigmoid(static_cast<double>(y) * a)));
    }
    ++out.blocks_checked;
  }
  out.passed = out.max_posterior_error <= tolerance && out.max_block_error <= tolerance;
  return out;
}

}  // namespace dlr
