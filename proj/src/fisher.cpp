#include "dlr/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dlr/bounds.hpp"
#include "dlr/error.hpp"
#include "dlr/simd/kernels.hpp"

namespace dlr {

LemmaBounds lemma_bounds(unsigned k, double sigma2, double sigma_e, double i0) {
  const double kk = static_cast<double>(k);
  return LemmaBounds{4.0 * sigma2 * kk, 4.0 * sigma_e * sigma_e * kk * kk, std::ldexp(i0, static_cast<int>(k))};
}

namespace {

void require_finite_support(const DistributionSpec& dist, const char* where) {
  if (!dist.enumerable())
    throw Error(std::string(where) + ": needs a finite support; use the Monte Carlo variant for " +
                to_string(dist.kind));
}

}  // namespace

double trace_fisher_raw(const Parameter& theta, const DistributionSpec& dist) {
  require_finite_support(dist, "trace_fisher_raw");
  if (dist.dim != theta.dim()) throw Error("trace_fisher_raw: dimension mismatch");
  double total = 0.0;
  std::vector<double> margins;
  for_each_support_block(dist, [&](const SupportBlock& b) {
    margins.resize(b.count());
    simd::row_dots(b.rows, b.dim, theta.values(), margins);
    for (std::size_t r = 0; r < b.count(); ++r) {
      const auto x = b.row(r);
      const double sq = simd::dot(x, x);
      total += b.probs[r] * sq * sigmoid(margins[r]) * sigmoid(-margins[r]);
    }
  });
  return total;
}

FisherReport message_fisher(const Parameter& theta, const DistributionSpec& dist, const ChannelTable& channel) {
  require_finite_support(dist, "trace_fisher_message");
  const std::size_t d = theta.dim();
  if (dist.dim != d) throw Error("trace_fisher_message: dimension mismatch");
  if (channel.atoms() != dist.support_size())
    throw Error("trace_fisher_message: channel table does not match the support size");

  const std::size_t width = channel.message_count();
  FisherReport rep;
  rep.bits = channel.bits();
  rep.message_mass.assign(width, 0.0);
  std::vector<double> score_sum(width * d, 0.0);  // sum over (x,y) of f p q S, per message

  std::vector<double> margins;
  for_each_support_block(dist, [&](const SupportBlock& b) {
    margins.resize(b.count());
    simd::row_dots(b.rows, b.dim, theta.values(), margins);
    for (std::size_t r = 0; r < b.count(); ++r) {
      const auto x = b.row(r);
      const std::size_t atom = b.first_index + r;
      for (int y : {-1, 1}) {
        const double yd = static_cast<double>(y);
        const double joint = b.probs[r] * sigmoid(yd * margins[r]);
        if (joint == 0.0) continue;
        const double prefactor = yd * sigmoid(-yd * margins[r]);
        channel.for_each_entry(ChannelTable::row_index(atom, y), [&](std::uint32_t m, double q) {
          const double w = joint * q;
          rep.message_mass[m] += w;
          simd::axpy(w * prefactor, x, std::span<double>(score_sum).subspan(m * d, d));
        });
      }
    }
  });

  rep.conditional_score.assign(width, Vector(d, 0.0));
  double trace = 0.0;
  for (std::size_t m = 0; m < width; ++m) {
    const double pm = rep.message_mass[m];
    if (pm < kMinMessageMass) continue;
    const auto sum = std::span<const double>(score_sum).subspan(m * d, d);
    for (std::size_t i = 0; i < d; ++i) rep.conditional_score[m][i] = sum[i] / pm;
    trace += simd::dot(sum, sum) / pm;  // p ||E[S|m]||^2
  }
  rep.trace_msg = trace;
  rep.trace_raw = trace_fisher_raw(theta, dist);
  return rep;
}

FisherReport trace_fisher_message(const Parameter& theta, const DistributionSpec& dist,
                                  const Quantizer& quantizer, const TailParams& tails) {
  if (quantizer.bits() > kMaxMessageBits) throw Error("trace_fisher_message: 2^k exceeds 2^20");
  FisherReport rep = message_fisher(theta, dist, quantizer.channel_for(dist));
  rep.tails = tails;
  rep.lemma = lemma_bounds(quantizer.bits(), tails.sigma2, tails.sigma_e, tails.i0);
  return rep;
}

FisherReport trace_fisher_message(const Parameter& theta, const DistributionSpec& dist,
                                  const Quantizer& quantizer) {
  return trace_fisher_message(theta, dist, quantizer, estimate_score_tail_params(theta, dist));
}

// ---- tail parameters -----------------------------------------------------------

namespace {

double log_sum_exp_weighted(std::span<const double> exponents, std::span<const double> weights) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < exponents.size(); ++i)
    if (weights[i] > 0.0) peak = std::max(peak, exponents[i]);
  if (!std::isfinite(peak)) return peak;
  double s = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i)
    if (weights[i] > 0.0) s += weights[i] * std::exp(exponents[i] - peak);
  return peak + std::log(s);
}

// Smallest s in [floor, hi] with log E exp(g(Z)/s) <= log 2, where g is Z^2
// or |Z|. The map s -> E exp(g/s) is decreasing, and hi = max g / ln 2 always
// satisfies the constraint.
double solve_orlicz(std::span<const double> g, std::span<const double> weights, double floor, double cap) {
  if (g.size() != weights.size() || g.empty()) throw Error("tail estimate: empty or mismatched sample");
  const double ln2 = std::log(2.0);
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (weights[i] > 0.0) gmax = std::max(gmax, g[i]);
  if (gmax == 0.0) return floor;
  double hi = gmax / ln2;
  if (hi > cap)
    throw Error("tail estimate: no parameter up to the cap " + std::to_string(cap) +
                " satisfies E exp(.) <= 2");
  std::vector<double> expo(g.size());
  auto excess = [&](double s) {
    for (std::size_t i = 0; i < g.size(); ++i) expo[i] = g[i] / s;
    return log_sum_exp_weighted(expo, weights) - ln2;
  };
  double lo = floor;
  if (excess(lo) <= 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) <= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

struct WeightedCloud {
  std::size_t dim = 0;
  std::vector<double> rows;
  std::vector<double> weights;
};

WeightedCloud cloud_for(const DistributionSpec& dist, const TailEstimateOptions& opts, Engine& rng) {
  WeightedCloud c;
  c.dim = dist.dim;
  if (dist.enumerable()) {
    for_each_support_block(dist, [&](const SupportBlock& b) {
      c.rows.insert(c.rows.end(), b.rows.begin(), b.rows.end());
      c.weights.insert(c.weights.end(), b.probs.begin(), b.probs.end());
    });
  } else {
    if (opts.mc_samples < 1) throw Error("tail estimate: Monte Carlo needs samples");
    c.rows.reserve(opts.mc_samples * dist.dim);
    for (std::size_t i = 0; i < opts.mc_samples; ++i) {
      const Vector x = sample_x(dist, rng);
      c.rows.insert(c.rows.end(), x.begin(), x.end());
    }
    c.weights.assign(opts.mc_samples, 1.0 / static_cast<double>(opts.mc_samples));
  }
  return c;
}

template <class Solve>
TailEstimate search_directions(const DistributionSpec& dist, const TailEstimateOptions& opts, Engine& rng,
                               Solve solve) {
  dist.validate();
  const WeightedCloud cloud = cloud_for(dist, opts, rng);
  const std::size_t d = dist.dim;

  std::vector<Vector> dirs;
  if (opts.include_axes)
    for (std::size_t j = 0; j < d; ++j) {
      Vector e(d, 0.0);
      e[j] = 1.0;
      dirs.push_back(std::move(e));
    }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < opts.directions; ++i) {
    Vector u(d);
    double nrm = 0.0;
    do {
      for (double& v : u) v = normal(rng);
      nrm = std::sqrt(simd::dot(u, u));
    } while (nrm == 0.0);
    for (double& v : u) v /= nrm;
    dirs.push_back(std::move(u));
  }
  if (dirs.empty()) throw Error("tail estimate: no directions requested");

  TailEstimate best;
  best.value = -1.0;
  std::vector<double> proj(cloud.weights.size());
  for (const Vector& u : dirs) {
    simd::row_dots(cloud.rows, d, u, proj);
    const double v = solve(proj, cloud.weights);
    if (v > best.value) {
      best.value = v;
      best.worst_direction = u;
    }
  }
  best.directions_tested = dirs.size();
  return best;
}

}  // namespace

double solve_subgaussian(std::span<const double> values, std::span<const double> weights, double floor, double cap) {
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = values[i] * values[i];
  return solve_orlicz(g, weights, floor, cap);
}

double solve_subexponential(std::span<const double> values, std::span<const double> weights, double floor,
                            double cap) {
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::abs(values[i]);
  return solve_orlicz(g, weights, floor, cap);
}

TailEstimate estimate_subgaussian_param(const DistributionSpec& dist, const TailEstimateOptions& opts, Engine& rng) {
  return search_directions(dist, opts, rng, [&](std::span<const double> z, std::span<const double> w) {
    return solve_subgaussian(z, w, opts.floor, opts.cap);
  });
}

TailEstimate estimate_subexponential_param(const DistributionSpec& dist, const TailEstimateOptions& opts,
                                           Engine& rng) {
  return search_directions(dist, opts, rng, [&](std::span<const double> z, std::span<const double> w) {
    return solve_subexponential(z, w, opts.floor, opts.cap);
  });
}

double second_moment_bound(const DistributionSpec& dist) {
  require_finite_support(dist, "second_moment_bound");
  return max_eigenvalue(second_moment_matrix(dist));
}

DistributionSpec score_distribution(const Parameter& theta, const DistributionSpec& dist) {
  require_finite_support(dist, "score_distribution");
  std::vector<Atom> atoms;
  for (const Atom& a : enumerate_support(dist)) {
    for (int y : {-1, 1}) {
      const double p = a.prob * logistic_prob(theta, a.x, y);
      atoms.push_back(Atom{score(theta, LabeledSample{a.x, y}), p});
    }
  }
  DistributionSpec s = DistributionSpec::finite_support(std::move(atoms));
  return s;
}

TailParams estimate_tail_params(const DistributionSpec& dist, std::uint64_t seed, const TailEstimateOptions& opts) {
  Engine rng = make_engine(seed);
  TailParams t;
  t.sigma2 = estimate_subgaussian_param(dist, opts, rng).value;
  t.sigma_e = estimate_subexponential_param(dist, opts, rng).value;
  t.i0 = second_moment_bound(dist);
  return t;
}

TailParams estimate_score_tail_params(const Parameter& theta, const DistributionSpec& dist, std::uint64_t seed,
                                     const TailEstimateOptions& opts) {
  return estimate_tail_params(score_distribution(theta, dist), seed, opts);
}

}  // namespace dlr
