#include "dlr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dlr/error.hpp"
#include "dlr/simd/kernels.hpp"

namespace dlr {

namespace {

constexpr std::size_t kBlockRows = 1024;

void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want)
    throw Error(std::string(where) + ": dimension mismatch (" + std::to_string(got) + " vs " +
                std::to_string(want) + ")");
}

}  // namespace

Parameter::Parameter(Vector theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw Error("Parameter: dimension must be at least 1");
  for (double v : theta_)
    if (!std::isfinite(v)) throw Error("Parameter: non-finite entry");
}

double Parameter::norm() const {
  return std::sqrt(std::inner_product(theta_.begin(), theta_.end(), theta_.begin(), 0.0));
}

void validate_label(int y) {
  if (y != 1 && y != -1) throw Error("label must be +1 or -1, got " + std::to_string(y));
}

LabeledSample make_sample(Vector x, int y) {
  validate_label(y);
  for (double v : x)
    if (!std::isfinite(v)) throw Error("sample: non-finite covariate");
  return LabeledSample{std::move(x), y};
}

// ---- distributions ---------------------------------------------------------

DistributionSpec DistributionSpec::uniform_hypercube(std::size_t d) {
  DistributionSpec s;
  s.kind = DistKind::uniform_hypercube;
  s.dim = d;
  s.tail = TailClass::sub_gaussian;
  // Rademacher projections are dominated by N(0, 1) in the exp(Z^2/s2) sense.
  s.tail_param = 8.0 / 3.0;
  return s;
}

DistributionSpec DistributionSpec::spherical_gaussian(std::size_t d, double sigma) {
  DistributionSpec s;
  s.kind = DistKind::spherical_gaussian;
  s.dim = d;
  s.sigma = sigma;
  s.tail = TailClass::sub_gaussian;
  s.tail_param = 8.0 / 3.0 * sigma * sigma;  // E exp(Z^2/s2) = 2 for Z ~ N(0, sigma^2)
  return s;
}

DistributionSpec DistributionSpec::product_laplace(std::size_t d, double sigma) {
  DistributionSpec s;
  s.kind = DistKind::product_laplace;
  s.dim = d;
  s.sigma = sigma;
  s.tail = TailClass::sub_exponential;
  s.tail_param = sigma;
  return s;
}

DistributionSpec DistributionSpec::finite_support(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error("finite_support: no atoms");
  DistributionSpec s;
  s.kind = DistKind::finite_support;
  s.dim = atoms.front().x.size();
  s.atoms = std::move(atoms);
  s.tail = TailClass::second_moment;
  double i0 = 0.0;
  for (const Atom& a : s.atoms)
    i0 += a.prob * std::inner_product(a.x.begin(), a.x.end(), a.x.begin(), 0.0);
  s.tail_param = i0 > 0.0 ? i0 : 1.0;  // trace bound; the fisher module refines it
  s.validate();
  return s;
}

void DistributionSpec::validate() const {
  if (dim == 0) throw Error("distribution: dimension must be at least 1");
  if (!(tail_param > 0.0) || !std::isfinite(tail_param))
    throw Error("distribution: tail parameter must be positive");
  switch (kind) {
    case DistKind::uniform_hypercube:
      break;
    case DistKind::spherical_gaussian:
    case DistKind::product_laplace:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("distribution: sigma must be positive");
      break;
    case DistKind::finite_support: {
      if (atoms.empty()) throw Error("distribution: finite support has no atoms");
      double total = 0.0;
      for (const Atom& a : atoms) {
        if (a.x.size() != dim) throw Error("distribution: atom dimension differs from d");
        if (!(a.prob >= 0.0) || !std::isfinite(a.prob))
          throw Error("distribution: atom probability must be finite and nonnegative");
        for (double v : a.x)
          if (!std::isfinite(v)) throw Error("distribution: non-finite atom coordinate");
        total += a.prob;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw Error("distribution: atom probabilities sum to " + std::to_string(total));
      break;
    }
  }
}

std::size_t DistributionSpec::support_size() const {
  if (kind == DistKind::finite_support) return atoms.size();
  if (kind == DistKind::uniform_hypercube) {
    if (dim > kMaxExactDim)
      throw Error("uniform-hypercube with d=" + std::to_string(dim) +
                  " is too large to enumerate exactly (limit 20); use Monte Carlo");
    return std::size_t{1} << dim;
  }
  throw Error("distribution " + to_string(kind) + " has no finite support; use Monte Carlo");
}

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::uniform_hypercube: return "uniform-hypercube";
    case DistKind::spherical_gaussian: return "spherical-gaussian";
    case DistKind::product_laplace: return "product-laplace";
    case DistKind::finite_support: return "finite-support";
  }
  return "?";
}

std::string to_string(TailClass tail) {
  switch (tail) {
    case TailClass::sub_gaussian: return "sub-gaussian";
    case TailClass::sub_exponential: return "sub-exponential";
    case TailClass::second_moment: return "second-moment";
  }
  return "?";
}

DistKind dist_kind_from_string(const std::string& s) {
  if (s == "uniform-hypercube") return DistKind::uniform_hypercube;
  if (s == "spherical-gaussian") return DistKind::spherical_gaussian;
  if (s == "product-laplace") return DistKind::product_laplace;
  if (s == "finite-support") return DistKind::finite_support;
  throw Error("unknown distribution kind '" + s + "'");
}

TailClass tail_class_from_string(const std::string& s) {
  if (s == "sub-gaussian") return TailClass::sub_gaussian;
  if (s == "sub-exponential") return TailClass::sub_exponential;
  if (s == "second-moment") return TailClass::second_moment;
  throw Error("unknown tail class '" + s + "'");
}

void for_each_support_block(const DistributionSpec& dist,
                            const std::function<void(const SupportBlock&)>& fn) {
  const std::size_t d = dist.dim;
  const std::size_t total = dist.support_size();
  std::vector<double> rows(std::min(total, kBlockRows) * d);
  std::vector<double> probs(std::min(total, kBlockRows));

  const double hyper_p = dist.kind == DistKind::uniform_hypercube ? std::ldexp(1.0, -static_cast<int>(d)) : 0.0;
  for (std::size_t start = 0; start < total; start += kBlockRows) {
    const std::size_t count = std::min(kBlockRows, total - start);
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t idx = start + r;
      double* row = rows.data() + r * d;
      if (dist.kind == DistKind::uniform_hypercube) {
        for (std::size_t j = 0; j < d; ++j) row[j] = ((idx >> j) & 1u) ? 1.0 : -1.0;
        probs[r] = hyper_p;
      } else {
        std::copy(dist.atoms[idx].x.begin(), dist.atoms[idx].x.end(), row);
        probs[r] = dist.atoms[idx].prob;
      }
    }
    SupportBlock block;
    block.dim = d;
    block.first_index = start;
    block.rows = std::span<const double>(rows.data(), count * d);
    block.probs = std::span<const double>(probs.data(), count);
    fn(block);
  }
}

std::vector<Atom> enumerate_support(const DistributionSpec& dist) {
  std::vector<Atom> out;
  out.reserve(dist.support_size());
  for_each_support_block(dist, [&](const SupportBlock& b) {
    for (std::size_t r = 0; r < b.count(); ++r) {
      auto row = b.row(r);
      out.push_back(Atom{Vector(row.begin(), row.end()), b.probs[r]});
    }
  });
  return out;
}

// ---- logistic primitives ---------------------------------------------------

double sigmoid(double z) noexcept {
  const double t = std::exp(-std::abs(z));
  const double minority = t / (1.0 + t);
  return z >= 0.0 ? 1.0 - minority : minority;
}

double softplus(double z) noexcept {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic_prob(const Parameter& theta, std::span<const double> x, int y) {
  require_dim(x.size(), theta.dim(), "logistic_prob");
  validate_label(y);
  return sigmoid(static_cast<double>(y) * simd::dot(theta.values(), x));
}

Vector score(const Parameter& theta, const LabeledSample& sample) {
  require_dim(sample.x.size(), theta.dim(), "score");
  validate_label(sample.y);
  const double yd = static_cast<double>(sample.y);
  const double prefactor = yd * sigmoid(-yd * simd::dot(theta.values(), sample.x));
  Vector s(sample.x.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = prefactor * sample.x[i];
  return s;
}

Vector batch_score(const Parameter& theta, std::span<const LabeledSample> samples) {
  if (samples.empty()) throw Error("batch_score: empty batch");
  Vector total(theta.dim(), 0.0);
  for (const LabeledSample& s : samples) {
    const Vector si = score(theta, s);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += si[i];
  }
  return total;
}

double logistic_loss(const Parameter& theta, const LabeledSample& sample) {
  require_dim(sample.x.size(), theta.dim(), "logistic_loss");
  return softplus(-static_cast<double>(sample.y) * simd::dot(theta.values(), sample.x));
}

// ---- sampling --------------------------------------------------------------

Vector sample_x(const DistributionSpec& dist, Engine& rng) {
  Vector x(dist.dim);
  switch (dist.kind) {
    case DistKind::uniform_hypercube:
      for (double& v : x) v = (rng() >> 63) ? 1.0 : -1.0;
      break;
    case DistKind::spherical_gaussian: {
      std::normal_distribution<double> normal(0.0, dist.sigma);
      for (double& v : x) v = normal(rng);
      break;
    }
    case DistKind::product_laplace: {
      std::exponential_distribution<double> expo(1.0);
      for (double& v : x) v = dist.sigma * (expo(rng) - expo(rng));
      break;
    }
    case DistKind::finite_support: {
      const double u = uniform01(rng);
      double acc = 0.0;
      std::size_t pick = dist.atoms.size() - 1;
      for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
        acc += dist.atoms[i].prob;
        if (u < acc) {
          pick = i;
          break;
        }
      }
      x = dist.atoms[pick].x;
      break;
    }
  }
  return x;
}

int sample_label(const Parameter& theta, std::span<const double> x, Engine& rng) {
  const double p_pos = logistic_prob(theta, x, 1);
  return uniform01(rng) < p_pos ? 1 : -1;
}

// ---- risk ------------------------------------------------------------------

namespace {

// Pointwise expected loss difference  sum_y p_true(y|x) [l(hat) - l(ref)],
// with l(th) = softplus(-y <th, x>).
double expected_loss(double m_true, double m_hat) {
  const double p_pos = sigmoid(m_true);
  const double p_neg = sigmoid(-m_true);
  return p_pos * softplus(-m_hat) + p_neg * softplus(m_hat);
}

RiskValue monte_carlo_risk(const Parameter& theta_true, const Parameter& theta_hat,
                           const DistributionSpec& dist, const RiskOptions& opts, bool excess) {
  if (opts.mc_samples < 2) throw Error("risk: Monte Carlo needs at least 2 samples");
  Engine rng = make_engine(opts.seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < opts.mc_samples; ++i) {
    const Vector x = sample_x(dist, rng);
    const double m_true = simd::dot(theta_true.values(), x);
    const double m_hat = simd::dot(theta_hat.values(), x);
    double v = expected_loss(m_true, m_hat);
    if (excess) v -= expected_loss(m_true, m_true);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(opts.mc_samples);
  return RiskValue{mean, std::sqrt(m2 / (n - 1.0) / n), false};
}

RiskValue risk_impl(const Parameter& theta_true, const Parameter& theta_hat,
                    const DistributionSpec& dist, const RiskOptions& opts, bool excess) {
  require_dim(theta_hat.dim(), theta_true.dim(), "population_logistic_risk");
  require_dim(dist.dim, theta_true.dim(), "population_logistic_risk");
  if (opts.mode == RiskMode::monte_carlo) return monte_carlo_risk(theta_true, theta_hat, dist, opts, excess);
  if (!dist.enumerable())
    throw Error("population_logistic_risk: exact mode needs a finite support; request Monte Carlo for " +
                to_string(dist.kind));
  if (dist.kind == DistKind::uniform_hypercube && dist.dim > kMaxExactDim)
    throw Error("population_logistic_risk: exact enumeration is limited to d <= 20; request Monte Carlo");

  double total = 0.0;
  std::vector<double> m_true;
  std::vector<double> m_hat;
  for_each_support_block(dist, [&](const SupportBlock& b) {
    m_true.resize(b.count());
    m_hat.resize(b.count());
    simd::row_dots(b.rows, b.dim, theta_true.values(), m_true);
    simd::row_dots(b.rows, b.dim, theta_hat.values(), m_hat);
    for (std::size_t r = 0; r < b.count(); ++r) {
      double v = expected_loss(m_true[r], m_hat[r]);
      if (excess) v -= expected_loss(m_true[r], m_true[r]);
      total += b.probs[r] * v;
    }
  });
  return RiskValue{total, 0.0, true};
}

}  // namespace

RiskValue population_logistic_risk(const Parameter& theta_true, const Parameter& theta_hat,
                                   const DistributionSpec& dist, const RiskOptions& opts) {
  return risk_impl(theta_true, theta_hat, dist, opts, false);
}

RiskValue excess_logistic_risk(const Parameter& theta_true, const Parameter& theta_hat,
                               const DistributionSpec& dist, const RiskOptions& opts) {
  return risk_impl(theta_true, theta_hat, dist, opts, true);
}

}  // namespace dlr
