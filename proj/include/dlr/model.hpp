#pragma once

// Logistic data model: parameter, labeled samples, the conditional label law
// p_theta(y|x) = 1 / (1 + exp(-y <theta, x>)), its score, population risks,
// and the covariate distributions used throughout.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlr/linalg.hpp"
#include "dlr/rng.hpp"

namespace dlr {

/// Dense d-vector of logistic coefficients. Always finite, d >= 1.
class Parameter {
 public:
  explicit Parameter(Vector theta);
  static Parameter zeros(std::size_t d) { return Parameter(Vector(d, 0.0)); }

  std::size_t dim() const noexcept { return theta_.size(); }
  std::span<const double> values() const noexcept { return theta_; }
  double operator[](std::size_t i) const noexcept { return theta_[i]; }
  const Vector& vec() const noexcept { return theta_; }
  double norm() const;

 private:
  Vector theta_;
};

/// Labels are stored as +1 / -1, never 0/1.
struct LabeledSample {
  Vector x;
  int y = 1;
};

void validate_label(int y);

enum class DistKind { uniform_hypercube, spherical_gaussian, product_laplace, finite_support };
enum class TailClass { sub_gaussian, sub_exponential, second_moment };

struct Atom {
  Vector x;
  double prob = 0.0;
};

/// Covariate law P_X. Uniform hypercube and finite-support laws admit exact
/// enumeration; the continuous families are sampled only.
struct DistributionSpec {
  DistKind kind = DistKind::uniform_hypercube;
  std::size_t dim = 1;
  double sigma = 1.0;        // scale for spherical-gaussian / product-laplace
  std::vector<Atom> atoms;   // finite-support only
  TailClass tail = TailClass::sub_gaussian;
  double tail_param = 1.0;   // sigma^2, sigma or I0 depending on `tail`

  static DistributionSpec uniform_hypercube(std::size_t d);
  static DistributionSpec spherical_gaussian(std::size_t d, double sigma);
  static DistributionSpec product_laplace(std::size_t d, double sigma);
  static DistributionSpec finite_support(std::vector<Atom> atoms);

  /// Throws dlr::Error on: zero dimension, non-positive scales or tail
  /// parameter, atoms of the wrong length, negative or non-finite
  /// probabilities, probabilities not summing to 1 within 1e-12.
  void validate() const;
  bool enumerable() const noexcept {
    return kind == DistKind::uniform_hypercube || kind == DistKind::finite_support;
  }
  std::size_t support_size() const;
};

std::string to_string(DistKind kind);
std::string to_string(TailClass tail);
DistKind dist_kind_from_string(const std::string& s);
TailClass tail_class_from_string(const std::string& s);

/// Uniform-hypercube enumeration stops here; beyond it only Monte Carlo runs.
inline constexpr std::size_t kMaxExactDim = 20;

/// A block of support points in row-major layout with their probabilities.
struct SupportBlock {
  std::size_t dim = 0;
  std::size_t first_index = 0;   // atom index of the first row
  std::span<const double> rows;  // count * dim
  std::span<const double> probs; // count
  std::size_t count() const noexcept { return probs.size(); }
  std::span<const double> row(std::size_t r) const noexcept { return rows.subspan(r * dim, dim); }
};

/// Calls `fn` on consecutive blocks that together cover the support in atom
/// order. Hypercube atom i has coordinate j equal to +1 iff bit j of i is set.
void for_each_support_block(const DistributionSpec& dist,
                            const std::function<void(const SupportBlock&)>& fn);

/// Materializes an enumerable distribution as an explicit atom list.
std::vector<Atom> enumerate_support(const DistributionSpec& dist);

// ---- logistic primitives -------------------------------------------------

/// sigma(z) = 1/(1+e^-z). Branch rule: with t = e^{-|z|} (never overflows),
/// the minority side t/(1+t) is computed directly and the majority side as
/// 1 - minority, so sigmoid(z) + sigmoid(-z) == 1 in floating point.
double sigmoid(double z) noexcept;
/// log(1 + e^z) without overflow.
double softplus(double z) noexcept;

double logistic_prob(const Parameter& theta, std::span<const double> x, int y);
LabeledSample make_sample(Vector x, int y);

/// S_theta(x, y) = y x (1 - p_theta(y|x)) = y x sigma(-y <theta, x>).
Vector score(const Parameter& theta, const LabeledSample& sample);
/// Sum of per-sample scores.
Vector batch_score(const Parameter& theta, std::span<const LabeledSample> samples);

/// Per-sample logistic loss log(1 + exp(-y <theta, x>)).
double logistic_loss(const Parameter& theta, const LabeledSample& sample);

// ---- sampling ------------------------------------------------------------

Vector sample_x(const DistributionSpec& dist, Engine& rng);
int sample_label(const Parameter& theta, std::span<const double> x, Engine& rng);

// ---- population risk ------------------------------------------------------

struct RiskValue {
  double value = 0.0;
  double std_error = 0.0;   // 0 for exact evaluation
  bool exact = true;
};

enum class RiskMode { exact, monte_carlo };

struct RiskOptions {
  RiskMode mode = RiskMode::exact;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
};

/// R_theta(theta_hat) = E[log(1 + exp(-Y <theta_hat, X>))] with Y ~ p_theta(.|X).
/// Exact mode requires an enumerable distribution (hypercube d <= 20).
RiskValue population_logistic_risk(const Parameter& theta_true, const Parameter& theta_hat,
                                   const DistributionSpec& dist, const RiskOptions& opts = {});

/// R(theta_hat) - R(theta_true). In Monte Carlo mode both terms share the
/// draws, so the difference is estimated with common random numbers.
RiskValue excess_logistic_risk(const Parameter& theta_true, const Parameter& theta_hat,
                               const DistributionSpec& dist, const RiskOptions& opts = {});

}  // namespace dlr
