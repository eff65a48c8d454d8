#include "dlr/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <stdexcept>

namespace dlr::oracle {

double naive_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<Atom> hypercube_atoms(std::size_t d) {
  const std::size_t count = std::size_t{1} << d;
  std::vector<Atom> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].x.resize(d);
    for (std::size_t j = 0; j < d; ++j) out[i].x[j] = ((i >> j) & 1u) ? 1.0 : -1.0;
    out[i].prob = 1.0 / static_cast<double>(count);
  }
  return out;
}

std::vector<Atom> support_of(const DistributionSpec& dist) {
  if (dist.kind == DistKind::uniform_hypercube) return hypercube_atoms(dist.dim);
  if (dist.kind == DistKind::finite_support) return dist.atoms;
  throw std::invalid_argument("oracle: finite support required");
}

namespace {

double inner(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double log_likelihood(const Vec& theta, const Vec& x, int y) {
  return std::log(naive_sigmoid(static_cast<double>(y) * inner(theta, x)));
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& at, double h) {
  Vec g(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    Vec p = at, m = at;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& at, double h) {
  const std::size_t d = at.size();
  Mat hm(d, Vec(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto shifted = [&](double si, double sj) {
        Vec v = at;
        v[i] += si * h;
        v[j] += sj * h;
        return f(v);
      };
      hm[i][j] = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h * h);
    }
  return hm;
}

Vec message_distribution(const Vec& theta, const std::vector<Atom>& support, const ChannelTable& channel) {
  Vec p(channel.message_count(), 0.0);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (int y : {-1, 1}) {
      const double joint = support[a].prob * naive_sigmoid(static_cast<double>(y) * inner(theta, support[a].x));
      for (std::size_t m = 0; m < p.size(); ++m) p[m] += joint * channel.q(a, y, static_cast<std::uint32_t>(m));
    }
  return p;
}

double fd_message_fisher_trace(const Vec& theta, const std::vector<Atom>& support, const ChannelTable& channel,
                               double h) {
  const Vec p0 = message_distribution(theta, support, channel);
  const std::size_t d = theta.size();
  std::vector<Vec> plus(d), minus(d);
  for (std::size_t i = 0; i < d; ++i) {
    Vec tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    plus[i] = message_distribution(tp, support, channel);
    minus[i] = message_distribution(tm, support, channel);
  }
  double trace = 0.0;
  for (std::size_t m = 0; m < p0.size(); ++m) {
    if (p0[m] < 1e-300) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const double g = (std::log(plus[i][m]) - std::log(minus[i][m])) / (2.0 * h);
      trace += p0[m] * g * g;
    }
  }
  return trace;
}

double raw_fisher_trace(const Vec& theta, const std::vector<Atom>& support) {
  double t = 0.0;
  for (const Atom& a : support)
    for (int y : {-1, 1}) {
      const double u = static_cast<double>(y) * inner(theta, a.x);
      const double s = naive_sigmoid(-u);  // |S| = ||x|| sigma(-y <theta,x>)
      t += a.prob * naive_sigmoid(u) * inner(a.x, a.x) * s * s;
    }
  return t;
}

Vec score_mean(const Vec& theta, const std::vector<Atom>& support) {
  Vec mean(theta.size(), 0.0);
  for (const Atom& a : support)
    for (int y : {-1, 1}) {
      const double u = static_cast<double>(y) * inner(theta, a.x);
      const double w = a.prob * naive_sigmoid(u) * static_cast<double>(y) * naive_sigmoid(-u);
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += w * a.x[i];
    }
  return mean;
}

double population_risk(const Vec& theta_true, const Vec& theta_hat, const std::vector<Atom>& support) {
  double r = 0.0;
  for (const Atom& a : support)
    for (int y : {-1, 1}) {
      const double p = naive_sigmoid(static_cast<double>(y) * inner(theta_true, a.x));
      r += a.prob * p * -std::log(naive_sigmoid(static_cast<double>(y) * inner(theta_hat, a.x)));
    }
  return r;
}

Mat second_moment(const std::vector<Atom>& support) {
  const std::size_t d = support.front().x.size();
  Mat m(d, Vec(d, 0.0));
  for (const Atom& a : support)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m[i][j] += a.prob * a.x[i] * a.x[j];
  return m;
}

Mat hessian(const Vec& theta, const std::vector<Atom>& support) {
  const std::size_t d = theta.size();
  Mat m(d, Vec(d, 0.0));
  for (const Atom& a : support) {
    const double u = inner(theta, a.x);
    const double w = a.prob * naive_sigmoid(u) * naive_sigmoid(-u);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m[i][j] += w * a.x[i] * a.x[j];
  }
  return m;
}

double determinant(Mat a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

namespace {

std::size_t count_below(const Mat& a, double t) {
  const std::size_t n = a.size();
  Mat m = a;
  for (std::size_t i = 0; i < n; ++i) m[i][i] -= t;
  std::size_t negatives = 0;
  for (std::size_t c = 0; c < n; ++c) {
    double pivot = m[c][c];
    if (pivot == 0.0) pivot = -1e-300;
    if (pivot < 0.0) ++negatives;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / pivot;
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return negatives;
}

}  // namespace

double min_eigenvalue_bisection(const Mat& a, double tol) {
  double bound = 0.0;
  for (const Vec& row : a)
    for (double v : row) bound += v * v;
  bound = std::sqrt(bound) + 1.0;
  double lo = -bound, hi = bound;
  while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (count_below(a, mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dlr::oracle
