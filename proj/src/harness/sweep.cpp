#include <chrono>
#include <cmath>

#include "dlr/error.hpp"
#include "dlr/harness.hpp"
#include "dlr/parallel.hpp"

namespace dlr {

namespace {

// Above this dimension the excess risk and the message trace switch from
// enumeration to Monte Carlo (or are omitted).
constexpr std::size_t kExactRiskDim = 16;
constexpr double kDefaultSigma2 = 8.0 / 3.0;

DistributionSpec x_law(const ExperimentConfig& config, const Parameter& theta) {
  if (config.data_model == DataModel::class_conditional) return class_conditional_marginal(theta);
  return DistributionSpec::uniform_hypercube(theta.dim());
}

LabeledSample draw(const ExperimentConfig& config, const Parameter& theta, const DistributionSpec& hypercube,
                   Engine& rng) {
  if (config.data_model == DataModel::class_conditional) return sample_class_conditional(theta, rng);
  LabeledSample s;
  s.x = sample_x(hypercube, rng);
  s.y = sample_label(theta, s.x, rng);
  return s;
}

// E_X sum_y p(y|x) [loss(theta_hat) - loss(theta)] with X drawn from the data model.
RiskValue monte_carlo_excess(const ExperimentConfig& config, const Parameter& theta, const Parameter& theta_hat,
                             std::uint64_t seed) {
  const DistributionSpec cube = DistributionSpec::uniform_hypercube(theta.dim());
  Engine rng = make_engine(derive_seed(seed, Purpose::monte_carlo));
  double mean = 0.0;
  double m2 = 0.0;
  const std::size_t count = config.mc_samples;
  for (std::size_t i = 0; i < count; ++i) {
    LabeledSample s = draw(config, theta, cube, rng);
    double v = 0.0;
    for (int y : {-1, 1}) {
      s.y = y;
      v += logistic_prob(theta, s.x, y) * (logistic_loss(theta_hat, s) - logistic_loss(theta, s));
    }
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  RiskValue r;
  r.value = mean;
  r.exact = false;
  r.std_error = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  return r;
}

std::optional<std::string> skip_reason(const ExperimentConfig& config, const Cell& cell) {
  if (cell.k > kMaxMessageBits)
    return "k=" + std::to_string(cell.k) + " exceeds the 20-bit message limit";
  if (config.theta.kind == ThetaSource::Kind::explicit_vector && config.theta.values.size() != cell.d)
    return "theta has " + std::to_string(config.theta.values.size()) + " entries but d=" + std::to_string(cell.d);
  return std::nullopt;
}

void mean_stderr(const std::vector<double>& v, double& mean, double& stderr_out) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  stderr_out = 0.0;
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  stderr_out = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::vector<Cell> expand_grid(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t d : config.d_grid)
    for (unsigned k : config.k_grid)
      for (std::size_t n : config.n_grid) cells.push_back(Cell{n, k, d});
  return cells;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t cell_index, std::size_t trial) {
  return derive_seed(master, {static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(trial)});
}

RunRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t cell_index, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.cell = cell;
  rec.cell_index = cell_index;
  rec.trial = trial;
  rec.seed = trial_seed(config.master_seed, cell_index, trial);

  const Parameter theta = config.theta.resolve(cell.d);
  const GroupAssignment assignment = make_group_partition(cell.d, cell.k, cell.n);
  const DistributionSpec cube = DistributionSpec::uniform_hypercube(cell.d);

  Engine data_rng = make_engine(derive_seed(rec.seed, Purpose::data));
  std::vector<Message> messages;
  messages.reserve(cell.n);
  for (std::size_t i = 0; i < cell.n; ++i)
    messages.push_back(encode_group(draw(config, theta, cube, data_rng), assignment, i));

  const DistributedEstimate est = distributed_estimate(messages, assignment, config.sgd, rec.seed, 1);
  rec.theta_true = theta.vec();
  rec.theta_hat = est.theta.vec();
  rec.empty_groups = est.empty_groups;
  for (std::size_t j = 0; j < cell.d; ++j) {
    const double diff = rec.theta_hat[j] - rec.theta_true[j];
    rec.l2_error += diff * diff;
  }

  if (cell.d <= kExactRiskDim) {
    rec.excess_risk = excess_logistic_risk(theta, est.theta, x_law(config, theta)).value;
  } else {
    rec.excess_risk = monte_carlo_excess(config, theta, est.theta, rec.seed).value;
  }

  if (config.record_wall_time)
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

double cell_trace_msg(const ExperimentConfig& config, const Cell& cell) {
  if (cell.d > kExactRiskDim)
    throw Error("cell_trace_msg: d=" + std::to_string(cell.d) + " exceeds the enumeration limit " +
                std::to_string(kExactRiskDim));
  const Parameter theta = config.theta.resolve(cell.d);
  const GroupAssignment assignment = make_group_partition(cell.d, cell.k, cell.n);
  const DistributionSpec law = x_law(config, theta);
  double total = 0.0;
  for (std::size_t g = 0; g < assignment.group_count(); ++g) {
    const Quantizer q = Quantizer::group_partition(assignment, g);
    total += message_fisher(theta, law, q.channel_for(law)).trace_msg;
  }
  return total / static_cast<double>(assignment.group_count());
}

SweepResult run_sweep(const ExperimentConfig& config, std::optional<std::size_t> threads) {
  config.validate();
  const std::vector<Cell> cells = expand_grid(config);
  std::size_t workers = threads.value_or(config.threads);
  if (workers == 0) workers = default_thread_count();

  SweepResult out;
  std::vector<std::size_t> live;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (auto reason = skip_reason(config, cells[c]))
      out.skipped.push_back(SkippedCell{cells[c], *reason});
    else
      live.push_back(c);
  }

  const std::size_t trials = config.trials;
  out.records.resize(live.size() * trials);
  parallel_for(out.records.size(), workers, [&](std::size_t job) {
    const std::size_t c = live[job / trials];
    out.records[job] = run_trial(config, cells[c], c, job % trials);
  });

  std::vector<std::optional<double>> traces(live.size());
  if (config.compute_trace_msg)
    parallel_for(live.size(), workers, [&](std::size_t i) {
      const Cell& cell = cells[live[i]];
      if (cell.d <= kExactRiskDim) traces[i] = cell_trace_msg(config, cell);
    });

  const double sigma2 = config.sigma2.value_or(kDefaultSigma2);
  for (std::size_t i = 0; i < live.size(); ++i) {
    const Cell& cell = cells[live[i]];
    std::vector<double> l2, ex;
    for (std::size_t t = 0; t < trials; ++t) {
      RunRecord& r = out.records[i * trials + t];
      r.trace_msg = traces[i];
      l2.push_back(r.l2_error);
      ex.push_back(r.excess_risk);
    }
    CellSummary s;
    s.cell = cell;
    s.trials = trials;
    mean_stderr(l2, s.l2_mean, s.l2_stderr);
    mean_stderr(ex, s.excess_mean, s.excess_stderr);
    s.trace_msg = traces[i];
    s.scalings = theorem_scalings(static_cast<double>(cell.n), cell.k, static_cast<double>(cell.d), sigma2,
                                  std::sqrt(sigma2), 1.0);
    out.summaries.push_back(s);
  }
  return out;
}

}  // namespace dlr
