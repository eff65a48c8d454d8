// dlrlab: command-line front end for the simulation, Fisher, bounds, sweep and
// verify operations. Every subcommand prints JSON on stdout.
//
// Exit status: 0 ok, 1 invariant failure (verify), 2 usage, config or input error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dlr/bounds.hpp"
#include "dlr/error.hpp"
#include "dlr/harness.hpp"
#include "dlr/verify.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitInput = 2;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw dlr::ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

// Inline "a,b,c" or a path to a file of whitespace/comma separated numbers.
dlr::Vector parse_theta(const std::string& arg) {
  std::string text = arg;
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  for (char& c : text)
    if (c == '\n' || c == '\t' || c == ' ' || c == '\r') c = ',';
  dlr::Vector v;
  for (const std::string& tok : split(text, ','))
    if (!tok.empty()) v.push_back(parse_double(tok, "--theta"));
  if (v.empty()) throw dlr::ConfigError("--theta: no values");
  return v;
}

// hypercube:D | gaussian:D[:SIGMA] | laplace:D[:SIGMA] | path to a distribution JSON file
dlr::DistributionSpec parse_dist(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    try {
      return dlr::distribution_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw dlr::ConfigError(arg + ": " + e.what());
    }
  }
  const auto parts = split(arg, ':');
  if (parts.size() < 2) throw dlr::ConfigError("--dist: expected hypercube:D, gaussian:D[:S], laplace:D[:S] or a file");
  const double dd = parse_double(parts[1], "--dist dimension");
  if (!(dd >= 1.0) || dd != std::floor(dd)) throw dlr::ConfigError("--dist: dimension must be a positive integer");
  const auto d = static_cast<std::size_t>(dd);
  const double sigma = parts.size() > 2 ? parse_double(parts[2], "--dist scale") : 1.0;
  if (parts[0] == "hypercube" || parts[0] == "uniform-hypercube") return dlr::DistributionSpec::uniform_hypercube(d);
  if (parts[0] == "gaussian" || parts[0] == "spherical-gaussian") return dlr::DistributionSpec::spherical_gaussian(d, sigma);
  if (parts[0] == "laplace" || parts[0] == "product-laplace") return dlr::DistributionSpec::product_laplace(d, sigma);
  throw dlr::ConfigError("--dist: unknown family '" + parts[0] + "'");
}

// label-only | group[:J] | uniform | random[:SEED] | table:PATH
dlr::Quantizer parse_quantizer(const std::string& arg, unsigned k, const dlr::DistributionSpec& dist) {
  const auto colon = arg.find(':');
  const std::string kind = arg.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : arg.substr(colon + 1);
  if (kind == "label-only") return dlr::Quantizer::label_only();
  if (kind == "uniform") return dlr::Quantizer::uniform(k);
  if (kind == "group") {
    const auto a = dlr::make_group_partition(dist.dim, k, dist.dim);
    const std::size_t j = rest.empty() ? 0 : static_cast<std::size_t>(parse_double(rest, "--quantizer group"));
    return dlr::Quantizer::group_partition(a, j);
  }
  if (kind == "random") {
    const std::uint64_t seed = rest.empty() ? 1 : static_cast<std::uint64_t>(parse_double(rest, "--quantizer seed"));
    dlr::Engine rng = dlr::make_engine(dlr::derive_seed(seed, dlr::Purpose::channel));
    return dlr::Quantizer::from_table(dlr::random_channel_table(dist.support_size(), k, rng));
  }
  if (kind == "table") {
    if (rest.empty()) throw dlr::ConfigError("--quantizer table: needs a CSV path");
    return dlr::Quantizer::from_table(dlr::load_channel_csv(rest, dist.support_size()));
  }
  throw dlr::ConfigError("--quantizer: unknown kind '" + kind + "'");
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlrlab: distributed logistic regression under communication constraints"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "one group-partition run, printed as a JSON record");
  std::size_t sim_d = 8, sim_n = 4000;
  unsigned sim_k = 3;
  std::string sim_theta, sim_data = "class-conditional";
  std::uint64_t sim_seed = 0;
  double sim_c0 = 1.0, sim_radius = 1.0;
  std::size_t sim_epochs = 1;
  sim->add_option("--d", sim_d, "dimension")->check(CLI::PositiveNumber);
  sim->add_option("--k", sim_k, "bits per message")->check(CLI::Range(2, 20));
  sim->add_option("--n", sim_n, "samples (one message each)")->check(CLI::PositiveNumber);
  sim->add_option("--theta", sim_theta, "inline comma list or file; default: random in the ball");
  sim->add_option("--theta-radius", sim_radius, "ball radius when --theta is absent");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--sgd-c0", sim_c0, "step scale c0 in c0/sqrt(t)");
  sim->add_option("--epochs", sim_epochs, "SGD passes")->check(CLI::PositiveNumber);
  sim->add_option("--data", sim_data, "class-conditional or logistic");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid sweep from a TOML/JSON config, written as CSV");
  std::string sweep_config, sweep_out;
  std::size_t sweep_threads = 0;
  sweep->add_option("--config", sweep_config, "config file (.toml or .json)")->required();
  sweep->add_option("--out", sweep_out, "CSV output path; overrides the config");
  sweep->add_option("--threads", sweep_threads, "worker threads (0: DLR_THREADS or all cores)");

  // fisher
  auto* fisher = app.add_subcommand("fisher", "message Fisher trace of a quantizer");
  std::string f_dist = "hypercube:3", f_theta, f_quant = "label-only";
  unsigned f_k = 2;
  fisher->add_option("--dist", f_dist, "hypercube:D | gaussian:D[:S] | laplace:D[:S] | JSON file");
  fisher->add_option("--theta", f_theta, "inline comma list or file; default: zeros");
  fisher->add_option("--quantizer", f_quant, "label-only | group[:J] | uniform | random[:SEED] | table:CSV");
  fisher->add_option("--k", f_k, "bits per message")->check(CLI::Range(1, 20));

  // bounds
  auto* bounds = app.add_subcommand("bounds", "van Trees value and theorem scalings");
  double b_n = 1000, b_k = 2, b_d = 10, b_s2 = 1, b_delta = 1, b_i0 = 1;
  std::string b_box = "inf";
  std::optional<double> b_se;
  bounds->add_option("--n", b_n, "samples")->required();
  bounds->add_option("--k", b_k, "bits")->required();
  bounds->add_option("--d", b_d, "dimension")->required();
  bounds->add_option("--sigma2", b_s2, "sub-Gaussian parameter")->required();
  bounds->add_option("--delta", b_delta, "lambda_min(E XX^T)");
  bounds->add_option("--I0", b_i0, "second-moment bound");
  bounds->add_option("--B", b_box, "prior box radius (inf for none)");
  bounds->add_option("--sigma-e", b_se, "sub-exponential parameter (default sqrt(sigma2))");

  // verify
  auto* verify = app.add_subcommand("verify", "run the self-check suite");
  std::string v_level = "quick";
  verify->add_option("--level", v_level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*sim) {
      dlr::ExperimentConfig c;
      c.data_model = dlr::data_model_from_string(sim_data);
      if (!sim_theta.empty()) {
        c.theta.kind = dlr::ThetaSource::Kind::explicit_vector;
        c.theta.values = parse_theta(sim_theta);
      } else {
        c.theta.radius = sim_radius;
        c.theta.seed = sim_seed;
      }
      c.n_grid = {sim_n};
      c.k_grid = {sim_k};
      c.d_grid = {sim_d};
      c.trials = 1;
      c.master_seed = sim_seed;
      c.sgd.step_scale = sim_c0;
      c.sgd.epochs = sim_epochs;
      c.record_wall_time = true;
      c.validate();
      const dlr::RunRecord rec = dlr::run_trial(c, dlr::Cell{sim_n, sim_k, sim_d}, 0, 0);
      print(dlr::to_json(rec));
      if (!rec.empty_groups.empty())
        std::cerr << "warning: " << rec.empty_groups.size() << " group(s) received no samples\n";
      return 0;
    }
    if (*sweep) {
      dlr::ExperimentConfig c = dlr::load_config(sweep_config);
      if (!sweep_out.empty()) c.output = sweep_out;
      if (c.output.empty()) throw dlr::ConfigError("sweep: no output path (use --out or set output in the config)");
      const auto threads = sweep_threads ? std::optional<std::size_t>(sweep_threads) : std::nullopt;
      const dlr::SweepResult res = dlr::run_sweep(c, threads);
      dlr::write_results(res, c.output);
      json skipped = json::array();
      for (const auto& s : res.skipped)
        skipped.push_back({{"n", s.cell.n}, {"k", s.cell.k}, {"d", s.cell.d}, {"reason", s.reason}});
      json summaries = json::array();
      for (const auto& s : res.summaries) summaries.push_back(dlr::to_json(s));
      print({{"output", c.output.string()},
             {"records", res.records.size()},
             {"summaries", std::move(summaries)},
             {"skipped", std::move(skipped)}});
      return 0;
    }
    if (*fisher) {
      const dlr::DistributionSpec dist = parse_dist(f_dist);
      const dlr::Parameter theta = f_theta.empty() ? dlr::Parameter::zeros(dist.dim) : dlr::Parameter(parse_theta(f_theta));
      const dlr::Quantizer q = parse_quantizer(f_quant, f_k, dist);
      json out = dlr::to_json(dlr::trace_fisher_message(theta, dist, q));
      out["quantizer"] = q.name();
      out["distribution"] = dlr::to_json(dist);
      out["theta"] = theta.vec();
      print(out);
      return 0;
    }
    if (*bounds) {
      dlr::BoundInputs in;
      in.n = b_n;
      in.k = b_k;
      in.d = b_d;
      in.sigma2 = b_s2;
      in.sigma_e = b_se.value_or(std::sqrt(b_s2));
      in.i0 = b_i0;
      in.delta = b_delta;
      in.box_radius = (b_box == "inf" || b_box == "infinity") ? dlr::kUnboundedBox : parse_double(b_box, "--B");
      print(dlr::to_json(dlr::make_bound_report(in)));
      return 0;
    }
    if (*verify) {
      const dlr::VerifyReport rep = dlr::run_verify(dlr::verify_level_from_string(v_level));
      print(dlr::to_json(rep));
      for (const auto& c : rep.checks)
        if (!c.passed) std::cerr << "FAILED " << c.name << ": " << c.detail << "\n";
      return rep.passed() ? 0 : kExitInvariant;
    }
  } catch (const dlr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
