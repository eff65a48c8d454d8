#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dlr/error.hpp"
#include "dlr/harness.hpp"

using namespace dlr;
namespace fs = std::filesystem;

namespace {

const char* kToml = R"(
data_model = "class-conditional"
trials = 3
seed = 42
compute_trace_msg = true
sigma2 = 1.5

[theta.random_ball]
radius = 1.0
seed = 7

[grid]
n = [400, 800]
k = [2, 3]
d = [4]

[sgd]
c0 = 1.0
epochs = 1
)";

const char* kJson = R"({
  "data_model": "class-conditional",
  "trials": 3,
  "seed": 42,
  "compute_trace_msg": true,
  "sigma2": 1.5,
  "theta": {"random_ball": {"radius": 1.0, "seed": 7}},
  "grid": {"n": [400, 800], "k": [2, 3], "d": [4]},
  "sgd": {"c0": 1.0, "epochs": 1}
})";

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("dlr_harness_" + name);
}

ExperimentConfig small_config() { return parse_toml_config(kToml); }

}  // namespace

TEST_CASE("TOML and JSON configs parse to the same experiment") {
  const ExperimentConfig t = parse_toml_config(kToml);
  const ExperimentConfig j = config_from_json(nlohmann::json::parse(kJson));
  CHECK(config_to_json(t) == config_to_json(j));
  CHECK(t.n_grid == std::vector<std::size_t>{400, 800});
  CHECK(t.k_grid == std::vector<unsigned>{2, 3});
  CHECK(t.trials == 3);
  CHECK(t.master_seed == 42);
  CHECK(*t.sigma2 == 1.5);
  CHECK(t.theta.kind == ThetaSource::Kind::random_ball);
  CHECK(config_from_json(config_to_json(t)).master_seed == 42);

  const fs::path tp = temp_path("cfg.toml"), jp = temp_path("cfg.json");
  std::ofstream(tp) << kToml;
  std::ofstream(jp) << kJson;
  CHECK(config_to_json(load_config(tp)) == config_to_json(load_config(jp)));
  fs::remove(tp);
  fs::remove(jp);
  CHECK_THROWS_AS(load_config(temp_path("cfg.yaml")), ConfigError);
}

TEST_CASE("shipped configs agree with their JSON mirrors") {
  for (const char* name : {"k_sweep", "n_sweep"}) {
    const fs::path base = fs::path(DLR_CONFIG_DIR) / name;
    const ExperimentConfig t = load_config(base.string() + ".toml");
    CHECK(config_to_json(t) == config_to_json(load_config(base.string() + ".json")));
    CHECK(t.trials == 20);
  }
}

TEST_CASE("config parsing is strict") {
  auto j = nlohmann::json::parse(kJson);
  j["trails"] = 3;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = nlohmann::json::parse(kJson);
  j["grid"]["k"] = {1};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = nlohmann::json::parse(kJson);
  j["grid"]["n"] = "400";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = nlohmann::json::parse(kJson);
  j["sgd"]["step"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = nlohmann::json::parse(kJson);
  j["data_model"] = "gaussian";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = nlohmann::json::parse(kJson);
  j["theta"]["values"] = {1.0, 2.0};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  CHECK_THROWS_AS(parse_toml_config("trials = [unclosed"), ConfigError);
}

TEST_CASE("theta sources") {
  ThetaSource s;
  s.radius = 0.8;
  s.seed = 3;
  const Parameter a = s.resolve(5), b = s.resolve(5);
  CHECK(a.vec() == b.vec());
  CHECK(a.norm() <= 0.8);
  ThetaSource e;
  e.kind = ThetaSource::Kind::explicit_vector;
  e.values = {1.0, 2.0};
  CHECK(e.resolve(2).vec() == Vector{1.0, 2.0});
  CHECK_THROWS_AS(e.resolve(3), ConfigError);
}

TEST_CASE("seeds") {
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
  CHECK(trial_seed(1, 0, 1) != trial_seed(1, 1, 0));
  CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
}

TEST_CASE("sweep is deterministic and thread-count independent") {
  const ExperimentConfig c = small_config();
  const SweepResult serial = run_sweep(c, 1);
  const SweepResult again = run_sweep(c, 1);
  const SweepResult parallel = run_sweep(c, 4);
  CHECK(results_to_csv(serial) == results_to_csv(again));
  CHECK(results_to_csv(serial) == results_to_csv(parallel));
  CHECK(serial.records.size() == 4 * 3);
  CHECK(serial.summaries.size() == expand_grid(c).size());
  CHECK(serial.skipped.empty());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].cell_index == i / 3);
    CHECK(serial.records[i].trial == i % 3);
    CHECK(serial.records[i].trace_msg.has_value());
    CHECK(!serial.records[i].wall_ms.has_value());
  }
  // thm1 column uses the configured sigma2.
  CHECK(serial.summaries[0].scalings.thm1 == doctest::Approx(std::max(4.0 / (400 * 1.5), 16.0 / (2 * 400 * 1.5))));
}

TEST_CASE("a k = d + 1 cell equals a direct SGD run") {
  ExperimentConfig c = small_config();
  c.theta.kind = ThetaSource::Kind::explicit_vector;
  c.theta.values = {0.5, -0.5, 0.25};
  const Cell cell{1000, 4, 3};
  const RunRecord r = run_trial(c, cell, 0, 0);

  const Parameter theta(c.theta.values);
  Engine data_rng = make_engine(derive_seed(r.seed, Purpose::data));
  std::vector<LabeledSample> data;
  for (std::size_t i = 0; i < cell.n; ++i) data.push_back(sample_class_conditional(theta, data_rng));
  Engine rng = make_engine(group_stream_seed(r.seed, 0));
  CHECK(r.theta_hat == sgd_logistic(data, c.sgd, rng));
  double l2 = 0.0;
  for (std::size_t j = 0; j < 3; ++j) l2 += (r.theta_hat[j] - theta[j]) * (r.theta_hat[j] - theta[j]);
  CHECK(r.l2_error == l2);
  CHECK(r.excess_risk ==
        excess_logistic_risk(theta, Parameter(r.theta_hat), class_conditional_marginal(theta)).value);
}

TEST_CASE("doubling n roughly halves the excess risk") {
  ExperimentConfig c = small_config();
  c.n_grid = {4000, 8000};
  c.k_grid = {3};
  c.d_grid = {4};
  c.trials = 20;
  c.compute_trace_msg = false;
  const SweepResult r = run_sweep(c);
  REQUIRE(r.summaries.size() == 2);
  const double ratio = r.summaries[1].excess_mean / r.summaries[0].excess_mean;
  CHECK(ratio >= 0.35);
  CHECK(ratio <= 0.7);
}

TEST_CASE("Monte Carlo excess risk above the enumeration limit") {
  ExperimentConfig c = small_config();
  c.mc_samples = 2000;
  const RunRecord r = run_trial(c, Cell{300, 9, 18}, 0, 0);
  CHECK(std::isfinite(r.excess_risk));
  CHECK(r.excess_risk > -0.01);
  CHECK_THROWS_AS(cell_trace_msg(c, Cell{300, 9, 18}), Error);
}

TEST_CASE("skipped cells carry a reason") {
  ExperimentConfig c = small_config();
  c.k_grid = {3, 21};
  c.trials = 1;
  c.compute_trace_msg = false;
  const SweepResult r = run_sweep(c);
  CHECK(r.skipped.size() == 2);
  CHECK(r.skipped[0].reason.find("20-bit") != std::string::npos);
  CHECK(r.summaries.size() == 2);

  c.theta.kind = ThetaSource::Kind::explicit_vector;
  c.theta.values = {1.0, 2.0};
  c.k_grid = {3};
  const SweepResult all_skipped = run_sweep(c);
  CHECK(all_skipped.records.empty());
  CHECK(all_skipped.skipped.size() == 2);
  const fs::path p = temp_path("empty.csv");
  fs::remove(p);
  CHECK_THROWS_AS(write_results(all_skipped, p), Error);
  CHECK(!fs::exists(p));
}

TEST_CASE("CSV round trip") {
  ExperimentConfig c = small_config();
  c.record_wall_time = true;
  c.n_grid = {3};
  c.d_grid = {6};
  c.k_grid = {2};
  const SweepResult r = run_sweep(c, 1);
  const fs::path p = temp_path("results.csv");
  write_results(r, p);
  const CsvTable t = read_csv(p);
  fs::remove(p);
  CHECK(t.header == csv_columns());
  REQUIRE(t.rows.size() == r.records.size() + r.summaries.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(t.at(i, "kind") == "run");
    CHECK(std::stod(t.at(i, "l2_error")) == r.records[i].l2_error);
    CHECK(std::stod(t.at(i, "excess_risk")) == r.records[i].excess_risk);
    CHECK(std::stoull(t.at(i, "seed")) == r.records[i].seed);
    CHECK(!t.at(i, "wall_ms").empty());
    // n = 3 with 6 groups leaves three of them empty.
    CHECK(t.at(i, "note") == "empty groups: 3 4 5");
  }
  const std::size_t s = r.records.size();
  CHECK(t.at(s, "kind") == "summary");
  CHECK(t.at(s, "trial") == "-1");
  CHECK(std::stod(t.at(s, "excess_risk")) == r.summaries[0].excess_mean);
  CHECK(std::stod(t.at(s, "thm1_scaling")) == r.summaries[0].scalings.thm1);
  CHECK_THROWS_AS(t.at(0, "nope"), Error);

  CHECK_THROWS_AS(write_results(r, fs::path("/nonexistent-dir/x.csv")), Error);
  try {
    write_results(r, fs::path("/nonexistent-dir/x.csv"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}

TEST_CASE("CSV reader handles quoting and rejects ragged rows") {
  const fs::path p = temp_path("quoted.csv");
  std::ofstream(p) << "a,b\n\"x,1\",\"say \"\"hi\"\"\"\n";
  const CsvTable t = read_csv(p);
  CHECK(t.at(0, "a") == "x,1");
  CHECK(t.at(0, "b") == "say \"hi\"");
  std::ofstream(p) << "a,b\n1\n";
  CHECK_THROWS_AS(read_csv(p), Error);
  fs::remove(p);
}

TEST_CASE("JSON views") {
  BoundInputs in;
  in.n = 100;
  in.k = 2;
  in.d = 3;
  const nlohmann::json b = to_json(make_bound_report(in));
  CHECK(b["inputs"]["B"] == "inf");
  CHECK(b["van_trees"].get<double>() > 0.0);
  CHECK(b["cor1"]["precondition"].is_string());

  const auto cube = DistributionSpec::uniform_hypercube(3);
  const DistributionSpec back = distribution_from_json(to_json(cube));
  CHECK(back.kind == cube.kind);
  CHECK(back.dim == 3);
  const auto atoms = DistributionSpec::finite_support({Atom{{1.0}, 0.25}, Atom{{-1.0}, 0.75}});
  CHECK(distribution_from_json(to_json(atoms)).atoms[1].prob == 0.75);
  CHECK_THROWS_AS(distribution_from_json(nlohmann::json{{"kind", "uniform-hypercube"}, {"dim", 3}}), ConfigError);

  const FisherReport f = trace_fisher_message(Parameter::zeros(2), DistributionSpec::uniform_hypercube(2), Quantizer::label_only());
  const nlohmann::json fj = to_json(f);
  CHECK(fj["trace_msg"].get<double>() == doctest::Approx(f.trace_msg));
  CHECK(fj["messages"].size() == 2);
  CHECK(fj.contains("lemma_bounds"));

  ExperimentConfig c = small_config();
  const RunRecord r = run_trial(c, Cell{200, 3, 4}, 0, 0);
  const nlohmann::json rj = to_json(r);
  CHECK(rj["theta_hat"].size() == 4);
  CHECK(rj["l2_error"].get<double>() == r.l2_error);
}
