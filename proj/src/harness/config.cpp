#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "dlr/error.hpp"
#include "dlr/harness.hpp"
#include "toml.hpp"

namespace dlr {

using nlohmann::json;

std::string to_string(DataModel m) {
  return m == DataModel::class_conditional ? "class-conditional" : "logistic";
}

DataModel data_model_from_string(const std::string& s) {
  if (s == "class-conditional") return DataModel::class_conditional;
  if (s == "logistic") return DataModel::logistic;
  throw ConfigError("unknown data_model '" + s + "' (expected class-conditional or logistic)");
}

Parameter ThetaSource::resolve(std::size_t d) const {
  if (kind == Kind::explicit_vector) {
    if (values.size() != d)
      throw ConfigError("theta has " + std::to_string(values.size()) + " entries but the cell has d=" +
                        std::to_string(d));
    return Parameter(values);
  }
  Engine rng = make_engine(derive_seed(seed, Purpose::theta, {static_cast<std::uint64_t>(d)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      nrm += x * x;
    }
  } while (nrm == 0.0);
  nrm = std::sqrt(nrm);
  const double scale = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d)) / nrm;
  for (double& x : v) x *= scale;
  return Parameter(std::move(v));
}

void ExperimentConfig::validate() const {
  if (n_grid.empty() || k_grid.empty() || d_grid.empty()) throw ConfigError("config: grids n, k, d must be non-empty");
  for (unsigned k : k_grid)
    if (k < 2) throw ConfigError("config: k values must be at least 2");
  for (std::size_t n : n_grid)
    if (n < 1) throw ConfigError("config: n values must be positive");
  for (std::size_t d : d_grid)
    if (d < 1) throw ConfigError("config: d values must be positive");
  if (trials < 1) throw ConfigError("config: trials must be at least 1");
  if (theta.kind == ThetaSource::Kind::random_ball && !(theta.radius >= 0.0))
    throw ConfigError("config: theta radius must be nonnegative");
  if (sigma2 && !(*sigma2 > 0.0)) throw ConfigError("config: sigma2 must be positive");
  if (mc_samples < 2) throw ConfigError("config: mc_samples must be at least 2");
  try {
    sgd.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

// ---- strict JSON reading ------------------------------------------------------------

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected a table/object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(where + "." + key + ": expected a nonnegative integer");
}

template <class T>
std::vector<T> get_unsigned_list(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array");
  std::vector<T> out;
  for (const json& e : v) {
    if (!(e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0)))
      throw ConfigError(where + "." + key + ": expected nonnegative integers");
    out.push_back(static_cast<T>(e.get<std::uint64_t>()));
  }
  return out;
}

}  // namespace

json to_json(const DistributionSpec& d) {
  json j{{"kind", to_string(d.kind)}, {"d", d.dim}, {"tail", to_string(d.tail)}, {"tail_param", d.tail_param}};
  if (d.kind == DistKind::spherical_gaussian || d.kind == DistKind::product_laplace) j["sigma"] = d.sigma;
  if (d.kind == DistKind::finite_support) {
    json atoms = json::array();
    for (const Atom& a : d.atoms) atoms.push_back(json{{"x", a.x}, {"p", a.prob}});
    j["atoms"] = std::move(atoms);
  }
  return j;
}

DistributionSpec distribution_from_json(const json& j) {
  const std::string where = "distribution";
  check_keys(j, where, {"kind", "d", "sigma", "tail", "tail_param", "atoms"});
  DistributionSpec spec;
  try {
    const DistKind kind = dist_kind_from_string(get<std::string>(j, "kind", where));
    switch (kind) {
      case DistKind::uniform_hypercube:
        spec = DistributionSpec::uniform_hypercube(get_unsigned(j, "d", where));
        break;
      case DistKind::spherical_gaussian:
        spec = DistributionSpec::spherical_gaussian(get_unsigned(j, "d", where),
                                                    j.contains("sigma") ? get_number(j, "sigma", where) : 1.0);
        break;
      case DistKind::product_laplace:
        spec = DistributionSpec::product_laplace(get_unsigned(j, "d", where),
                                                 j.contains("sigma") ? get_number(j, "sigma", where) : 1.0);
        break;
      case DistKind::finite_support: {
        if (!j.contains("atoms") || !j["atoms"].is_array()) throw ConfigError(where + ": finite-support needs atoms");
        std::vector<Atom> atoms;
        for (const json& a : j["atoms"]) {
          check_keys(a, where + ".atoms[]", {"x", "p"});
          atoms.push_back(Atom{get<Vector>(a, "x", where + ".atoms[]"), get_number(a, "p", where + ".atoms[]")});
        }
        spec = DistributionSpec::finite_support(std::move(atoms));
        if (j.contains("d") && get_unsigned(j, "d", where) != spec.dim)
          throw ConfigError(where + ": d disagrees with the atom length");
        break;
      }
    }
    if (j.contains("tail")) spec.tail = tail_class_from_string(get<std::string>(j, "tail", where));
    if (j.contains("tail_param")) spec.tail_param = get_number(j, "tail_param", where);
    spec.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  return spec;
}

ExperimentConfig config_from_json(const json& j) {
  const std::string where = "config";
  check_keys(j, where,
             {"data_model", "theta", "grid", "trials", "sgd", "seed", "output", "compute_trace_msg",
              "record_wall_time", "sigma2", "threads", "mc_samples"});
  ExperimentConfig c;
  if (j.contains("data_model")) c.data_model = data_model_from_string(get<std::string>(j, "data_model", where));

  if (!j.contains("theta")) throw ConfigError("config: missing [theta]");
  const json& th = j["theta"];
  check_keys(th, "theta", {"values", "random_ball"});
  if (th.contains("values") == th.contains("random_ball"))
    throw ConfigError("theta: give exactly one of values or random_ball");
  if (th.contains("values")) {
    c.theta.kind = ThetaSource::Kind::explicit_vector;
    c.theta.values = get<Vector>(th, "values", "theta");
  } else {
    const json& rb = th["random_ball"];
    check_keys(rb, "theta.random_ball", {"radius", "seed"});
    c.theta.kind = ThetaSource::Kind::random_ball;
    c.theta.radius = get_number(rb, "radius", "theta.random_ball");
    if (rb.contains("seed")) c.theta.seed = get_unsigned(rb, "seed", "theta.random_ball");
  }

  if (!j.contains("grid")) throw ConfigError("config: missing [grid]");
  const json& g = j["grid"];
  check_keys(g, "grid", {"n", "k", "d"});
  for (const char* key : {"n", "k", "d"})
    if (!g.contains(key)) throw ConfigError(std::string("grid: missing ") + key);
  c.n_grid = get_unsigned_list<std::size_t>(g, "n", "grid");
  c.k_grid = get_unsigned_list<unsigned>(g, "k", "grid");
  c.d_grid = get_unsigned_list<std::size_t>(g, "d", "grid");

  if (j.contains("trials")) c.trials = get_unsigned(j, "trials", where);
  if (j.contains("seed")) c.master_seed = get_unsigned(j, "seed", where);
  if (j.contains("output")) c.output = get<std::string>(j, "output", where);
  if (j.contains("compute_trace_msg")) c.compute_trace_msg = get<bool>(j, "compute_trace_msg", where);
  if (j.contains("record_wall_time")) c.record_wall_time = get<bool>(j, "record_wall_time", where);
  if (j.contains("sigma2")) c.sigma2 = get_number(j, "sigma2", where);
  if (j.contains("threads")) c.threads = get_unsigned(j, "threads", where);
  if (j.contains("mc_samples")) c.mc_samples = get_unsigned(j, "mc_samples", where);

  if (j.contains("sgd")) {
    const json& s = j["sgd"];
    check_keys(s, "sgd", {"c0", "radius", "epochs", "averaging_start"});
    if (s.contains("c0")) c.sgd.step_scale = get_number(s, "c0", "sgd");
    if (s.contains("radius")) c.sgd.radius = get_number(s, "radius", "sgd");
    if (s.contains("epochs")) c.sgd.epochs = get_unsigned(s, "epochs", "sgd");
    if (s.contains("averaging_start")) c.sgd.averaging_start = get_unsigned(s, "averaging_start", "sgd");
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["data_model"] = to_string(c.data_model);
  if (c.theta.kind == ThetaSource::Kind::explicit_vector)
    j["theta"] = json{{"values", c.theta.values}};
  else
    j["theta"] = json{{"random_ball", json{{"radius", c.theta.radius}, {"seed", c.theta.seed}}}};
  j["grid"] = json{{"n", c.n_grid}, {"k", c.k_grid}, {"d", c.d_grid}};
  j["trials"] = c.trials;
  json sgd{{"c0", c.sgd.step_scale}, {"epochs", c.sgd.epochs}};
  if (c.sgd.radius) sgd["radius"] = *c.sgd.radius;
  if (c.sgd.averaging_start) sgd["averaging_start"] = *c.sgd.averaging_start;
  j["sgd"] = std::move(sgd);
  j["seed"] = c.master_seed;
  if (!c.output.empty()) j["output"] = c.output.string();
  j["compute_trace_msg"] = c.compute_trace_msg;
  j["record_wall_time"] = c.record_wall_time;
  if (c.sigma2) j["sigma2"] = *c.sigma2;
  j["threads"] = c.threads;
  j["mc_samples"] = c.mc_samples;
  return j;
}

// ---- TOML -----------------------------------------------------------------------------

namespace {

json toml_node_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json j = json::object();
    for (const auto& [key, value] : *t) j[std::string(key.str())] = toml_node_to_json(value);
    return j;
  }
  if (const auto* a = node.as_array()) {
    json j = json::array();
    for (const auto& e : *a) j.push_back(toml_node_to_json(e));
    return j;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  throw ConfigError("config: unsupported TOML value (dates and times are not accepted)");
}

}  // namespace

json toml_text_to_json(const std::string& text) {
  try {
    const toml::table tbl = toml::parse(text);
    return toml_node_to_json(tbl);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
}

ExperimentConfig parse_toml_config(const std::string& text) { return config_from_json(toml_text_to_json(text)); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string ext = path.extension().string();
  if (ext == ".json") {
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
  }
  if (ext == ".toml") return parse_toml_config(ss.str());
  throw ConfigError("config " + path.string() + ": expected a .toml or .json file");
}

// ---- report views ------------------------------------------------------------------------

json to_json(const FisherReport& r) {
  json msgs = json::array();
  for (std::size_t m = 0; m < r.message_mass.size(); ++m)
    msgs.push_back(json{{"m", m}, {"p", r.message_mass[m]}, {"conditional_score", r.conditional_score[m]}});
  return json{{"bits", r.bits},
              {"trace_raw", r.trace_raw},
              {"trace_msg", r.trace_msg},
              {"messages", std::move(msgs)},
              {"tails", json{{"sigma2", r.tails.sigma2}, {"sigma_e", r.tails.sigma_e}, {"I0", r.tails.i0}}},
              {"lemma_bounds", json{{"lemma1", r.lemma.lemma1}, {"lemma2", r.lemma.lemma2}, {"lemma3", r.lemma.lemma3}}}};
}

json to_json(const BoundReport& r) {
  const auto& in = r.inputs;
  json inputs{{"n", in.n}, {"k", in.k}, {"d", in.d}, {"sigma2", in.sigma2}, {"sigma_e", in.sigma_e},
              {"I0", in.i0}, {"delta", in.delta}};
  inputs["B"] = std::isinf(in.box_radius) ? json("inf") : json(in.box_radius);
  return json{{"inputs", std::move(inputs)},
              {"note", "theorem values are constant-free scaling values (c = 1)"},
              {"trace_sup", r.trace_sup},
              {"van_trees", r.van_trees},
              {"thm1", r.theorems.thm1},
              {"thm2", r.theorems.thm2},
              {"thm3", r.theorems.thm3},
              {"cor1", json{{"value", r.corollary.value}, {"precondition", to_string(r.corollary.precondition)}}}};
}

json to_json(const RunRecord& r) {
  json j{{"n", r.cell.n},
         {"k", r.cell.k},
         {"d", r.cell.d},
         {"trial", r.trial},
         {"seed", r.seed},
         {"theta_true", r.theta_true},
         {"theta_hat", r.theta_hat},
         {"l2_error", r.l2_error},
         {"excess_risk", r.excess_risk},
         {"empty_groups", r.empty_groups}};
  j["trace_msg"] = r.trace_msg ? json(*r.trace_msg) : json(nullptr);
  j["wall_ms"] = r.wall_ms ? json(*r.wall_ms) : json(nullptr);
  return j;
}

json to_json(const CellSummary& s) {
  json j{{"n", s.cell.n},
         {"k", s.cell.k},
         {"d", s.cell.d},
         {"trials", s.trials},
         {"l2_error", s.l2_mean},
         {"l2_error_stderr", s.l2_stderr},
         {"excess_risk", s.excess_mean},
         {"excess_risk_stderr", s.excess_stderr},
         {"thm1_scaling", s.scalings.thm1}};
  j["trace_msg"] = s.trace_msg ? json(*s.trace_msg) : json(nullptr);
  return j;
}

}  // namespace dlr
