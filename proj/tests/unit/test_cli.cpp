#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dlr/harness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs dlrlab with the given arguments; stderr is discarded.
Run dlrlab(const std::string& args) {
  const std::string cmd = std::string(DLRLAB_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data_file(const std::string& name) { return std::string(DLR_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("bounds subcommand") {
  const Run r = dlrlab("bounds --n 1000 --k 5 --d 10 --sigma2 1");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["thm1"].get<double>() == doctest::Approx(0.02));
  CHECK(j["van_trees"].get<double>() == doctest::Approx(100.0 / 20000.0));
  CHECK(j["inputs"]["B"] == "inf");
  CHECK(j["cor1"]["precondition"] == "fails");
  const json boxed = json::parse(dlrlab("bounds --n 1000 --k 5 --d 10 --sigma2 1 --B 0.5").out);
  CHECK(boxed["van_trees"].get<double>() < j["van_trees"].get<double>());
  CHECK(dlrlab("bounds --n 1000 --k 5 --d 10").code == 2);
  CHECK(dlrlab("bounds --n 1000 --k 5 --d 10 --sigma2 1 --B wide").code == 2);
}

TEST_CASE("fisher subcommand") {
  const Run r = dlrlab("fisher --dist hypercube:2 --quantizer label-only");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["trace_raw"].get<double>() == doctest::Approx(0.5));
  CHECK(j["trace_msg"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(j["messages"].size() == 2);
  CHECK(j.contains("lemma_bounds"));

  const Run g = dlrlab("fisher --dist hypercube:3 --theta 0.5,-0.2,0.1 --quantizer group:0 --k 4");
  REQUIRE(g.code == 0);
  const json gj = json::parse(g.out);
  CHECK(gj["trace_msg"].get<double>() == doctest::Approx(gj["trace_raw"].get<double>()).epsilon(1e-10));

  const Run t = dlrlab("fisher --dist hypercube:2 --theta 0.3,0.4 --quantizer table:" + data_file("channel_label.csv"));
  REQUIRE(t.code == 0);
  const json lo = json::parse(dlrlab("fisher --dist hypercube:2 --theta 0.3,0.4 --quantizer label-only").out);
  CHECK(json::parse(t.out)["trace_msg"].get<double>() == doctest::Approx(lo["trace_msg"].get<double>()));

  CHECK(dlrlab("fisher --dist sphere:2 --quantizer label-only").code == 2);
  CHECK(dlrlab("fisher --dist hypercube:2 --theta 1,2,3 --quantizer label-only").code == 2);
  CHECK(dlrlab("fisher --dist hypercube:2 --quantizer table:/nonexistent.csv").code == 2);
}

TEST_CASE("simulate subcommand") {
  const Run r = dlrlab("simulate --d 4 --k 3 --n 2000 --seed 5 --theta 0.5,-0.5,0.25,0");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["theta_hat"].size() == 4);
  CHECK(j["theta_true"][0].get<double>() == 0.5);
  CHECK(j["l2_error"].get<double>() >= 0.0);
  CHECK(j["wall_ms"].is_number());
  const json again = json::parse(dlrlab("simulate --d 4 --k 3 --n 2000 --seed 5 --theta 0.5,-0.5,0.25,0").out);
  CHECK(again["theta_hat"] == j["theta_hat"]);
  CHECK(dlrlab("simulate --d 4 --k 1 --n 10").code == 2);
  CHECK(dlrlab("simulate --d 4 --k 3 --n 10 --theta 1,2").code == 2);
  CHECK(dlrlab("simulate --d 4 --k 3 --n 10 --data gaussian").code == 2);
  const json sparse = json::parse(dlrlab("simulate --d 6 --k 2 --n 3").out);
  CHECK(sparse["empty_groups"].size() == 3);
}

TEST_CASE("sweep subcommand writes the CSV") {
  const fs::path cfg = fs::temp_directory_path() / "dlr_cli_sweep.toml";
  const fs::path out = fs::temp_directory_path() / "dlr_cli_sweep.csv";
  std::ofstream(cfg) << "trials = 2\nseed = 3\n[theta.random_ball]\nradius = 1.0\n"
                        "[grid]\nn = [300]\nk = [2, 3, 30]\nd = [4]\n";
  fs::remove(out);
  const Run r = dlrlab("sweep --config " + cfg.string() + " --out " + out.string() + " --threads 2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["records"] == 4);
  CHECK(j["summaries"].size() == 2);
  CHECK(j["skipped"].size() == 1);
  const dlr::CsvTable t = dlr::read_csv(out);
  CHECK(t.header == dlr::csv_columns());
  CHECK(t.rows.size() == 4 + 2 + 1);
  CHECK(t.at(6, "kind") == "skipped");

  std::ofstream(cfg) << "trials = 2\nbogus = 1\n";
  CHECK(dlrlab("sweep --config " + cfg.string() + " --out " + out.string()).code == 2);
  CHECK(dlrlab("sweep --config /nonexistent.toml --out " + out.string()).code == 2);
  fs::remove(cfg);
  fs::remove(out);
}

TEST_CASE("verify subcommand and usage errors") {
  const Run r = dlrlab("verify --level quick");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["passed"] == true);
  CHECK(dlrlab("verify --level medium").code == 2);
  CHECK(dlrlab("frobnicate").code == 2);
  CHECK(dlrlab("--help").code == 0);
}
