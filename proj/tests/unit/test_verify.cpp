#include <algorithm>
#include <chrono>

#include "doctest.h"
#include "dlr/verify.hpp"

using namespace dlr;

TEST_CASE("quick verify passes within a minute") {
  const auto start = std::chrono::steady_clock::now();
  const VerifyReport r = run_verify(VerifyLevel::quick);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const CheckResult& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
    CHECK(c.cases > 0);
  }
  CHECK(r.passed());
  CHECK(r.failed().empty());
  CHECK(secs < 60.0);
  const nlohmann::json j = to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["checks"].size() == r.checks.size());
}

TEST_CASE("verify catches an unweighted message trace") {
  VerifyHooks hooks;
  hooks.message_trace = [](const Parameter& theta, const DistributionSpec& dist, const ChannelTable& ch) {
    const FisherReport f = message_fisher(theta, dist, ch);
    double t = 0.0;
    for (const Vector& s : f.conditional_score)
      for (double v : s) t += v * v;
    return t;
  };
  const VerifyReport r = run_verify(VerifyLevel::quick, hooks);
  CHECK(!r.passed());
  const auto failed = r.failed();
  CHECK(std::find(failed.begin(), failed.end(), "fisher-identity-oracle") != failed.end());
}

TEST_CASE("full verify passes") {
  const VerifyReport r = run_verify(VerifyLevel::full);
  for (const CheckResult& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
  CHECK(r.level == VerifyLevel::full);
}

TEST_CASE("level names") {
  CHECK(verify_level_from_string("quick") == VerifyLevel::quick);
  CHECK(to_string(VerifyLevel::full) == "full");
  CHECK_THROWS(verify_level_from_string("medium"));
}
