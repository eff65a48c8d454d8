#pragma once

// Self-check suite run by `dlrlab verify`: enumeration oracles, Fisher
// identity and bound sweeps, scheme round trips, van Trees and convexity
// checks, and harness determinism.

#include <functional>
#include <string>
#include <vector>

#include "dlr/fisher.hpp"
#include "json.hpp"

namespace dlr {

enum class VerifyLevel { quick, full };

VerifyLevel verify_level_from_string(const std::string& s);
std::string to_string(VerifyLevel level);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  double worst = 0.0;   // largest observed error or violation, check-specific
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  VerifyLevel level = VerifyLevel::quick;
  std::vector<CheckResult> checks;
  bool passed() const;
  std::vector<std::string> failed() const;
};

struct VerifyHooks {
  /// Replaces the library message-trace evaluation; used to confirm that the
  /// suite notices a broken implementation.
  std::function<double(const Parameter&, const DistributionSpec&, const ChannelTable&)> message_trace;
};

/// Quick enumerates d <= 4, full d <= 6.
VerifyReport run_verify(VerifyLevel level, const VerifyHooks& hooks = {});

nlohmann::json to_json(const VerifyReport& report);

}  // namespace dlr
