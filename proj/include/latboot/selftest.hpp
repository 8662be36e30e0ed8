#pragma once

#include <functional>
#include <string>
#include <vector>

namespace latboot {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exact-arithmetic invariant suite over small lattices. Stops at the first
/// failing check when `stop_on_failure` is set.
std::vector<CheckResult> run_selftest(bool stop_on_failure = true,
                                      const std::function<void(const CheckResult&)>& progress = {});

}  // namespace latboot
