#pragma once

#include <string>
#include <vector>

namespace swarm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Named numeric validation suites: "lambert", "weak-convergence",
// "gibbs-limit", "cprime", "transport", or "all". Unknown names throw
// std::invalid_argument.
std::vector<CheckResult> run_validation_suite(const std::string& name);

}  // namespace swarm
