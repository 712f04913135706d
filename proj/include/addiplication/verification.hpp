#pragma once

// Self-contained property suite over abel, transfer and network gradients.

#include <cstdint>
#include <string>
#include <vector>

namespace addi {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::size_t samples = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_property_suite(std::uint64_t seed = 0);

}  // namespace addi
