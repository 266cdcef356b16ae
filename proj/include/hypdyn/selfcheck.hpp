#pragma once

// Fast invariant suite behind the selfcheck command.

#include <cstdint>
#include <string>
#include <vector>

namespace hypdyn {

struct PropertyResult {
  std::string name;  // "<module>.<property>"
  bool passed = false;
  std::string detail;
};

struct SelfcheckOptions {
  /// Runs only properties whose name starts with this module prefix.
  std::string filter;
  /// Flips the toral bracket orientation before the checks run.
  bool inject_fault = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

std::vector<PropertyResult> selfcheck(const SelfcheckOptions& options);

}  // namespace hypdyn
