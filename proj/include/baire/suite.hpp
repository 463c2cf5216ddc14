#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace baire {

struct SuiteCheck {
  std::string module;
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool ok() const { return failures == 0; }
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;
  bool all_ok() const;
};

void to_json(nlohmann::json& j, const SuiteReport& r);

// Randomized property checks over every module, driven by one deterministic
// stream: repeated runs with the same seed and trial count produce identical
// reports byte for byte.
SuiteReport run_suite(std::uint64_t seed, std::size_t trials);

}  // namespace baire
