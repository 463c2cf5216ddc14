#pragma once

#include <stdexcept>
#include <string>

namespace baire {

// A bounded search (stem location, witness search, ...) ran out of budget
// before reaching a decision.
struct BudgetExhausted : std::runtime_error {
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

// A constructive step could not be completed (e.g. no admissible successor
// was found where one is required to exist).
struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant that should hold by construction was found violated
// during an independent verification pass.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace baire
