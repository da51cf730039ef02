#pragma once

#include <stdexcept>
#include <string>

namespace evenspace {

// A configured size or search budget would be exceeded. Distinct from a
// negative answer: callers must not read it as "no such object".
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constructed object failed a structural check that can only fail through
// a bug, never through randomness.
class StructuralViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace evenspace
