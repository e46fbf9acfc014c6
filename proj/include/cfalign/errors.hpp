#pragma once

#include <stdexcept>
#include <string>

namespace cfalign {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a transmission scheme's preconditions do not hold for the
// given channel (for example the default Han-Kobayashi split needs INR > 1).
class SchemeInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfalign
