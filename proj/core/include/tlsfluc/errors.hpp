#pragma once

#include <stdexcept>
#include <string>

namespace tlsfluc {

// Invalid inputs, malformed files, violated invariants. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter combinations implying 1/Q_i <= 0.
class NonPhysicalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ill-posed or non-converged fits. Maps to CLI exit code 2.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tlsfluc
