#include "tlsfluc/sweep.hpp"

#include <string>

#include "tlsfluc/errors.hpp"

namespace tlsfluc {

double FrequencySweep::span_hz() const {
  if (frequencies_hz.empty()) return 0.0;
  return frequencies_hz.back() - frequencies_hz.front();
}

void FrequencySweep::validate() const {
  if (frequencies_hz.size() != s21.size()) {
    throw ValidationError("sweep: frequency and s21 arrays differ in length");
  }
  if (frequencies_hz.size() < 3) {
    throw ValidationError("sweep: at least 3 points required");
  }
  for (std::size_t i = 1; i < frequencies_hz.size(); ++i) {
    if (!(frequencies_hz[i] > frequencies_hz[i - 1])) {
      throw ValidationError("sweep: non-monotonic frequency at row " + std::to_string(i));
    }
  }
  if (!(frequencies_hz.front() > 0.0)) {
    throw ValidationError("sweep: frequencies must be positive");
  }
}

}  // namespace tlsfluc
