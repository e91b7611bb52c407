#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace tlsfluc {

struct SweepMeta {
  double power_dbm = 0.0;
  double temperature_k = 0.0;
  double timestamp_s = 0.0;
  std::string resonator_id;
};

// Complex S21 trace over a strictly increasing frequency grid.
struct FrequencySweep {
  std::vector<double> frequencies_hz;
  std::vector<std::complex<double>> s21;
  SweepMeta meta;

  std::size_t size() const { return frequencies_hz.size(); }
  double span_hz() const;

  // Equal lengths >= 3, strictly increasing grid; the offending row index is
  // reported on failure.
  void validate() const;
};

}  // namespace tlsfluc
