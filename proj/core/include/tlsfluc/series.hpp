#pragma once

#include <string>
#include <vector>

namespace tlsfluc {

// Timestamped internal quality factors with fit uncertainties.
struct QiTimeSeries {
  std::vector<double> timestamps_s;
  std::vector<double> q_i;
  std::vector<double> q_i_sigma;
  double power_dbm = 0.0;
  double temperature_k = 0.0;
  std::string resonator_id;

  std::size_t size() const { return timestamps_s.size(); }
  void validate() const;
};

// Strictly positive effective loss-tangent values over time.
struct LossTangentSeries {
  std::vector<double> timestamps_s;
  std::vector<double> f_delta_tls;

  std::size_t size() const { return timestamps_s.size(); }
  double span_s() const;
  void validate() const;
};

}  // namespace tlsfluc
