#include "tlsfluc/series.hpp"

#include <string>

#include "tlsfluc/errors.hpp"

namespace tlsfluc {

void QiTimeSeries::validate() const {
  if (timestamps_s.size() != q_i.size() || timestamps_s.size() != q_i_sigma.size()) {
    throw ValidationError("qi series: array lengths differ");
  }
  for (std::size_t i = 1; i < timestamps_s.size(); ++i) {
    if (!(timestamps_s[i] > timestamps_s[i - 1])) {
      throw ValidationError("qi series: non-increasing timestamp at row " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < q_i.size(); ++i) {
    if (!(q_i[i] > 0.0)) {
      throw ValidationError("qi series: nonpositive q_i at row " + std::to_string(i));
    }
  }
}

double LossTangentSeries::span_s() const {
  if (timestamps_s.empty()) return 0.0;
  return timestamps_s.back() - timestamps_s.front();
}

void LossTangentSeries::validate() const {
  if (timestamps_s.size() != f_delta_tls.size()) {
    throw ValidationError("loss series: array lengths differ");
  }
  for (std::size_t i = 1; i < timestamps_s.size(); ++i) {
    if (!(timestamps_s[i] > timestamps_s[i - 1])) {
      throw ValidationError("loss series: non-increasing timestamp at row " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < f_delta_tls.size(); ++i) {
    if (!(f_delta_tls[i] > 0.0)) {
      throw ValidationError("loss series: nonpositive value at row " + std::to_string(i));
    }
  }
}

}  // namespace tlsfluc
