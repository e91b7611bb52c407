#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tlsfluc/series.hpp"
#include "tlsfluc/sweep.hpp"

namespace tlsfluc {

struct LogNormalFit {
  double mu_log = 0.0;     // mean of ln x
  double sigma_log = 0.0;  // sd of ln x
  double mean = 0.0;       // exp(m + s^2/2)
  double sd = 0.0;
  std::size_t n = 0;
  std::array<double, 2> band1{};  // exp(m -+ s)
  std::array<double, 2> band2{};  // exp(m -+ 2s)
};

// Maximum-likelihood fit on logs. All inputs must be strictly positive
// (flagged negatives from the interleaved estimator are excluded upstream).
LogNormalFit fit_lognormal(std::span<const double> x);

// Skewness Z score: sample skewness transformed to an approximately standard
// normal statistic under the normality null. Requires n >= 8.
double skewness_z(std::span<const double> x);

struct ConvergenceCurve {
  std::vector<double> window_sizes_s;
  std::vector<double> delta_mu;            // mean |relative deviation| of the mean
  std::vector<double> delta_sigma;         // mean |relative deviation| of the sd
  std::vector<double> delta_mu_signed;     // signed means, for inspection
  std::vector<double> delta_sigma_signed;
};

// Log-normal fits over overlapping windows (stride = half window) compared
// against the reference-span fit.
ConvergenceCurve windowed_convergence(const LossTangentSeries& series,
                                      std::span<const double> window_sizes_s,
                                      double reference_span_s);

struct AveragingScan {
  std::vector<double> delta_t_s;
  std::vector<double> z_scores;
  std::vector<std::size_t> n_excluded;  // failed fits per k
};

// Averaging-time study: average k raw traces, refit, form the two-point
// loss-tangent estimate against q_hp, and test skewness.
AveragingScan averaging_time_scan(const std::vector<FrequencySweep>& sweeps, double q_hp,
                                  std::span<const std::size_t> k_values, int threads = 1);

}  // namespace tlsfluc
