#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tlsfluc/model.hpp"
#include "tlsfluc/series.hpp"

namespace tlsfluc {

// Q_i(<n>) data for one resonator at a fixed temperature. The resonance
// frequency fixes the tanh factor together with the temperature.
struct PowerSweepData {
  std::vector<double> mean_photons;
  std::vector<double> q_i;
  std::vector<double> q_i_sigma;  // may be all-zero for an unweighted fit
  double temperature_k = 0.0;
  double f_r_hz = 0.0;

  void validate() const;
};

struct TLSFit {
  TLSModel model;
  // 68% half-widths.
  double sigma_f_delta0 = 0.0;
  double sigma_n_c = 0.0;
  double sigma_beta = 0.0;
  double sigma_q_pi = 0.0;
  double rss = 0.0;
  bool converged = false;
};

// Weighted least squares of 1/Q_i against <n> with weights sigma_Q / Q^2.
// Requires the photon range to span at least 3 decades; throws FitError when
// ill-posed or non-converged.
TLSFit fit_power_dependence(const PowerSweepData& data);

// Two-point estimator 1/q_lp - 1/q_hp; negative values are returned as-is.
double interleaved_loss_tangent(double q_lp, double q_hp);

// Pointwise estimator over paired LP/HP series. Raw values retain negatives;
// the indices of non-positive estimates are flagged for upstream exclusion.
struct InterleavedEstimate {
  std::vector<double> timestamps_s;  // LP timestamps
  std::vector<double> f_delta_tls;   // raw estimates, may contain negatives
  std::vector<std::size_t> flagged;  // indices of non-positive estimates

  // Positive subset as a LossTangentSeries for distribution fitting.
  LossTangentSeries positive_series() const;
};

InterleavedEstimate interleaved_series(const QiTimeSeries& lp, const QiTimeSeries& hp);

// Through-origin least-squares slope of sigma_Qi = c * Qi.
double fit_sigma_vs_q(std::span<const std::pair<double, double>> mean_sd_points);

}  // namespace tlsfluc
