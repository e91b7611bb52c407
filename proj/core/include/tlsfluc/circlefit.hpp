#pragma once

#include <complex>
#include <span>
#include <vector>

#include "tlsfluc/model.hpp"
#include "tlsfluc/sweep.hpp"

namespace tlsfluc {

struct CircleFit {
  std::complex<double> center;
  double radius = 0.0;
  double rms = 0.0;  // radial residual RMS
};

// Algebraic Taubin fit followed by geometric Levenberg-Marquardt refinement.
// Throws ValidationError for fewer than 3 points or collinear input.
CircleFit fit_circle(std::span<const std::complex<double>> points);

struct DelayRemoval {
  FrequencySweep sweep;  // input multiplied by e^{+i 2 pi f tau}
  double tau_s = 0.0;
};

// Estimates the cable delay from the unwrapped off-resonant phase slope, then
// refines it by minimizing the circle-fit residual of the corrected trace.
// When the correction does not improve circularity the null estimate tau = 0
// is kept and the trace is returned untouched.
DelayRemoval remove_cable_delay(const FrequencySweep& sweep);

struct ResonatorFit {
  ResonatorParams params;
  double q_i = 0.0;  // always internal_q(params)
  // 68% confidence half-widths from the final-fit covariance.
  double sigma_f_r = 0.0;
  double sigma_q = 0.0;
  double sigma_qc_mag = 0.0;
  double sigma_phi = 0.0;
  double sigma_q_i = 0.0;
  double residual_rms = 0.0;  // sqrt(mean |S21_fit - S21_data|^2)
  bool converged = false;
};

// Full extraction pipeline: delay removal, amplitude normalization, circle
// fit, phase-vs-frequency fit, impedance-mismatch angle from the off-resonant
// point, |Qc| from the circle diameter, then a full-model refinement that
// also provides the confidence intervals. Non-convergence is reported through
// the flag; a converged fit with non-physical Q_i throws NonPhysicalError.
ResonatorFit fit_resonance(const FrequencySweep& sweep);

// Order-preserving parallel batch fit. Failed fits are returned with
// converged = false instead of throwing.
std::vector<ResonatorFit> fit_resonance_batch(const std::vector<FrequencySweep>& sweeps,
                                              int threads = 1);

// Pointwise complex mean of k consecutive sweeps sharing one frequency grid;
// timestamps become the mean of the constituents.
std::vector<FrequencySweep> average_traces(const std::vector<FrequencySweep>& sweeps,
                                           std::size_t k);

}  // namespace tlsfluc
