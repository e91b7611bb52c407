#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tlsfluc {

// One-sided spectral density (1/Hz) or magnitude-squared coherence over a
// positive Fourier-frequency grid; the DC bin is never included. Estimator
// settings ride along for reproducibility.
struct SpectrumEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> values;
  std::size_t n_segments = 0;
  std::string window_name;
  std::size_t segment_length = 0;
  double overlap_fraction = 0.0;
};

// len/8 rounded to a power of two (at least 8).
std::size_t default_segment_length(std::size_t n);

// Hann-windowed, overlapped, averaged periodograms with window power
// normalization. Requires len(x) >= segment_length >= 8 and overlap in
// [0, 0.9].
SpectrumEstimate welch_psd(std::span<const double> x, double dt_s,
                           std::size_t segment_length, double overlap_fraction = 0.5);

// |S_ab|^2 / (S_aa S_bb) per frequency bin; needs at least 2 segments.
SpectrumEstimate coherence(std::span<const double> a, std::span<const double> b,
                           double dt_s, std::size_t segment_length,
                           double overlap_fraction = 0.5);

struct OneOverFFit {
  double amplitude = 0.0;  // S(f) = amplitude / f^alpha
  double alpha = 0.0;
};

// log-log least squares over bins inside [f_lo, f_hi]; needs >= 3 bins.
OneOverFFit fit_one_over_f(const SpectrumEstimate& spec, double f_lo_hz, double f_hi_hz);

struct UniformSeries {
  double t0_s = 0.0;
  double dt_s = 0.0;
  std::vector<double> values;
};

// Linear interpolation onto a uniform grid at the median sampling interval;
// used before Welch estimation when acquisition timestamps are irregular.
UniformSeries resample_uniform(std::span<const double> t_s, std::span<const double> x);

}  // namespace tlsfluc
