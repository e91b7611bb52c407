#pragma once

#include <complex>
#include <span>
#include <vector>

namespace tlsfluc {

// Thin FFTW wrappers. Plans are cached per length and guarded internally, so
// concurrent calls from batch workers are safe.

std::vector<std::complex<double>> fft_forward(std::span<const std::complex<double>> in);

// Inverse transform including the 1/n normalization.
std::vector<std::complex<double>> fft_inverse(std::span<const std::complex<double>> in);

// Forward transform of a real sequence; returns the n/2+1 bins k = 0..n/2.
std::vector<std::complex<double>> rfft(std::span<const double> in);

}  // namespace tlsfluc
