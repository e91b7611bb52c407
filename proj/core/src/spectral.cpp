#include "tlsfluc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/fft.hpp"

namespace tlsfluc {

namespace {

struct Segmentation {
  std::size_t length = 0;
  std::size_t hop = 0;
  std::size_t count = 0;
};

Segmentation make_segmentation(std::size_t n, std::size_t segment_length,
                               double overlap_fraction) {
  if (segment_length < 8) throw ValidationError("welch: segment_length must be >= 8");
  if (n < segment_length) throw ValidationError("welch: input shorter than segment");
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9)) {
    throw ValidationError("welch: overlap_fraction must lie in [0, 0.9]");
  }
  Segmentation seg;
  seg.length = segment_length;
  seg.hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(static_cast<double>(segment_length) *
                                  (1.0 - overlap_fraction)));
  seg.count = 1 + (n - segment_length) / seg.hop;
  return seg;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t j = 0; j < length; ++j) {
    w[j] = 0.5 - 0.5 * std::cos(2.0 * k_pi * static_cast<double>(j) /
                                static_cast<double>(length));
  }
  return w;
}

}  // namespace

std::size_t default_segment_length(std::size_t n) {
  const double target = static_cast<double>(n) / 8.0;
  if (target <= 8.0) return 8;
  const double rounded = std::round(std::log2(target));
  return static_cast<std::size_t>(std::pow(2.0, rounded));
}

SpectrumEstimate welch_psd(std::span<const double> x, double dt_s,
                           std::size_t segment_length, double overlap_fraction) {
  if (!(dt_s > 0.0)) throw ValidationError("welch: dt must be > 0");
  const Segmentation seg = make_segmentation(x.size(), segment_length, overlap_fraction);
  const auto window = hann_window(seg.length);
  double u = 0.0;
  for (double w : window) u += w * w;

  const std::size_t n_bins = seg.length / 2;  // k = 1 .. floor(L/2)
  std::vector<double> acc(n_bins, 0.0);
  std::vector<double> buf(seg.length);
  for (std::size_t s = 0; s < seg.count; ++s) {
    const std::size_t off = s * seg.hop;
    for (std::size_t j = 0; j < seg.length; ++j) buf[j] = x[off + j] * window[j];
    const auto spec = rfft(buf);
    for (std::size_t k = 1; k <= n_bins; ++k) acc[k - 1] += std::norm(spec[k]);
  }

  SpectrumEstimate out;
  out.freqs_hz.resize(n_bins);
  out.values.resize(n_bins);
  const double df = 1.0 / (static_cast<double>(seg.length) * dt_s);
  const double scale = dt_s / (u * static_cast<double>(seg.count));
  const bool has_nyquist = seg.length % 2 == 0;
  for (std::size_t k = 1; k <= n_bins; ++k) {
    out.freqs_hz[k - 1] = static_cast<double>(k) * df;
    const bool nyquist = has_nyquist && k == n_bins;
    out.values[k - 1] = acc[k - 1] * scale * (nyquist ? 1.0 : 2.0);
  }
  out.n_segments = seg.count;
  out.window_name = "hann";
  out.segment_length = seg.length;
  out.overlap_fraction = overlap_fraction;
  return out;
}

SpectrumEstimate coherence(std::span<const double> a, std::span<const double> b,
                           double dt_s, std::size_t segment_length,
                           double overlap_fraction) {
  if (a.size() != b.size()) throw ValidationError("coherence: input lengths differ");
  if (!(dt_s > 0.0)) throw ValidationError("coherence: dt must be > 0");
  const Segmentation seg = make_segmentation(a.size(), segment_length, overlap_fraction);
  if (seg.count < 2) {
    throw ValidationError("coherence: at least 2 segments required");
  }
  const auto window = hann_window(seg.length);

  const std::size_t n_bins = seg.length / 2;
  std::vector<std::complex<double>> s_ab(n_bins, {0.0, 0.0});
  std::vector<double> s_aa(n_bins, 0.0), s_bb(n_bins, 0.0);
  std::vector<double> buf_a(seg.length), buf_b(seg.length);
  for (std::size_t s = 0; s < seg.count; ++s) {
    const std::size_t off = s * seg.hop;
    for (std::size_t j = 0; j < seg.length; ++j) {
      buf_a[j] = a[off + j] * window[j];
      buf_b[j] = b[off + j] * window[j];
    }
    const auto fa = rfft(buf_a);
    const auto fb = rfft(buf_b);
    for (std::size_t k = 1; k <= n_bins; ++k) {
      s_ab[k - 1] += fa[k] * std::conj(fb[k]);
      s_aa[k - 1] += std::norm(fa[k]);
      s_bb[k - 1] += std::norm(fb[k]);
    }
  }

  SpectrumEstimate out;
  out.freqs_hz.resize(n_bins);
  out.values.resize(n_bins);
  const double df = 1.0 / (static_cast<double>(seg.length) * dt_s);
  for (std::size_t k = 1; k <= n_bins; ++k) {
    out.freqs_hz[k - 1] = static_cast<double>(k) * df;
    const double denom = s_aa[k - 1] * s_bb[k - 1];
    out.values[k - 1] = denom > 0.0 ? std::norm(s_ab[k - 1]) / denom : 0.0;
  }
  out.n_segments = seg.count;
  out.window_name = "hann";
  out.segment_length = seg.length;
  out.overlap_fraction = overlap_fraction;
  return out;
}

OneOverFFit fit_one_over_f(const SpectrumEstimate& spec, double f_lo_hz, double f_hi_hz) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
    const double f = spec.freqs_hz[i];
    const double v = spec.values[i];
    if (f < f_lo_hz || f > f_hi_hz || !(v > 0.0)) continue;
    const double lx = std::log(f);
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) throw ValidationError("fit_one_over_f: fewer than 3 usable bins in band");
  const double dn = static_cast<double>(n);
  const double det = dn * sxx - sx * sx;
  if (det == 0.0) throw ValidationError("fit_one_over_f: degenerate band");
  const double slope = (dn * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / dn;
  OneOverFFit fit;
  fit.alpha = -slope;
  fit.amplitude = std::exp(intercept);
  return fit;
}

UniformSeries resample_uniform(std::span<const double> t_s, std::span<const double> x) {
  if (t_s.size() != x.size()) throw ValidationError("resample: input lengths differ");
  if (t_s.size() < 2) throw ValidationError("resample: at least 2 samples required");
  std::vector<double> gaps(t_s.size() - 1);
  for (std::size_t i = 0; i + 1 < t_s.size(); ++i) {
    gaps[i] = t_s[i + 1] - t_s[i];
    if (!(gaps[i] > 0.0)) throw ValidationError("resample: non-increasing timestamps");
  }
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2),
                   gaps.end());
  const double dt = gaps[gaps.size() / 2];

  UniformSeries out;
  out.t0_s = t_s.front();
  out.dt_s = dt;
  const auto n_out =
      static_cast<std::size_t>((t_s.back() - t_s.front()) / dt) + 1;
  out.values.resize(n_out);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = out.t0_s + static_cast<double>(i) * dt;
    while (j + 2 < t_s.size() && t_s[j + 1] < t) ++j;
    const double frac = (t - t_s[j]) / (t_s[j + 1] - t_s[j]);
    out.values[i] = x[j] + std::clamp(frac, 0.0, 1.0) * (x[j + 1] - x[j]);
  }
  return out;
}

}  // namespace tlsfluc
