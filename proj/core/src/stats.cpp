#include "tlsfluc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/tls.hpp"

namespace tlsfluc {

LogNormalFit fit_lognormal(std::span<const double> x) {
  if (x.size() < 3) throw ValidationError("fit_lognormal: at least 3 samples required");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw ValidationError("fit_lognormal: nonpositive value at index " + std::to_string(i));
    }
    m += std::log(x[i]);
  }
  const auto n = static_cast<double>(x.size());
  m /= n;
  double ss = 0.0;
  for (double v : x) {
    const double d = std::log(v) - m;
    ss += d * d;
  }
  const double s = std::sqrt(ss / (n - 1.0));

  LogNormalFit fit;
  fit.mu_log = m;
  fit.sigma_log = s;
  fit.mean = std::exp(m + s * s / 2.0);
  fit.sd = fit.mean * std::sqrt(std::expm1(s * s));
  fit.n = x.size();
  fit.band1 = {std::exp(m - s), std::exp(m + s)};
  fit.band2 = {std::exp(m - 2.0 * s), std::exp(m + 2.0 * s)};
  return fit;
}

double skewness_z(std::span<const double> x) {
  const auto n_sz = x.size();
  if (n_sz < 8) throw ValidationError("skewness_z: at least 8 samples required");
  const double n = static_cast<double>(n_sz);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) throw ValidationError("skewness_z: zero variance");
  const double g1 = m3 / std::pow(m2, 1.5);

  // D'Agostino's transformation of the sample skewness.
  const double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
  const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                       ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  return delta * std::asinh(y / alpha);
}

ConvergenceCurve windowed_convergence(const LossTangentSeries& series,
                                      std::span<const double> window_sizes_s,
                                      double reference_span_s) {
  series.validate();
  if (!(reference_span_s > 0.0) || reference_span_s > series.span_s() + 1e-9) {
    throw ValidationError("windowed_convergence: reference span exceeds series span");
  }

  const double t0 = series.timestamps_s.front();
  const double t_ref_end = t0 + reference_span_s;

  auto fit_range = [&](double lo, double hi) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series.timestamps_s[i];
      if (t >= lo && t <= hi) vals.push_back(series.f_delta_tls[i]);
    }
    if (vals.size() < 3) return LogNormalFit{};
    return fit_lognormal(vals);
  };

  const LogNormalFit ref = fit_range(t0, t_ref_end);
  if (ref.n < 3) throw ValidationError("windowed_convergence: reference span too sparse");

  ConvergenceCurve curve;
  for (double w : window_sizes_s) {
    if (!(w > 0.0) || w > reference_span_s + 1e-9) {
      throw ValidationError("windowed_convergence: window exceeds reference span");
    }
    double abs_mu = 0.0, abs_sg = 0.0, sgn_mu = 0.0, sgn_sg = 0.0;
    std::size_t count = 0;
    for (double start = t0; start + w <= t_ref_end + 1e-9; start += w / 2.0) {
      const LogNormalFit f = fit_range(start, start + w);
      if (f.n < 3) continue;
      const double dmu = (f.mean - ref.mean) / ref.mean;
      const double dsg = (f.sd - ref.sd) / ref.sd;
      abs_mu += std::abs(dmu);
      abs_sg += std::abs(dsg);
      sgn_mu += dmu;
      sgn_sg += dsg;
      ++count;
    }
    const double dn = count > 0 ? static_cast<double>(count)
                                : std::numeric_limits<double>::quiet_NaN();
    curve.window_sizes_s.push_back(w);
    curve.delta_mu.push_back(abs_mu / dn);
    curve.delta_sigma.push_back(abs_sg / dn);
    curve.delta_mu_signed.push_back(sgn_mu / dn);
    curve.delta_sigma_signed.push_back(sgn_sg / dn);
  }
  return curve;
}

AveragingScan averaging_time_scan(const std::vector<FrequencySweep>& sweeps, double q_hp,
                                  std::span<const std::size_t> k_values, int threads) {
  if (sweeps.size() < 2) {
    throw ValidationError("averaging_time_scan: at least 2 sweeps required");
  }
  if (!(q_hp > 0.0)) throw ValidationError("averaging_time_scan: q_hp must be > 0");

  // Sample interval from timestamps; the scan requires uniform spacing.
  std::vector<double> gaps;
  gaps.reserve(sweeps.size() - 1);
  for (std::size_t i = 0; i + 1 < sweeps.size(); ++i) {
    gaps.push_back(sweeps[i + 1].meta.timestamp_s - sweeps[i].meta.timestamp_s);
  }
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2),
                   gaps.end());
  const double dt = gaps[gaps.size() / 2];
  if (!(dt > 0.0)) throw ValidationError("averaging_time_scan: non-increasing timestamps");
  for (double g : gaps) {
    if (std::abs(g - dt) > 0.1 * dt) {
      throw ValidationError("averaging_time_scan: sweeps are not uniformly spaced");
    }
  }

  AveragingScan scan;
  for (std::size_t k : k_values) {
    if (k < 1) throw ValidationError("averaging_time_scan: k must be >= 1");
    const auto averaged = average_traces(sweeps, k);
    const auto fits = fit_resonance_batch(averaged, threads);
    std::vector<double> est;
    est.reserve(fits.size());
    std::size_t excluded = 0;
    for (const auto& f : fits) {
      if (f.converged && f.q_i > 0.0) {
        est.push_back(interleaved_loss_tangent(f.q_i, q_hp));
      } else {
        ++excluded;
      }
    }
    scan.delta_t_s.push_back(static_cast<double>(k) * dt);
    scan.z_scores.push_back(est.size() >= 8 ? skewness_z(est)
                                            : std::numeric_limits<double>::quiet_NaN());
    scan.n_excluded.push_back(excluded);
  }
  return scan;
}

}  // namespace tlsfluc
