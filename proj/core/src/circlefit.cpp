#include "tlsfluc/circlefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/levmar.hpp"

namespace tlsfluc {

namespace {

using cplx = std::complex<double>;

double circle_rms(std::span<const cplx> points, const CircleFit& c) {
  double acc = 0.0;
  for (const auto& p : points) {
    const double d = std::abs(p - c.center) - c.radius;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(points.size()));
}

// Taubin algebraic fit (Newton on the characteristic polynomial).
CircleFit taubin_fit(std::span<const cplx> points) {
  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.real();
    my += p.imag();
  }
  mx /= n;
  my /= n;

  double muu = 0, mvv = 0, muv = 0, muz = 0, mvz = 0, mzz = 0;
  for (const auto& p : points) {
    const double u = p.real() - mx;
    const double v = p.imag() - my;
    const double z = u * u + v * v;
    muu += u * u;
    mvv += v * v;
    muv += u * v;
    muz += u * z;
    mvz += v * z;
    mzz += z * z;
  }
  muu /= n;
  mvv /= n;
  muv /= n;
  muz /= n;
  mvz /= n;
  mzz /= n;

  // Collinear input has no perpendicular spread.
  const double tr = muu + mvv;
  const double det_cov = muu * mvv - muv * muv;
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det_cov, 0.0));
  const double lambda_min = tr / 2.0 - disc;
  if (!(lambda_min > 1e-14 * std::max(tr, 1e-300))) {
    throw ValidationError("fit_circle: points are collinear");
  }

  const double mz = muu + mvv;
  const double cov_xy = det_cov;
  const double var_z = mzz - mz * mz;
  const double a3 = 4.0 * mz;
  const double a2 = -3.0 * mz * mz - mzz;
  const double a1 = var_z * mz + 4.0 * cov_xy * mz - muz * muz - mvz * mvz;
  const double a0 =
      muz * muz * mvv + mvz * mvz * muu - 2.0 * muz * mvz * muv - var_z * cov_xy;
  const double a22 = a2 + a2;
  const double a33 = a3 + a3 + a3;

  double x = 0.0;
  double y = a0;
  for (int iter = 0; iter < 32; ++iter) {
    const double dy = a1 + x * (a22 + x * a33);
    const double x_new = x - y / dy;
    if (!std::isfinite(x_new) || x_new == x) break;
    const double y_new = a0 + x_new * (a1 + x_new * (a2 + x_new * a3));
    if (std::abs(y_new) > std::abs(y)) break;
    x = x_new;
    y = y_new;
  }

  const double det = x * x - x * mz + cov_xy;
  if (det == 0.0 || !std::isfinite(det)) {
    throw ValidationError("fit_circle: degenerate configuration");
  }
  const double cu = (muz * (mvv - x) - mvz * muv) / det / 2.0;
  const double cv = (mvz * (muu - x) - muz * muv) / det / 2.0;

  CircleFit fit;
  fit.center = cplx(cu + mx, cv + my);
  fit.radius = std::sqrt(cu * cu + cv * cv + mz);
  fit.rms = circle_rms(points, fit);
  return fit;
}

}  // namespace

CircleFit fit_circle(std::span<const cplx> points) {
  if (points.size() < 3) {
    throw ValidationError("fit_circle: at least 3 points required");
  }
  CircleFit fit = taubin_fit(points);

  // Geometric refinement on (cx, cy, r).
  auto residuals = [&points](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    const cplx c(p[0], p[1]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = std::abs(points[i] - c) - p[2];
    }
    return r;
  };
  Eigen::VectorXd x0(3);
  x0 << fit.center.real(), fit.center.imag(), fit.radius;
  LevmarOptions opts;
  opts.max_iterations = 60;
  const LevmarResult res = levmar(residuals, x0, opts);
  if (res.converged && res.x[2] > 0.0) {
    fit.center = cplx(res.x[0], res.x[1]);
    fit.radius = res.x[2];
  }
  fit.rms = circle_rms(points, fit);
  return fit;
}

namespace {

std::vector<double> unwrapped_phase(std::span<const cplx> values) {
  std::vector<double> phase(values.size());
  double offset = 0.0;
  double prev = std::arg(values[0]);
  phase[0] = prev;
  for (std::size_t i = 1; i < values.size(); ++i) {
    double cur = std::arg(values[i]);
    double d = cur - prev;
    if (d > k_pi) offset -= 2.0 * k_pi;
    if (d < -k_pi) offset += 2.0 * k_pi;
    phase[i] = cur + offset;
    prev = cur;
  }
  return phase;
}

// Least-squares line y = a + b x.
std::pair<double, double> line_fit(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw ValidationError("line fit: rank deficient");
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sy - b * sx) / n;
  return {a, b};
}

std::vector<cplx> apply_delay_correction(const FrequencySweep& sweep, double tau) {
  std::vector<cplx> out(sweep.size());
  const cplx i(0.0, 1.0);
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    out[k] = sweep.s21[k] * std::exp(i * (2.0 * k_pi * sweep.frequencies_hz[k] * tau));
  }
  return out;
}

double corrected_circle_rms(const FrequencySweep& sweep, double tau) {
  auto pts = apply_delay_correction(sweep, tau);
  try {
    return taubin_fit(pts).rms;
  } catch (const ValidationError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

DelayRemoval remove_cable_delay(const FrequencySweep& sweep) {
  sweep.validate();
  if (sweep.size() < 8) {
    throw ValidationError("remove_cable_delay: at least 8 points required");
  }

  // Coarse estimate: linear fit to the unwrapped phase of the off-resonant
  // tails (outer 10% on each side).
  const std::size_t n = sweep.size();
  const std::size_t m = std::max<std::size_t>(3, n / 10);
  auto phase = unwrapped_phase(sweep.s21);
  std::vector<double> fs, ps;
  fs.reserve(2 * m);
  ps.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    fs.push_back(sweep.frequencies_hz[i]);
    ps.push_back(phase[i]);
  }
  for (std::size_t i = n - m; i < n; ++i) {
    fs.push_back(sweep.frequencies_hz[i]);
    ps.push_back(phase[i]);
  }
  const auto [intercept, slope] = line_fit(fs, ps);
  (void)intercept;
  double tau0 = -slope / (2.0 * k_pi);

  const double span = sweep.span_hz();
  const double rms_null = corrected_circle_rms(sweep, 0.0);

  double scale = 0.0;
  for (const auto& v : sweep.s21) scale += std::abs(v);
  scale /= static_cast<double>(n);

  DelayRemoval out;
  // Already circular to numerical precision: keep the trace untouched.
  if (rms_null <= 1e-12 * std::max(scale, 1e-300)) {
    out.sweep = sweep;
    out.tau_s = 0.0;
    return out;
  }

  // Golden-section refinement of the circularity objective around the better
  // of the coarse estimate and zero.
  if (corrected_circle_rms(sweep, tau0) > rms_null) tau0 = 0.0;
  const double w = 0.5 / span;
  double a = tau0 - w;
  double b = tau0 + w;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = corrected_circle_rms(sweep, c);
  double fd = corrected_circle_rms(sweep, d);
  for (int iter = 0; iter < 160 && (b - a) > 1e-16 * w; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = corrected_circle_rms(sweep, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = corrected_circle_rms(sweep, d);
    }
  }
  double tau = (a + b) / 2.0;
  const double rms_tau = corrected_circle_rms(sweep, tau);

  // Prefer the null estimate unless the correction genuinely improves
  // circularity; this keeps delay-free traces bit-identical.
  if (!(rms_tau < rms_null * (1.0 - 1e-9))) {
    out.sweep = sweep;
    out.tau_s = 0.0;
    return out;
  }

  out.sweep = sweep;
  out.sweep.s21 = apply_delay_correction(sweep, tau);
  out.tau_s = tau;
  return out;
}

namespace {

struct PhaseFit {
  double theta0 = 0.0;
  double loaded_q = 0.0;
  double f_r = 0.0;
  bool converged = false;
};

// theta(f) = theta0 + 2 atan(2 Q (1 - f/f_r)) against the circle center.
PhaseFit fit_phase(std::span<const double> freqs, std::span<const cplx> centered) {
  std::vector<double> theta = unwrapped_phase(centered);

  // Initial f_r: steepest unwrapped-phase descent.
  std::size_t idx = 1;
  double best = 0.0;
  for (std::size_t i = 1; i + 1 < theta.size(); ++i) {
    const double d = std::abs(theta[i + 1] - theta[i - 1]);
    if (d > best) {
      best = d;
      idx = i;
    }
  }
  const double fr0 = freqs[idx];
  const double slope =
      (theta[idx + 1] - theta[idx - 1]) / (freqs[idx + 1] - freqs[idx - 1]);
  double q0 = std::abs(slope) * fr0 / 4.0;
  q0 = std::clamp(q0, 10.0, 1e9);

  // Absorb the 2-pi-k unwrap offset into theta0.
  std::vector<double> off(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    off[i] = theta[i] - 2.0 * std::atan(2.0 * q0 * (1.0 - freqs[i] / fr0));
  }
  std::nth_element(off.begin(), off.begin() + static_cast<long>(off.size() / 2), off.end());
  const double theta0_0 = off[off.size() / 2];

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double model = p[0] + 2.0 * std::atan(2.0 * p[1] * (1.0 - freqs[i] / p[2]));
      r[static_cast<Eigen::Index>(i)] = theta[i] - model;
    }
    return r;
  };
  const JacobianFn jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(theta.size()), 3);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double u = 1.0 - freqs[i] / p[2];
      const double denom = 1.0 + 4.0 * p[1] * p[1] * u * u;
      const auto row = static_cast<Eigen::Index>(i);
      // residual = data - model
      jac(row, 0) = -1.0;
      jac(row, 1) = -4.0 * u / denom;
      jac(row, 2) = -4.0 * p[1] * freqs[i] / (p[2] * p[2] * denom);
    }
    return jac;
  };
  Eigen::VectorXd x0(3);
  x0 << theta0_0, q0, fr0;
  Eigen::VectorXd lower(3), upper(3);
  lower << -1e9, 1.0, freqs.front() * 0.5;
  upper << 1e9, 1e12, freqs.back() * 1.5;
  LevmarOptions opts;
  opts.max_iterations = 200;
  opts.cost_floor = 1e-24 * static_cast<double>(theta.size());  // radians scale
  const LevmarResult res = levmar(residuals, x0, opts, &lower, &upper, &jacobian);

  PhaseFit fit;
  fit.theta0 = res.x[0];
  fit.loaded_q = res.x[1];
  fit.f_r = res.x[2];
  fit.converged = res.converged && res.x[1] > 0.0 && res.x[2] > 0.0;
  return fit;
}

double wrap_angle(double a) {
  while (a > k_pi) a -= 2.0 * k_pi;
  while (a <= -k_pi) a += 2.0 * k_pi;
  return a;
}

// The final refinement fits A' e^{-i 2 pi (f - f_c) tau} (1 - T) with A' the
// amplitude referenced to the sweep center f_c. Referencing the delay phase
// to f_c removes the near-degeneracy between tau and arg(A) that otherwise
// leaves the optimizer crawling along a stiff valley. A = A' e^{+i 2 pi f_c tau}.
Eigen::VectorXd full_model_residuals(const FrequencySweep& sweep, double f_c,
                                     const Eigen::VectorXd& x) {
  const cplx a(x[0], x[1]);
  const double tau = x[2];
  const double fr = x[3];
  const double q = x[4];
  const double qc = x[5];
  const double phi = x[6];
  const cplx i_unit(0.0, 1.0);
  const cplx e_phi = std::exp(i_unit * phi);

  Eigen::VectorXd r(static_cast<Eigen::Index>(2 * sweep.size()));
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const double f = sweep.frequencies_hz[k];
    const cplx denom = 1.0 + 2.0 * i_unit * q * (f / fr - 1.0);
    const cplx t = (q / qc) * e_phi / denom;
    const cplx e_tau = std::exp(-i_unit * (2.0 * k_pi * (f - f_c) * tau));
    const cplx d = a * e_tau * (1.0 - t) - sweep.s21[k];
    r[static_cast<Eigen::Index>(2 * k)] = d.real();
    r[static_cast<Eigen::Index>(2 * k + 1)] = d.imag();
  }
  return r;
}

// Analytic derivatives with respect to (Re A', Im A', tau, f_r, Q, |Qc|, phi).
Eigen::MatrixXd full_model_jacobian(const FrequencySweep& sweep, double f_c,
                                    const Eigen::VectorXd& x) {
  const cplx a(x[0], x[1]);
  const double tau = x[2];
  const double fr = x[3];
  const double q = x[4];
  const double qc = x[5];
  const double phi = x[6];
  const cplx i_unit(0.0, 1.0);
  const cplx e_phi = std::exp(i_unit * phi);

  Eigen::MatrixXd jac(static_cast<Eigen::Index>(2 * sweep.size()), 7);
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const double f = sweep.frequencies_hz[k];
    const cplx denom = 1.0 + 2.0 * i_unit * q * (f / fr - 1.0);
    const cplx t = (q / qc) * e_phi / denom;
    const cplx e_tau = std::exp(-i_unit * (2.0 * k_pi * (f - f_c) * tau));
    const cplx base = e_tau * (1.0 - t);

    const cplx d_re_a = base;
    const cplx d_im_a = i_unit * base;
    const cplx d_tau = a * base * (-i_unit * 2.0 * k_pi * (f - f_c));
    // d t / d q = e^{i phi} / (qc denom^2) since denom - 2 i q x = 1.
    const cplx d_q = -a * e_tau * e_phi / (qc * denom * denom);
    const cplx d_qc = a * e_tau * t / qc;
    const cplx d_phi = -a * e_tau * i_unit * t;
    const cplx d_fr = -a * e_tau * t * (2.0 * i_unit * q * f) / (denom * fr * fr);

    const cplx cols[7] = {d_re_a, d_im_a, d_tau, d_fr, d_q, d_qc, d_phi};
    for (int c = 0; c < 7; ++c) {
      jac(static_cast<Eigen::Index>(2 * k), c) = cols[c].real();
      jac(static_cast<Eigen::Index>(2 * k + 1), c) = cols[c].imag();
    }
  }
  return jac;
}

}  // namespace

ResonatorFit fit_resonance(const FrequencySweep& sweep) {
  sweep.validate();
  ResonatorFit out;
  if (sweep.size() < 12) {
    throw ValidationError("fit_resonance: at least 12 points required");
  }

  double tau0 = 0.0;
  cplx a_hat(1.0, 0.0);
  double fr0 = 0.0, q0 = 0.0, qc0 = 0.0, phi0 = 0.0;
  bool pipeline_ok = true;

  try {
    const DelayRemoval delay = remove_cable_delay(sweep);
    tau0 = delay.tau_s;

    // Off-resonant amplitude from the outer tails.
    const std::size_t n = sweep.size();
    const std::size_t m = std::max<std::size_t>(3, n / 10);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < m; ++i) acc += delay.sweep.s21[i];
    for (std::size_t i = n - m; i < n; ++i) acc += delay.sweep.s21[i];
    a_hat = acc / static_cast<double>(2 * m);
    if (!(std::abs(a_hat) > 0.0)) throw FitError("fit_resonance: zero off-resonant level");

    std::vector<cplx> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = delay.sweep.s21[i] / a_hat;

    const CircleFit circle = fit_circle(norm);
    // A usable resonance needs a circle that stands clear of the noise.
    if (!(circle.radius > 1e-9) || !(circle.radius > 5.0 * circle.rms)) {
      throw FitError("fit_resonance: no resonance circle above the noise");
    }

    std::vector<cplx> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = norm[i] - circle.center;
    const PhaseFit phase = fit_phase(delay.sweep.frequencies_hz, centered);
    if (!phase.converged) throw FitError("fit_resonance: phase fit failed");

    // Off-resonant point on the circle and the mismatch angle.
    const cplx p_off = circle.center - circle.radius * std::exp(cplx(0.0, phase.theta0));
    if (!(std::abs(p_off) > 0.0)) throw FitError("fit_resonance: degenerate geometry");
    phi0 = wrap_angle(phase.theta0 + k_pi - std::arg(p_off));
    q0 = phase.loaded_q;
    fr0 = phase.f_r;
    qc0 = q0 * std::abs(p_off) / (2.0 * circle.radius);
    a_hat *= p_off;
  } catch (const ValidationError&) {
    pipeline_ok = false;
  } catch (const FitError&) {
    pipeline_ok = false;
  }

  if (!pipeline_ok) {
    // Partial results only; callers check the flag.
    out.converged = false;
    out.params.amplitude_a = a_hat;
    out.params.delay_tau_s = tau0;
    return out;
  }

  // Full-model refinement; provides the covariance used for the intervals.
  const double f_c =
      0.5 * (sweep.frequencies_hz.front() + sweep.frequencies_hz.back());
  const cplx a_centered = a_hat * std::exp(cplx(0.0, -2.0 * k_pi * f_c * tau0));
  Eigen::VectorXd x0(7);
  x0 << a_centered.real(), a_centered.imag(), tau0, fr0, q0, qc0, phi0;
  Eigen::VectorXd lower(7), upper(7);
  const double span = sweep.span_hz();
  lower << -1e12, -1e12, -1.0, sweep.frequencies_hz.front() - span,
      1.0, 1.0, -k_pi;
  upper << 1e12, 1e12, 1.0, sweep.frequencies_hz.back() + span,
      1e12, 1e12, k_pi;
  auto residuals = [&sweep, f_c](const Eigen::VectorXd& x) {
    return full_model_residuals(sweep, f_c, x);
  };
  const JacobianFn jacobian = [&sweep, f_c](const Eigen::VectorXd& x) {
    return full_model_jacobian(sweep, f_c, x);
  };
  LevmarOptions opts;
  opts.max_iterations = 400;
  double data_scale = 0.0;
  for (const auto& v : sweep.s21) data_scale += std::norm(v);
  opts.cost_floor = 1e-26 * data_scale;
  const LevmarResult res = levmar(residuals, x0, opts, &lower, &upper, &jacobian);

  out.params.amplitude_a = cplx(res.x[0], res.x[1]) *
                           std::exp(cplx(0.0, 2.0 * k_pi * f_c * res.x[2]));
  out.params.delay_tau_s = res.x[2];
  out.params.f_r_hz = res.x[3];
  out.params.loaded_q = res.x[4];
  out.params.coupling_q_mag = res.x[5];
  out.params.phi_rad = res.x[6];
  out.converged = res.converged;
  out.residual_rms = std::sqrt(res.rss / static_cast<double>(sweep.size()));

  if (!out.converged) return out;

  // Throws NonPhysicalError when the converged parameters are unphysical.
  out.q_i = internal_q(out.params.loaded_q, out.params.coupling_q_mag, out.params.phi_rad);

  const auto n_res = static_cast<int>(2 * sweep.size());
  const Eigen::MatrixXd cov = covariance_from_jtj(res.jtj, res.rss, n_res);
  out.sigma_f_r = std::sqrt(std::max(cov(3, 3), 0.0));
  out.sigma_q = std::sqrt(std::max(cov(4, 4), 0.0));
  out.sigma_qc_mag = std::sqrt(std::max(cov(5, 5), 0.0));
  out.sigma_phi = std::sqrt(std::max(cov(6, 6), 0.0));

  // Delta method for Q_i over the correlated (Q, |Qc|, phi) block.
  const double q = out.params.loaded_q;
  const double qc = out.params.coupling_q_mag;
  const double phi = out.params.phi_rad;
  const double qi = out.q_i;
  Eigen::Vector3d grad;
  grad << qi * qi / (q * q),                      // d qi / d q
      -qi * qi * std::cos(phi) / (qc * qc),       // d qi / d |qc|
      -qi * qi * std::sin(phi) / qc;              // d qi / d phi
  const Eigen::Matrix3d block = cov.block<3, 3>(4, 4);
  out.sigma_q_i = std::sqrt(std::max(grad.dot(block * grad), 0.0));
  return out;
}

std::vector<ResonatorFit> fit_resonance_batch(const std::vector<FrequencySweep>& sweeps,
                                              int threads) {
  std::vector<ResonatorFit> fits(sweeps.size());
  if (sweeps.empty()) return fits;
  const int n_threads =
      std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(sweeps.size(), 1)));

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        fits[i] = fit_resonance(sweeps[i]);
      } catch (const std::exception&) {
        fits[i] = ResonatorFit{};
        fits[i].converged = false;
      }
    }
  };

  if (n_threads == 1) {
    worker(0, sweeps.size());
    return fits;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (sweeps.size() + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    const std::size_t end = std::min(begin + chunk, sweeps.size());
    if (begin >= end) break;
    pool.emplace_back(worker, begin, end);
  }
  for (auto& th : pool) th.join();
  return fits;
}

std::vector<FrequencySweep> average_traces(const std::vector<FrequencySweep>& sweeps,
                                           std::size_t k) {
  if (k < 1) throw ValidationError("average_traces: k must be >= 1");
  if (sweeps.empty()) return {};
  for (const auto& s : sweeps) s.validate();
  const auto& grid = sweeps.front().frequencies_hz;
  for (std::size_t i = 1; i < sweeps.size(); ++i) {
    if (sweeps[i].frequencies_hz != grid) {
      throw ValidationError("average_traces: frequency grid mismatch at sweep " +
                            std::to_string(i));
    }
  }

  const std::size_t n_out = sweeps.size() / k;
  std::vector<FrequencySweep> out;
  out.reserve(n_out);
  for (std::size_t g = 0; g < n_out; ++g) {
    FrequencySweep avg;
    avg.frequencies_hz = grid;
    avg.s21.assign(grid.size(), {0.0, 0.0});
    double t_acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& s = sweeps[g * k + j];
      for (std::size_t i = 0; i < grid.size(); ++i) avg.s21[i] += s.s21[i];
      t_acc += s.meta.timestamp_s;
    }
    const double inv_k = 1.0 / static_cast<double>(k);
    for (auto& v : avg.s21) v *= inv_k;
    avg.meta = sweeps[g * k].meta;
    avg.meta.timestamp_s = t_acc * inv_k;
    out.push_back(std::move(avg));
  }
  return out;
}

}  // namespace tlsfluc
