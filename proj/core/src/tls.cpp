#include "tlsfluc/tls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/levmar.hpp"

namespace tlsfluc {

void PowerSweepData::validate() const {
  if (mean_photons.size() != q_i.size() || mean_photons.size() != q_i_sigma.size()) {
    throw ValidationError("power sweep: array lengths differ");
  }
  if (mean_photons.size() < 4) {
    throw ValidationError("power sweep: at least 4 points required");
  }
  for (std::size_t i = 0; i < mean_photons.size(); ++i) {
    if (!(mean_photons[i] > 0.0)) {
      throw ValidationError("power sweep: nonpositive photon number at row " +
                            std::to_string(i));
    }
    if (!(q_i[i] > 0.0)) {
      throw ValidationError("power sweep: nonpositive q_i at row " + std::to_string(i));
    }
  }
  if (!(temperature_k >= 0.0)) throw ValidationError("power sweep: temperature must be >= 0");
  if (!(f_r_hz > 0.0)) throw ValidationError("power sweep: f_r must be > 0");
}

TLSFit fit_power_dependence(const PowerSweepData& data) {
  data.validate();

  const auto [n_min_it, n_max_it] =
      std::minmax_element(data.mean_photons.begin(), data.mean_photons.end());
  const double decades = std::log10(*n_max_it / *n_min_it);
  if (decades < 3.0) {
    throw FitError("fit_power_dependence: photon range must span >= 3 decades");
  }

  double thermal = 1.0;
  if (data.temperature_k > 0.0) {
    thermal = std::tanh(k_hbar * 2.0 * k_pi * data.f_r_hz /
                        (2.0 * k_boltzmann * data.temperature_k));
  }

  const std::size_t n = data.q_i.size();
  std::vector<double> y(n), w(n);
  bool weighted = true;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 1.0 / data.q_i[i];
    if (!(data.q_i_sigma[i] > 0.0)) weighted = false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    // sigma_{1/Q} = sigma_Q / Q^2
    w[i] = weighted ? data.q_i[i] * data.q_i[i] / data.q_i_sigma[i] : 1.0;
  }

  // Parameters: (f_delta0, ln n_c, beta, 1/q_pi).
  const double y_min = *std::min_element(y.begin(), y.end());
  const double y_max = *std::max_element(y.begin(), y.end());
  const double g0 = 0.95 * y_min;
  const double f0 = std::max((y_max - g0) / thermal, 1e-3 * y_max);
  const double ln_nc0 = 0.5 * (std::log(*n_min_it) + std::log(*n_max_it));

  auto residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    const double f_delta0 = x[0];
    const double n_c = std::exp(x[1]);
    const double beta = x[2];
    const double g = x[3];
    for (std::size_t i = 0; i < n; ++i) {
      const double model =
          f_delta0 * thermal / std::pow(1.0 + data.mean_photons[i] / n_c, beta) + g;
      r[static_cast<Eigen::Index>(i)] = (model - y[i]) * w[i];
    }
    return r;
  };

  Eigen::VectorXd x0(4);
  x0 << f0, ln_nc0, 0.3, g0;
  Eigen::VectorXd lower(4), upper(4);
  lower << 0.0, std::log(*n_min_it) - 20.0, 1e-3, 0.0;
  upper << 1.0, std::log(*n_max_it) + 20.0, 1.0, 1.0;
  LevmarOptions opts;
  opts.max_iterations = 500;
  const LevmarResult res = levmar(residuals, x0, opts, &lower, &upper);
  if (!res.converged) {
    throw FitError("fit_power_dependence: did not converge");
  }

  TLSFit fit;
  fit.model.f_delta0 = res.x[0];
  fit.model.n_c = std::exp(res.x[1]);
  fit.model.beta = res.x[2];
  fit.model.q_pi = res.x[3] > 0.0 ? 1.0 / res.x[3] : std::numeric_limits<double>::infinity();
  fit.rss = res.rss;
  fit.converged = true;

  const Eigen::MatrixXd cov = covariance_from_jtj(res.jtj, res.rss, static_cast<int>(n));
  fit.sigma_f_delta0 = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.sigma_n_c = fit.model.n_c * std::sqrt(std::max(cov(1, 1), 0.0));
  fit.sigma_beta = std::sqrt(std::max(cov(2, 2), 0.0));
  const double sigma_g = std::sqrt(std::max(cov(3, 3), 0.0));
  fit.sigma_q_pi = std::isfinite(fit.model.q_pi)
                       ? fit.model.q_pi * fit.model.q_pi * sigma_g
                       : std::numeric_limits<double>::infinity();
  return fit;
}

double interleaved_loss_tangent(double q_lp, double q_hp) {
  if (!(q_lp > 0.0) || !(q_hp > 0.0)) {
    throw ValidationError("interleaved_loss_tangent: quality factors must be > 0");
  }
  return 1.0 / q_lp - 1.0 / q_hp;
}

InterleavedEstimate interleaved_series(const QiTimeSeries& lp, const QiTimeSeries& hp) {
  lp.validate();
  hp.validate();
  if (lp.size() != hp.size()) {
    throw ValidationError("interleaved_series: LP and HP lengths differ");
  }
  InterleavedEstimate out;
  out.timestamps_s = lp.timestamps_s;
  out.f_delta_tls.resize(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) {
    out.f_delta_tls[i] = interleaved_loss_tangent(lp.q_i[i], hp.q_i[i]);
    if (!(out.f_delta_tls[i] > 0.0)) out.flagged.push_back(i);
  }
  return out;
}

LossTangentSeries InterleavedEstimate::positive_series() const {
  LossTangentSeries s;
  s.timestamps_s.reserve(timestamps_s.size());
  s.f_delta_tls.reserve(timestamps_s.size());
  for (std::size_t i = 0; i < timestamps_s.size(); ++i) {
    if (f_delta_tls[i] > 0.0) {
      s.timestamps_s.push_back(timestamps_s[i]);
      s.f_delta_tls.push_back(f_delta_tls[i]);
    }
  }
  return s;
}

double fit_sigma_vs_q(std::span<const std::pair<double, double>> mean_sd_points) {
  if (mean_sd_points.empty()) {
    throw ValidationError("fit_sigma_vs_q: empty input");
  }
  double num = 0.0, den = 0.0;
  for (const auto& [q, sigma] : mean_sd_points) {
    if (!(q > 0.0) || !(sigma >= 0.0)) {
      throw ValidationError("fit_sigma_vs_q: values must be positive");
    }
    num += sigma * q;
    den += q * q;
  }
  return num / den;
}

}  // namespace tlsfluc
