#include <doctest.h>

#include <cmath>
#include <vector>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/rng.hpp"
#include "tlsfluc/stats.hpp"
#include "tlsfluc/synth.hpp"

using namespace tlsfluc;

TEST_CASE("fit_lognormal on quantile-constructed data is exact") {
  // exp of the standard-normal quantiles {-1, 0, +1}: m = 0 exactly and the
  // sample sd of the logs is exactly 1.
  std::vector<double> x{std::exp(-1.0), 1.0, std::exp(1.0)};
  const auto fit = fit_lognormal(x);
  CHECK(fit.mu_log == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fit.sigma_log == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.mean == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(fit.band1[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(fit.band1[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(fit.band2[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(fit.band2[1] == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  // band1 nested inside band2 and the mean inside band2.
  CHECK(fit.band2[0] < fit.band1[0]);
  CHECK(fit.band1[1] < fit.band2[1]);
  CHECK(fit.mean > fit.band2[0]);
  CHECK(fit.mean < fit.band2[1]);
}

TEST_CASE("fit_lognormal sampling recovery within standard errors") {
  const double m = -14.0;
  const double s = 0.24;
  const std::size_t n = 2700;
  Rng rng(21);
  std::vector<double> x(n);
  for (double& v : x) v = std::exp(m + s * rng.normal());
  const auto fit = fit_lognormal(x);
  const double se_m = s / std::sqrt(static_cast<double>(n));
  const double se_s = s / std::sqrt(2.0 * static_cast<double>(n));
  CHECK(std::abs(fit.mu_log - m) < 3.0 * se_m);
  CHECK(std::abs(fit.sigma_log - s) < 3.0 * se_s);
}

TEST_CASE("fit_lognormal scaling equivariance") {
  Rng rng(22);
  std::vector<double> x(500);
  for (double& v : x) v = std::exp(0.3 * rng.normal() - 2.0);
  const auto base = fit_lognormal(x);
  std::vector<double> scaled(x);
  const double c = 41.7;
  for (double& v : scaled) v *= c;
  const auto fit = fit_lognormal(scaled);
  CHECK(fit.mu_log == doctest::Approx(base.mu_log + std::log(c)).epsilon(1e-10));
  CHECK(fit.sigma_log == doctest::Approx(base.sigma_log).epsilon(1e-12));
}

TEST_CASE("fit_lognormal rejects nonpositive input") {
  std::vector<double> bad{1.0, -0.5, 2.0};
  CHECK_THROWS_AS(fit_lognormal(bad), ValidationError);
  std::vector<double> tiny{1.0, 2.0};
  CHECK_THROWS_AS(fit_lognormal(tiny), ValidationError);
}

TEST_CASE("skewness_z is zero for exactly symmetric samples") {
  std::vector<double> x;
  for (int i = 1; i <= 50; ++i) {
    x.push_back(static_cast<double>(i));
    x.push_back(-static_cast<double>(i));
  }
  CHECK(skewness_z(x) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("skewness_z rejects log-normal data at n = 2700") {
  Rng rng(23);
  std::vector<double> x(2700);
  for (double& v : x) v = std::exp(0.25 * rng.normal());
  CHECK(std::abs(skewness_z(x)) > 2.0);
}

TEST_CASE("skewness_z null calibration: |Z| <= 2 in about 95% of normal samples") {
  Rng rng(24);
  int inside = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(2700);
    for (double& v : x) v = rng.normal();
    if (std::abs(skewness_z(x)) <= 2.0) ++inside;
  }
  const double frac = static_cast<double>(inside) / reps;
  CHECK(frac > 0.93);
  CHECK(frac < 0.97);
}

TEST_CASE("skewness_z affine invariance and sign flip") {
  Rng rng(25);
  std::vector<double> x(500);
  for (double& v : x) v = std::exp(0.4 * rng.normal());
  const double z0 = skewness_z(x);

  std::vector<double> shifted(x);
  for (double& v : shifted) v = 2.5 * v + 7.0;
  CHECK(skewness_z(shifted) == doctest::Approx(z0).epsilon(1e-9));

  std::vector<double> flipped(x);
  for (double& v : flipped) v = -3.0 * v + 1.0;
  CHECK(skewness_z(flipped) == doctest::Approx(-z0).epsilon(1e-9));

  std::vector<double> small(7, 1.0);
  CHECK_THROWS_AS(skewness_z(small), ValidationError);
}

TEST_CASE("windowed_convergence is zero at the reference span by construction") {
  FluctuationSpec spec;
  spec.seed = 31;
  const std::size_t n = 1024;
  const auto vals = gen_loss_tangent_process(spec, n, 60.0);
  LossTangentSeries series;
  for (std::size_t i = 0; i < n; ++i) {
    series.timestamps_s.push_back(60.0 * static_cast<double>(i));
    series.f_delta_tls.push_back(vals[i]);
  }
  const double span = series.span_s();
  const std::vector<double> windows{span / 4.0, span / 2.0, span};
  const auto curve = windowed_convergence(series, windows, span);
  REQUIRE(curve.window_sizes_s.size() == 3);
  CHECK(curve.delta_mu[2] == 0.0);
  CHECK(curve.delta_sigma[2] == 0.0);
  CHECK(curve.delta_mu[0] > 0.0);

  const std::vector<double> too_big{2.0 * span};
  CHECK_THROWS_AS(windowed_convergence(series, too_big, span), ValidationError);
}

TEST_CASE("windowed_convergence decreases with window size for white log-normal data") {
  // Ensemble average over seeds; for uncorrelated samples the window error
  // shrinks as the window grows.
  const std::size_t n = 2048;
  const std::vector<double> windows{n * 1.0 / 16.0, n * 1.0 / 8.0, n * 1.0 / 4.0,
                                    n * 1.0 / 2.0};
  std::vector<double> acc_mu(windows.size(), 0.0);
  const int n_seeds = 30;
  for (int seed = 0; seed < n_seeds; ++seed) {
    Rng rng(800 + seed);
    LossTangentSeries series;
    for (std::size_t i = 0; i < n; ++i) {
      series.timestamps_s.push_back(static_cast<double>(i));
      series.f_delta_tls.push_back(std::exp(0.24 * rng.normal()));
    }
    const auto curve =
        windowed_convergence(series, windows, static_cast<double>(n - 1));
    for (std::size_t w = 0; w < windows.size(); ++w) acc_mu[w] += curve.delta_mu[w];
  }
  for (std::size_t w = 1; w < windows.size(); ++w) {
    CHECK(acc_mu[w] < acc_mu[w - 1]);
  }
}

TEST_CASE("averaging_time_scan: k = 1 equals the raw-series skewness") {
  ResonatorParams p;
  p.amplitude_a = {1.0, 0.0};
  p.delay_tau_s = 0.0;
  p.f_r_hz = 6e9;
  p.loaded_q = 2.6e5;
  p.coupling_q_mag = 5e5;
  p.phi_rad = 0.0;

  // Latent log-normal Q_i trajectory rendered into sweeps.
  FluctuationSpec spec;
  spec.seed = 41;
  const std::size_t n = 64;
  const auto f_latent = gen_loss_tangent_process(spec, n, 16.0);
  std::vector<FrequencySweep> sweeps;
  const auto grid = default_sweep_grid(p, 101, 10.0);
  std::vector<double> qis;
  for (std::size_t i = 0; i < n; ++i) {
    ResonatorParams pt = p;
    const double inv_qi = f_latent[i] + 1e-6;
    pt.loaded_q = loaded_q_from_internal(1.0 / inv_qi, pt.coupling_q_mag, pt.phi_rad);
    auto s = synth_sweep(pt, grid, 0.0, 900 + i);
    s.meta.timestamp_s = 16.0 * static_cast<double>(i);
    sweeps.push_back(std::move(s));
  }

  const double q_hp = 1.0e6;
  const std::vector<std::size_t> ks{1};
  const auto scan = averaging_time_scan(sweeps, q_hp, ks, 2);
  REQUIRE(scan.delta_t_s.size() == 1);
  CHECK(scan.delta_t_s[0] == doctest::Approx(16.0));
  CHECK(scan.n_excluded[0] == 0);

  // Oracle: fit each sweep directly and take the skewness of the estimates.
  const auto fits = fit_resonance_batch(sweeps, 2);
  std::vector<double> est;
  for (const auto& f : fits) est.push_back(1.0 / f.q_i - 1.0 / q_hp);
  CHECK(scan.z_scores[0] == doctest::Approx(skewness_z(est)).epsilon(1e-9));
}

TEST_CASE("averaging_time_scan on i.i.d. surrogates decays toward symmetry") {
  // Block averaging of independent log-normal loss values: |Z| must decrease
  // markedly from k = 1 to k = 16 (central-limit behavior).
  ResonatorParams p;
  p.amplitude_a = {1.0, 0.0};
  p.delay_tau_s = 0.0;
  p.f_r_hz = 6e9;
  p.loaded_q = 2.6e5;
  p.coupling_q_mag = 5e5;
  p.phi_rad = 0.0;

  Rng rng(55);
  const std::size_t n = 512;
  const auto grid = default_sweep_grid(p, 101, 10.0);
  std::vector<FrequencySweep> sweeps;
  for (std::size_t i = 0; i < n; ++i) {
    ResonatorParams pt = p;
    const double f_val = 9e-7 * std::exp(0.24 * rng.normal() - 0.0288);
    pt.loaded_q = loaded_q_from_internal(1.0 / (f_val + 1e-6), pt.coupling_q_mag,
                                         pt.phi_rad);
    auto s = synth_sweep(pt, grid, 0.0, 2200 + i);
    s.meta.timestamp_s = 16.0 * static_cast<double>(i);
    sweeps.push_back(std::move(s));
  }

  const std::vector<std::size_t> ks{1, 4, 16};
  const auto scan = averaging_time_scan(sweeps, 1.0e6, ks, 4);
  REQUIRE(scan.z_scores.size() == 3);
  CHECK(std::abs(scan.z_scores[0]) > std::abs(scan.z_scores[2]));
  CHECK(scan.delta_t_s[2] == doctest::Approx(256.0));
}

TEST_CASE("averaging_time_scan rejects k = 0") {
  ResonatorParams p;
  p.amplitude_a = {1.0, 0.0};
  p.f_r_hz = 6e9;
  p.loaded_q = 2.6e5;
  p.coupling_q_mag = 5e5;
  const auto grid = default_sweep_grid(p, 32, 10.0);
  std::vector<FrequencySweep> sweeps;
  for (int i = 0; i < 4; ++i) {
    auto s = synth_sweep(p, grid, 0.0, i);
    s.meta.timestamp_s = 16.0 * i;
    sweeps.push_back(std::move(s));
  }
  const std::vector<std::size_t> ks{0};
  CHECK_THROWS_AS(averaging_time_scan(sweeps, 1e6, ks), ValidationError);
}

TEST_CASE("averaging_time_scan rejects irregular spacing") {
  ResonatorParams p;
  p.amplitude_a = {1.0, 0.0};
  p.f_r_hz = 6e9;
  p.loaded_q = 2.6e5;
  p.coupling_q_mag = 5e5;
  const auto grid = default_sweep_grid(p, 32, 10.0);
  std::vector<FrequencySweep> sweeps;
  for (int i = 0; i < 4; ++i) {
    auto s = synth_sweep(p, grid, 0.0, i);
    s.meta.timestamp_s = i * i * 10.0;  // quadratic spacing
    sweeps.push_back(std::move(s));
  }
  const std::vector<std::size_t> ks{1};
  CHECK_THROWS_AS(averaging_time_scan(sweeps, 1e6, ks), ValidationError);
}
