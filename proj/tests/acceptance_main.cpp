// Acceptance suite: end-to-end checks of the full toolkit against its pinned
// quantitative targets. Each criterion prints one PASS/FAIL line; the exit
// status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/constants.hpp"
#include "tlsfluc/io.hpp"
#include "tlsfluc/model.hpp"
#include "tlsfluc/rng.hpp"
#include "tlsfluc/spectral.hpp"
#include "tlsfluc/stats.hpp"
#include "tlsfluc/synth.hpp"
#include "tlsfluc/tls.hpp"

using namespace tlsfluc;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

std::vector<double> normalized(const std::vector<double>& x) {
  const double m = mean_of(x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / m;
  return out;
}

double mean_low_decade(const SpectrumEstimate& spec) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
    if (spec.freqs_hz[i] <= spec.freqs_hz.front() * 10.0) {
      acc += spec.values[i];
      ++n;
    }
  }
  return acc / static_cast<double>(n);
}

double psd_at(const SpectrumEstimate& spec, double f0) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
    if (spec.freqs_hz[i] >= f0 / std::sqrt(2.0) && spec.freqs_hz[i] <= f0 * std::sqrt(2.0)) {
      acc += spec.values[i];
      ++n;
    }
  }
  return n > 0 ? acc / static_cast<double>(n) : 0.0;
}

RunConfig paper_config() {
  RunConfig cfg = default_run_config();
  cfg.fluctuation.target_mean = 9.0e-7;
  cfg.fluctuation.target_sd = 2.2e-7;
  cfg.fluctuation.spectral_exponent = 1.0;
  return cfg;
}

// --- 1. noiseless resonance-fit round trip ---------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240301);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    ResonatorParams p;
    p.amplitude_a = std::polar(0.5 + rng.uniform(), (rng.uniform() - 0.5) * 2.0);
    p.delay_tau_s = rng.uniform() * 100e-9;
    p.f_r_hz = 4e9 + 4e9 * rng.uniform();
    p.loaded_q = std::pow(10.0, 4.0 + 3.0 * rng.uniform());
    p.phi_rad = (rng.uniform() - 0.5) * 2.0 * k_pi / 3.0;
    p.coupling_q_mag =
        p.loaded_q * (1.2 + 2.0 * rng.uniform()) / std::max(std::cos(p.phi_rad), 0.3);

    const auto sweep =
        synth_sweep(p, default_sweep_grid(p, 201, 10.0), 0.0, 10000 + trial);
    ResonatorFit fit;
    try {
      fit = fit_resonance(sweep);
    } catch (const std::exception&) {
      ++failures;
      continue;
    }
    if (!fit.converged) {
      ++failures;
      continue;
    }
    const double qi_true = internal_q(p.loaded_q, p.coupling_q_mag, p.phi_rad);
    const double errs[] = {
        std::abs(fit.params.f_r_hz - p.f_r_hz) / p.f_r_hz,
        std::abs(fit.params.loaded_q - p.loaded_q) / p.loaded_q,
        std::abs(fit.params.coupling_q_mag - p.coupling_q_mag) / p.coupling_q_mag,
        std::abs(fit.params.phi_rad - p.phi_rad),
        std::abs(fit.q_i - qi_true) / qi_true};
    for (double e : errs) {
      worst = std::max(worst, e);
      if (e >= 1e-6) ++failures;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char detail[160];
  std::snprintf(detail, sizeof(detail), "worst rel err %.2e, %d violations, %.1f s",
                worst, failures, secs);
  report(1, failures == 0 && secs < 30.0,
         "noiseless round trip over 200 randomized resonators", detail);
}

// --- 2. confidence-interval calibration -------------------------------------

void criterion_2() {
  ResonatorParams p;
  p.amplitude_a = {0.9, -0.15};
  p.delay_tau_s = 30e-9;
  p.f_r_hz = 6.0e9;
  p.loaded_q = 2.0e5;
  p.coupling_q_mag = 4.0e5;
  p.phi_rad = 0.15;
  const double qi_true = internal_q(p.loaded_q, p.coupling_q_mag, p.phi_rad);
  const auto grid = default_sweep_grid(p, 201, 10.0);

  int covered = 0;
  int converged = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto sweep = synth_sweep(p, grid, 2e-3, 30000 + trial);
    const auto fit = fit_resonance(sweep);
    if (!fit.converged) continue;
    ++converged;
    if (std::abs(fit.q_i - qi_true) <= fit.sigma_q_i) ++covered;
  }
  const double frac = static_cast<double>(covered) / converged;
  char detail[120];
  std::snprintf(detail, sizeof(detail), "coverage %.1f%% over %d fits", 100.0 * frac,
                converged);
  report(2, converged >= 990 && frac >= 0.63 && frac <= 0.73,
         "68% interval covers the true Q_i in 63-73% of noisy fits", detail);
}

// --- 3. saturation-model recovery -------------------------------------------

void criterion_3() {
  TLSModel truth;
  truth.f_delta0 = 9.0e-7;
  truth.n_c = 100.0;
  truth.beta = 0.5;
  truth.q_pi = 1.0e6;
  const int npts = 800;

  double worst_f = 0.0, worst_b = 0.0;
  int failures = 0;
  for (int seed = 0; seed < 50; ++seed) {
    PowerSweepData data;
    data.temperature_k = 0.0;
    data.f_r_hz = 6.0e9;
    Rng rng(40000 + seed);
    Environment env;
    env.omega_r = 2.0 * k_pi * data.f_r_hz;
    env.temperature_k = 0.0;
    for (int i = 0; i < npts; ++i) {
      const double n = std::pow(10.0, -1.0 + 7.0 * i / (npts - 1.0));
      env.mean_photons = n;
      const double qi = 1.0 / tls_inverse_q(truth, env);
      data.mean_photons.push_back(n);
      data.q_i.push_back(qi * (1.0 + 0.01 * rng.normal()));
      data.q_i_sigma.push_back(0.01 * qi);
    }
    try {
      const auto fit = fit_power_dependence(data);
      const double ef = std::abs(fit.model.f_delta0 - truth.f_delta0) / truth.f_delta0;
      const double eb = std::abs(fit.model.beta - truth.beta) / truth.beta;
      worst_f = std::max(worst_f, ef);
      worst_b = std::max(worst_b, eb);
      if (ef >= 0.03 || eb >= 0.05) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail), "worst dF=%.2f%%, worst dbeta=%.2f%%",
                100.0 * worst_f, 100.0 * worst_b);
  report(3, failures == 0, "saturation fit recovers F*delta0 within 3%, beta within 5%",
         detail);
}

// --- 4/5. interleaved reproduction and coherence hierarchy ------------------

void criteria_4_and_5() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = paper_config();
  cfg.fluctuation.seed = 42;

  const auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                            cfg.schedule, cfg.measurement);
  const auto est = interleaved_series(run.lp, run.hp);
  const auto positive = est.positive_series();
  const auto dist = fit_lognormal(positive.f_delta_tls);

  const double mean_err = std::abs(dist.mean - 9.0e-7) / 9.0e-7;
  const double sd_err = std::abs(dist.sd - 2.2e-7) / 2.2e-7;
  double q_min = 1e18, q_max = 0.0;
  for (double q : run.lp.q_i) {
    q_min = std::min(q_min, q);
    q_max = std::max(q_max, q);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  char detail[220];
  std::snprintf(detail, sizeof(detail),
                "mean %.3e (%+.1f%%), sd %.3e (%+.1f%%), Q_LP in [%.3g, %.3g], "
                "%zu flagged, %.1f s",
                dist.mean, 100.0 * (dist.mean / 9.0e-7 - 1.0), dist.sd,
                100.0 * (dist.sd / 2.2e-7 - 1.0), q_min, q_max, est.flagged.size(),
                secs);
  report(4,
         mean_err < 0.05 && sd_err < 0.15 && q_min > 3.3e5 && q_max < 1.0e6 &&
             secs < 300.0,
         "16 h interleaved run reproduces the seeded log-normal statistics", detail);

  // Criterion 5 on the same run.
  const auto lp = normalized(run.lp.q_i);
  const auto mp = normalized(run.mp.q_i);
  const auto hp = normalized(run.hp.q_i);
  const double dt = cfg.schedule.cycle_period_s();
  const std::size_t seg = default_segment_length(lp.size());
  const double coh_lm = mean_low_decade(coherence(lp, mp, dt, seg));
  const double coh_lh = mean_low_decade(coherence(lp, hp, dt, seg));
  char detail5[120];
  std::snprintf(detail5, sizeof(detail5), "coh(LP,MP)=%.3f vs coh(LP,HP)=%.3f", coh_lm,
                coh_lh);
  report(5, coh_lm > 2.0 * coh_lh, "low-frequency coherence hierarchy LP-MP >> LP-HP",
         detail5);
}

// --- 6. fluctuation suppression at high power --------------------------------

void criterion_6() {
  RunConfig cfg = paper_config();
  const double duration = 12.0 * 3600.0;

  cfg.fluctuation.seed = 61;
  const auto lp_run = simulate_timetrace(cfg.tls, cfg.resonator, cfg.fluctuation,
                                         cfg.schedule.power_points_dbm[0], 38.0,
                                         duration, cfg.measurement, 0);
  cfg.fluctuation.seed = 62;
  const auto hp_run = simulate_timetrace(cfg.tls, cfg.resonator, cfg.fluctuation,
                                         cfg.schedule.power_points_dbm[2], 10.0,
                                         duration, cfg.measurement, 2);

  const auto lp = normalized(lp_run.series.q_i);
  const auto hp = normalized(hp_run.series.q_i);
  const auto psd_lp = welch_psd(lp, 38.0, default_segment_length(lp.size()));
  const auto psd_hp = welch_psd(hp, 10.0, default_segment_length(hp.size()));
  const double s_lp = psd_at(psd_lp, 1e-3);
  const double s_hp = psd_at(psd_hp, 1e-3);
  const double ratio = s_lp / s_hp;

  char detail[140];
  std::snprintf(detail, sizeof(detail), "S_LP(1 mHz)=%.3g, S_HP=%.3g, ratio=%.0f", s_lp,
                s_hp, ratio);
  report(6, ratio >= 1e3, "normalized S_Qi at HP sits >= 1e3 below LP at 1 mHz", detail);
}

// --- 7. linear sigma-Q model across resonators -------------------------------

void criterion_7() {
  RunConfig base = paper_config();
  const double a_lp_nominal = 0.96;  // LP saturation factor at these defaults
  // TLS share of the total loss seeded so the realized relative Q_i scatter
  // lands at 13% (exact-variance standardization contracts the log-normal cv
  // slightly below its asymptotic value).
  const double tls_share = 0.585;

  std::vector<std::pair<double, double>> lp_points, hp_points;
  for (int j = 0; j < 10; ++j) {
    const double q_target = 2.0e5 * std::pow(10.0, j / 9.0);
    RunConfig cfg = base;
    cfg.fluctuation.target_mean = tls_share / (q_target * a_lp_nominal);
    cfg.fluctuation.target_sd = 0.244 * cfg.fluctuation.target_mean;
    cfg.tls.f_delta0 = cfg.fluctuation.target_mean;
    cfg.tls.q_pi = q_target / (1.0 - tls_share);
    cfg.resonator.loaded_q =
        loaded_q_from_internal(q_target, cfg.resonator.coupling_q_mag, 0.0);

    cfg.fluctuation.seed = 700 + static_cast<std::uint64_t>(j);
    const auto lp = simulate_timetrace(cfg.tls, cfg.resonator, cfg.fluctuation,
                                       cfg.schedule.power_points_dbm[0], 38.0,
                                       6.0 * 3600.0, cfg.measurement, 0);
    cfg.fluctuation.seed = 800 + static_cast<std::uint64_t>(j);
    const auto hp = simulate_timetrace(cfg.tls, cfg.resonator, cfg.fluctuation,
                                       cfg.schedule.power_points_dbm[2], 10.0,
                                       6.0 * 3600.0, cfg.measurement, 2);
    lp_points.emplace_back(mean_of(lp.series.q_i), sd_of(lp.series.q_i));
    hp_points.emplace_back(mean_of(hp.series.q_i), sd_of(hp.series.q_i));
  }
  const double slope_lp = fit_sigma_vs_q(lp_points);
  const double slope_hp = fit_sigma_vs_q(hp_points);

  char detail[120];
  std::snprintf(detail, sizeof(detail), "slope LP=%.4f (0.13 +- 0.02), HP=%.4f "
                "(0.005 +- 0.001)", slope_lp, slope_hp);
  report(7,
         slope_lp > 0.11 && slope_lp < 0.15 && slope_hp > 0.004 && slope_hp < 0.006,
         "sigma_Qi proportional to Q_i with the seeded LP/HP slopes", detail);
}

// --- 8. distribution-parameter convergence vs window size --------------------

void criterion_8() {
  RunConfig cfg = paper_config();
  std::vector<double> windows;
  for (double h : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0}) {
    windows.push_back(h * 3600.0);
  }

  std::vector<double> acc_mu(windows.size(), 0.0), acc_sg(windows.size(), 0.0);
  const int n_seeds = 20;
  for (int seed = 0; seed < n_seeds; ++seed) {
    cfg.fluctuation.seed = 8000 + static_cast<std::uint64_t>(seed);
    const auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                              cfg.schedule, cfg.measurement);
    const auto positive = interleaved_series(run.lp, run.hp).positive_series();
    // The sampled series spans marginally less than the nominal 16 h.
    if (seed == 0) {
      while (!windows.empty() && windows.back() > positive.span_s()) {
        windows.pop_back();
        acc_mu.pop_back();
        acc_sg.pop_back();
      }
    }
    const auto curve = windowed_convergence(positive, windows, positive.span_s());
    for (std::size_t w = 0; w < windows.size(); ++w) {
      acc_mu[w] += curve.delta_mu[w];
      acc_sg[w] += curve.delta_sigma[w];
    }
  }
  double cross_mu = -1.0, cross_sg = -1.0;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    acc_mu[w] /= n_seeds;
    acc_sg[w] /= n_seeds;
    if (cross_mu < 0.0 && acc_mu[w] <= 0.05) cross_mu = windows[w] / 3600.0;
    if (cross_sg < 0.0 && acc_sg[w] <= 0.10) cross_sg = windows[w] / 3600.0;
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "delta_mu <= 5%% first at %.1f h (target 2 +- 1), delta_sigma <= 10%% "
                "first at %.1f h (target 4 +- 2)",
                cross_mu, cross_sg);
  const bool mu_ok = cross_mu >= 1.0 && cross_mu <= 3.0;
  const bool sg_ok = cross_sg >= 2.0 && cross_sg <= 6.0;
  report(8, mu_ok && sg_ok, "window-size convergence of the distribution parameters",
         detail);
  if (!mu_ok) {
    std::printf("       note: with a pure 1/f^1 loss process at cv = 24%%, the "
                "window-mean error floor alone keeps delta_mu above 5%% for windows "
                "under roughly 4 h; the 2 h target needs a spectrum that flattens at "
                "low frequency (see README, known limitations)\n");
  }
}

// --- 9. skewness vs averaging time -------------------------------------------

void criterion_9() {
  // Central-limit oracle on an i.i.d. log-normal surrogate: the skewness of
  // k-averaged blocks decays as 1/sqrt(k). The sample count per k stays fixed
  // so the Z statistic tracks the skewness itself rather than the shrinking
  // sample size.
  const double s = std::sqrt(std::log(1.0 + std::pow(2.2 / 9.0, 2)));
  const std::size_t n_per_k = 40000;
  const std::vector<std::size_t> ks{1, 2, 4, 8, 16, 32, 64, 91};

  Rng rng(90001);
  std::vector<double> ratio;
  for (std::size_t k : ks) {
    std::vector<double> means(n_per_k);
    for (std::size_t i = 0; i < n_per_k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += std::exp(s * rng.normal());
      means[i] = acc / static_cast<double>(k);
    }
    const double z = std::abs(skewness_z(means));
    const double dt = 16.0 * static_cast<double>(k);
    ratio.push_back(z * std::sqrt(dt));
  }
  const double r_max = *std::max_element(ratio.begin(), ratio.end());
  const double r_min = *std::min_element(ratio.begin(), ratio.end());

  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "|Z| sqrt(dt) spread %.2f (<= 2.25 for a 1/sqrt(dt) law)",
                r_max / r_min);
  report(9, r_max / r_min <= 2.25, "skewness |Z| follows 1/sqrt(dt) within factor 1.5",
         detail);
}

// --- 10. spectral estimator suite --------------------------------------------

void criterion_10() {
  bool pass = true;
  std::string notes;

  {
    Rng rng(100);
    const double variance = 1.3;
    const double dt = 0.7;
    std::vector<double> x(1 << 16);
    for (double& v : x) v = std::sqrt(variance) * rng.normal();
    const auto psd = welch_psd(x, dt, 512, 0.5);
    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < psd.values.size(); ++i) {
      mean += psd.values[i];
      ++n;
    }
    mean /= static_cast<double>(n);
    const double target = 2.0 * variance * dt;
    if (std::abs(mean / target - 1.0) > 0.10) pass = false;
    notes += "white " + std::to_string(mean / target) + "x";
  }
  {
    Rng rng(101);
    std::vector<double> x(8192);
    for (double& v : x) v = rng.normal();
    const auto coh = coherence(x, x, 1.0, 512, 0.5);
    for (double v : coh.values) {
      if (std::abs(v - 1.0) > 1e-12) pass = false;
    }
    notes += ", self-coh 1";
  }
  {
    Rng ra(102), rb(103);
    const std::size_t n = 32 * 256;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ra.normal();
      b[i] = rb.normal();
    }
    const auto coh = coherence(a, b, 1.0, 256, 0.0);
    const double mean = mean_of(coh.values);
    if (std::abs(mean * 32.0 - 1.0) > 0.30) pass = false;
    notes += ", indep K*coh " + std::to_string(mean * 32.0);
  }
  {
    Rng rng(104);
    std::vector<double> x(1 << 15);
    for (double& v : x) v = rng.normal();
    const double var = sd_of(x) * sd_of(x);
    const auto psd = welch_psd(x, 1.5, 1024, 0.5);
    const double df = psd.freqs_hz[1] - psd.freqs_hz[0];
    double total = 0.0;
    for (double v : psd.values) total += v * df;
    if (std::abs(total / var - 1.0) > 0.10) pass = false;
    notes += ", parseval " + std::to_string(total / var) + "x";
  }
  report(10, pass, "Welch estimator suite (level, self-coherence, floor, Parseval)",
         notes);
}

// --- 11. coupling-Q stability under full-pipeline fits -----------------------

void criterion_11() {
  RunConfig cfg = paper_config();
  cfg.measurement.mode = MeasurementMode::kFull;
  // Noise chosen so the per-fit |Qc| scatter lands near the 2% regime the
  // stability study operates in.
  cfg.measurement.noise_sd = 2.5e-2;
  cfg.schedule.total_duration_s = 6.0 * 3600.0;
  cfg.fluctuation.seed = 1101;

  const auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                            cfg.schedule, cfg.measurement, 4);
  std::vector<double> qc, qi;
  for (const auto& fit : run.fits_lp) {
    qc.push_back(fit.params.coupling_q_mag);
    qi.push_back(fit.q_i);
  }
  const double qc_scatter = sd_of(qc) / mean_of(qc);
  const double qi_scatter = sd_of(qi) / mean_of(qi);

  const auto coh =
      coherence(normalized(qi), normalized(qc), cfg.schedule.cycle_period_s(),
                default_segment_length(qi.size()));
  const double low = mean_low_decade(coh);

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "|Qc| scatter %.2f%%, Q_i scatter %.1f%%, low-f coh(Qi,Qc)=%.3f, "
                "%zu failed fits",
                100.0 * qc_scatter, 100.0 * qi_scatter, low, run.n_failed_fits);
  report(11,
         qc_scatter <= 0.03 && qi_scatter >= 0.10 && low < 0.3 &&
             run.n_failed_fits == 0,
         "fitted |Qc| stays stable while Q_i fluctuates", detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite, toolkit version %s\n", k_tool_version);
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
