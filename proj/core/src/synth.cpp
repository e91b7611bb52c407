#include "tlsfluc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/fft.hpp"
#include "tlsfluc/rng.hpp"

namespace tlsfluc {

namespace {

// RNG substream ids within one simulation seed.
constexpr std::uint64_t kStreamLatent = 0;
constexpr std::uint64_t kStreamFreq = 1;
constexpr std::uint64_t kStreamQpi = 2;
constexpr std::uint64_t kStreamMeasure = 3;
constexpr std::uint64_t kStreamSweepBase = 1000;

// Latent-process grid resolution per measurement cycle.
constexpr std::size_t kLatentOversample = 64;

double lerp_at(const std::vector<double>& values, double total_span, double t) {
  const double dt = total_span / static_cast<double>(values.size());
  double pos = t / dt;
  if (pos <= 0.0) return values.front();
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

struct LogNormalParams {
  double m = 0.0;
  double s = 0.0;
};

LogNormalParams moment_matched(double mean, double sd) {
  LogNormalParams p;
  const double ratio2 = (sd / mean) * (sd / mean);
  p.s = std::sqrt(std::log1p(ratio2));
  p.m = std::log(mean * mean / std::sqrt(mean * mean + sd * sd));
  return p;
}

}  // namespace

void FluctuationSpec::validate() const {
  if (!(target_mean > 0.0)) throw ValidationError("fluctuation: target_mean must be > 0");
  if (!(target_sd >= 0.0)) throw ValidationError("fluctuation: target_sd must be >= 0");
  if (!(spectral_exponent >= 0.0)) {
    throw ValidationError("fluctuation: spectral_exponent must be >= 0");
  }
  if (!(hp_relative_sd >= 0.0 && hp_relative_sd < 1.0) ||
      !(freq_relative_sd >= 0.0 && freq_relative_sd < 1.0)) {
    throw ValidationError("fluctuation: relative sds must lie in [0, 1)");
  }
}

double InterleavedSchedule::cycle_period_s() const {
  return idle_tau1_s + point_durations_s[0] + point_durations_s[1] + idle_tau2_s +
         point_durations_s[2];
}

void InterleavedSchedule::validate() const {
  if (!(idle_tau1_s > 0.0) || !(idle_tau2_s > 0.0)) {
    throw ValidationError("schedule: idle times must be > 0");
  }
  for (double d : point_durations_s) {
    if (!(d > 0.0)) throw ValidationError("schedule: point durations must be > 0");
  }
  if (!(total_duration_s >= cycle_period_s())) {
    throw ValidationError("schedule: total duration shorter than one cycle");
  }
}

void MeasurementModel::validate() const {
  if (!(temperature_k >= 0.0)) throw ValidationError("measurement: temperature must be >= 0");
  if (!(attenuation_db >= 0.0)) throw ValidationError("measurement: attenuation must be >= 0");
  if (sweep_points < 8) throw ValidationError("measurement: sweep_points must be >= 8");
  if (!(span_linewidths > 0.0)) throw ValidationError("measurement: span must be > 0");
  if (!(noise_sd >= 0.0)) throw ValidationError("measurement: noise_sd must be >= 0");
  for (double s : fast_rel_sigma) {
    if (!(s >= 0.0 && s < 1.0)) {
      throw ValidationError("measurement: fast_rel_sigma must lie in [0, 1)");
    }
  }
}

std::vector<double> gen_one_over_f_gaussian(std::size_t n, double dt_s, double alpha,
                                            double variance, std::uint64_t seed) {
  if (n < 2) throw ValidationError("gen_one_over_f_gaussian: n must be >= 2");
  if (!(dt_s > 0.0)) throw ValidationError("gen_one_over_f_gaussian: dt must be > 0");
  if (!(alpha >= 0.0)) throw ValidationError("gen_one_over_f_gaussian: alpha must be >= 0");
  if (!(variance >= 0.0)) throw ValidationError("gen_one_over_f_gaussian: variance must be >= 0");

  if (variance == 0.0) return std::vector<double>(n, 0.0);

  Rng rng(seed);
  std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
  const std::size_t half = (n - 1) / 2;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 1; k <= half; ++k) {
    const double scale = std::pow(static_cast<double>(k), -alpha / 2.0);
    const std::complex<double> z(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
    spectrum[k] = scale * z;
    spectrum[n - k] = std::conj(spectrum[k]);
  }
  if (n % 2 == 0) {
    const double scale = std::pow(static_cast<double>(n / 2), -alpha / 2.0);
    spectrum[n / 2] = scale * rng.normal();
  }

  auto field = fft_inverse(spectrum);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = field[i].real() * static_cast<double>(n);

  // The zeroed DC bin makes the sequence exactly zero-mean; rescale to the
  // exact target sample variance.
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double& v : x) {
    v -= mean;
    var += v * v;
  }
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw ValidationError("gen_one_over_f_gaussian: degenerate realization");
  const double scale = std::sqrt(variance / var);
  for (double& v : x) v *= scale;
  return x;
}

std::vector<double> gen_loss_tangent_process(const FluctuationSpec& spec, std::size_t n,
                                             double dt_s) {
  spec.validate();
  if (n < 2) throw ValidationError("gen_loss_tangent_process: n must be >= 2");

  if (spec.target_sd == 0.0) return std::vector<double>(n, spec.target_mean);

  const auto ln = moment_matched(spec.target_mean, spec.target_sd);
  auto g = gen_one_over_f_gaussian(n, dt_s, spec.spectral_exponent, 1.0, spec.seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(ln.m + ln.s * g[i]);
  return x;
}

std::vector<double> default_sweep_grid(const ResonatorParams& p, int n_points,
                                       double span_linewidths) {
  if (n_points < 3) throw ValidationError("sweep grid: need at least 3 points");
  const double span = span_linewidths * p.f_r_hz / p.loaded_q;
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  const double f0 = p.f_r_hz - span / 2.0;
  const double step = span / static_cast<double>(n_points - 1);
  for (int i = 0; i < n_points; ++i) grid[static_cast<std::size_t>(i)] = f0 + step * i;
  return grid;
}

FrequencySweep synth_sweep(const ResonatorParams& p, std::vector<double> grid_hz,
                           double noise_sd, std::uint64_t seed) {
  p.validate();
  if (!(noise_sd >= 0.0)) throw ValidationError("synth_sweep: noise_sd must be >= 0");

  FrequencySweep sweep;
  sweep.frequencies_hz = std::move(grid_hz);
  sweep.s21.resize(sweep.frequencies_hz.size());
  for (std::size_t i = 1; i < sweep.frequencies_hz.size(); ++i) {
    if (!(sweep.frequencies_hz[i] > sweep.frequencies_hz[i - 1])) {
      throw ValidationError("synth_sweep: non-monotonic grid at row " + std::to_string(i));
    }
  }
  if (sweep.frequencies_hz.size() < 3) {
    throw ValidationError("synth_sweep: grid must have at least 3 points");
  }

  Rng rng(seed);
  for (std::size_t i = 0; i < sweep.frequencies_hz.size(); ++i) {
    std::complex<double> v = eval_s21(sweep.frequencies_hz[i], p);
    if (noise_sd > 0.0) {
      v += std::complex<double>(noise_sd * rng.normal(), noise_sd * rng.normal());
    }
    sweep.s21[i] = v;
  }
  sweep.meta.resonator_id = "synthetic";
  return sweep;
}

namespace {

struct PointSample {
  double t = 0.0;
  int power = 0;  // 0 LP, 1 MP, 2 HP
};

struct SimContext {
  const TLSModel* tls = nullptr;
  const ResonatorParams* res = nullptr;
  const FluctuationSpec* spec = nullptr;
  const MeasurementModel* meas = nullptr;
  std::vector<double> latent_g;  // standardized log-scale process
  double span_s = 0.0;
  LogNormalParams ln;
  std::array<double, 3> photons{};
  std::array<double, 3> power_dbm{};
};

// One simulated measurement: latent sampling, Eq. (2), then either a fitted
// synthetic sweep or direct fit-level noise.
void run_points(const SimContext& ctx, const std::vector<PointSample>& points,
                Rng& qpi_rng, Rng& meas_rng, std::uint64_t seed, int threads,
                TruthRecord& truth, std::vector<std::vector<double>>& t_out,
                std::vector<std::vector<double>>& q_out,
                std::vector<std::vector<double>>& s_out,
                std::vector<std::vector<ResonatorFit>>& fits_out,
                std::size_t& n_failed) {
  const bool fast = ctx.meas->mode == MeasurementMode::kFast;
  const double inv_qpi0 = 1.0 / ctx.tls->q_pi;

  std::vector<double> freq_g;
  if (ctx.spec->freq_relative_sd > 0.0) {
    freq_g = gen_one_over_f_gaussian(ctx.latent_g.size(), ctx.span_s / ctx.latent_g.size(),
                                     ctx.spec->spectral_exponent, 1.0,
                                     mix_seed(seed, kStreamFreq));
  }

  struct Pending {
    std::size_t truth_index;
    int power;
    double sigma_fast;
    double q_fast;
    FrequencySweep sweep;  // full mode
  };
  std::vector<Pending> pending;
  pending.reserve(points.size());

  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& pt = points[idx];
    double f_latent = ctx.spec->target_mean;
    if (ctx.spec->target_sd > 0.0) {
      f_latent = std::exp(ctx.ln.m + ctx.ln.s * lerp_at(ctx.latent_g, ctx.span_s, pt.t));
    }
    const double inv_qpi = inv_qpi0 * (1.0 + ctx.spec->hp_relative_sd * qpi_rng.normal());

    TLSModel local = *ctx.tls;
    local.f_delta0 = f_latent;
    local.q_pi = 1.0 / inv_qpi;
    Environment env;
    env.omega_r = 2.0 * k_pi * ctx.res->f_r_hz;
    env.temperature_k = ctx.meas->temperature_k;
    env.mean_photons = ctx.photons[static_cast<std::size_t>(pt.power)];
    const double inv_qi = tls_inverse_q(local, env);
    const double qi_true = 1.0 / inv_qi;

    truth.timestamps_s.push_back(pt.t);
    truth.f_delta_tls.push_back(f_latent);
    truth.inv_q_pi.push_back(inv_qpi);
    truth.q_i_true.push_back(qi_true);
    truth.power_index.push_back(pt.power);

    Pending job;
    job.truth_index = idx;
    job.power = pt.power;
    if (fast) {
      const double rel = ctx.meas->fast_rel_sigma[static_cast<std::size_t>(pt.power)];
      job.q_fast = qi_true * (1.0 + rel * meas_rng.normal());
      job.sigma_fast = job.q_fast * rel;
    } else {
      ResonatorParams p_t = *ctx.res;
      p_t.f_r_hz = ctx.res->f_r_hz;
      if (!freq_g.empty()) {
        p_t.f_r_hz *= 1.0 + ctx.spec->freq_relative_sd * lerp_at(freq_g, ctx.span_s, pt.t);
      }
      p_t.loaded_q = loaded_q_from_internal(qi_true, p_t.coupling_q_mag, p_t.phi_rad);
      auto grid = default_sweep_grid(*ctx.res, ctx.meas->sweep_points,
                                     ctx.meas->span_linewidths);
      job.sweep = synth_sweep(p_t, std::move(grid), ctx.meas->noise_sd,
                              mix_seed(seed, kStreamSweepBase + idx));
      job.sweep.meta.timestamp_s = pt.t;
      job.sweep.meta.power_dbm = ctx.power_dbm[static_cast<std::size_t>(pt.power)];
      job.sweep.meta.temperature_k = ctx.meas->temperature_k;
    }
    pending.push_back(std::move(job));
  }

  std::vector<ResonatorFit> fits;
  if (!fast) {
    std::vector<FrequencySweep> sweeps;
    sweeps.reserve(pending.size());
    for (auto& job : pending) sweeps.push_back(std::move(job.sweep));
    fits = fit_resonance_batch(sweeps, threads);
  }

  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& job = pending[i];
    const auto pw = static_cast<std::size_t>(job.power);
    const double t = points[i].t;
    if (fast) {
      t_out[pw].push_back(t);
      q_out[pw].push_back(job.q_fast);
      s_out[pw].push_back(job.sigma_fast);
    } else {
      const ResonatorFit& fit = fits[i];
      if (fit.converged && fit.q_i > 0.0) {
        t_out[pw].push_back(t);
        q_out[pw].push_back(fit.q_i);
        s_out[pw].push_back(fit.sigma_q_i);
        fits_out[pw].push_back(fit);
      } else {
        ++n_failed;
      }
    }
  }
}

}  // namespace

InterleavedRun simulate_interleaved_run(const TLSModel& m, const ResonatorParams& p,
                                        const FluctuationSpec& spec,
                                        const InterleavedSchedule& sched,
                                        const MeasurementModel& meas, int threads) {
  m.validate();
  p.validate();
  spec.validate();
  sched.validate();
  meas.validate();

  const double cycle = sched.cycle_period_s();
  const auto n_cycles = static_cast<std::size_t>(sched.total_duration_s / cycle);

  SimContext ctx;
  ctx.tls = &m;
  ctx.res = &p;
  ctx.spec = &spec;
  ctx.meas = &meas;
  ctx.span_s = cycle * static_cast<double>(n_cycles);
  ctx.ln = moment_matched(spec.target_mean, spec.target_sd > 0.0 ? spec.target_sd : 1.0);
  if (spec.target_sd > 0.0) {
    const std::size_t n_g = n_cycles * kLatentOversample;
    ctx.latent_g = gen_one_over_f_gaussian(n_g, ctx.span_s / static_cast<double>(n_g),
                                           spec.spectral_exponent, 1.0,
                                           mix_seed(spec.seed, kStreamLatent));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    ctx.photons[i] = photon_number(sched.power_points_dbm[i], meas.attenuation_db, p);
    ctx.power_dbm[i] = sched.power_points_dbm[i];
  }

  const std::array<double, 3> offsets{
      sched.idle_tau1_s + sched.point_durations_s[0] / 2.0,
      sched.idle_tau1_s + sched.point_durations_s[0] + sched.point_durations_s[1] / 2.0,
      sched.idle_tau1_s + sched.point_durations_s[0] + sched.point_durations_s[1] +
          sched.idle_tau2_s + sched.point_durations_s[2] / 2.0};

  std::vector<PointSample> points;
  points.reserve(n_cycles * 3);
  for (std::size_t c = 0; c < n_cycles; ++c) {
    const double t0 = static_cast<double>(c) * cycle;
    for (int pw = 0; pw < 3; ++pw) {
      points.push_back({t0 + offsets[static_cast<std::size_t>(pw)], pw});
    }
  }

  Rng qpi_rng(spec.seed, kStreamQpi);
  Rng meas_rng(spec.seed, kStreamMeasure);

  InterleavedRun run;
  std::vector<std::vector<double>> t_out(3), q_out(3), s_out(3);
  std::vector<std::vector<ResonatorFit>> fits_out(3);
  run_points(ctx, points, qpi_rng, meas_rng, spec.seed, threads, run.truth, t_out, q_out,
             s_out, fits_out, run.n_failed_fits);

  QiTimeSeries* series[3] = {&run.lp, &run.mp, &run.hp};
  for (std::size_t i = 0; i < 3; ++i) {
    series[i]->timestamps_s = std::move(t_out[i]);
    series[i]->q_i = std::move(q_out[i]);
    series[i]->q_i_sigma = std::move(s_out[i]);
    series[i]->power_dbm = sched.power_points_dbm[i];
    series[i]->temperature_k = meas.temperature_k;
    series[i]->resonator_id = "synthetic";
  }
  run.mean_photons = ctx.photons;
  run.fits_lp = std::move(fits_out[0]);
  run.fits_mp = std::move(fits_out[1]);
  run.fits_hp = std::move(fits_out[2]);
  return run;
}

TimetraceRun simulate_timetrace(const TLSModel& m, const ResonatorParams& p,
                                const FluctuationSpec& spec, double power_dbm,
                                double period_s, double duration_s,
                                const MeasurementModel& meas, int power_index,
                                int threads) {
  m.validate();
  p.validate();
  spec.validate();
  meas.validate();
  if (!(period_s > 0.0) || !(duration_s >= period_s)) {
    throw ValidationError("timetrace: need duration >= period > 0");
  }
  if (power_index < 0 || power_index > 2) {
    throw ValidationError("timetrace: power_index must be 0, 1 or 2");
  }

  const auto n = static_cast<std::size_t>(duration_s / period_s);

  SimContext ctx;
  ctx.tls = &m;
  ctx.res = &p;
  ctx.spec = &spec;
  ctx.meas = &meas;
  ctx.span_s = period_s * static_cast<double>(n);
  ctx.ln = moment_matched(spec.target_mean, spec.target_sd > 0.0 ? spec.target_sd : 1.0);
  if (spec.target_sd > 0.0) {
    // The sampling grid already resolves the process; no oversampling needed.
    ctx.latent_g = gen_one_over_f_gaussian(std::max<std::size_t>(n, 2), period_s,
                                           spec.spectral_exponent, 1.0,
                                           mix_seed(spec.seed, kStreamLatent));
  }
  const auto pw = static_cast<std::size_t>(power_index);
  ctx.photons[pw] = photon_number(power_dbm, meas.attenuation_db, p);
  ctx.power_dbm[pw] = power_dbm;

  std::vector<PointSample> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    points.push_back({(static_cast<double>(i) + 0.5) * period_s, power_index});
  }

  Rng qpi_rng(spec.seed, kStreamQpi);
  Rng meas_rng(spec.seed, kStreamMeasure);

  TimetraceRun run;
  std::vector<std::vector<double>> t_out(3), q_out(3), s_out(3);
  std::vector<std::vector<ResonatorFit>> fits_out(3);
  run_points(ctx, points, qpi_rng, meas_rng, spec.seed, threads, run.truth, t_out, q_out,
             s_out, fits_out, run.n_failed_fits);

  run.series.timestamps_s = std::move(t_out[pw]);
  run.series.q_i = std::move(q_out[pw]);
  run.series.q_i_sigma = std::move(s_out[pw]);
  run.series.power_dbm = power_dbm;
  run.series.temperature_k = meas.temperature_k;
  run.series.resonator_id = "synthetic";
  run.mean_photons = ctx.photons[pw];
  run.fits = std::move(fits_out[pw]);
  return run;
}

}  // namespace tlsfluc
