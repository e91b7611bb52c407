#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/model.hpp"
#include "tlsfluc/series.hpp"
#include "tlsfluc/sweep.hpp"

namespace tlsfluc {

// Generative description of the fluctuating loss tangent: log-normal marginal
// with the given mean/sd, temporal correlation from a 1/f^alpha Gaussian
// process on the log scale.
struct FluctuationSpec {
  double target_mean = 9.0e-7;
  double target_sd = 2.2e-7;
  double spectral_exponent = 1.0;  // PSD ~ 1/f^alpha
  double hp_relative_sd = 0.005;   // fractional fluctuation of 1/q_pi
  double freq_relative_sd = 0.0;   // optional fractional f_r fluctuation
  std::uint64_t seed = 1;

  void validate() const;
};

// Cyclic LP/MP/HP acquisition: idle tau1, LP, MP, idle tau2, HP, repeat.
struct InterleavedSchedule {
  double idle_tau1_s = 3.0;   // amplifier settling before the LP/MP block
  double idle_tau2_s = 0.5;   // settling before HP
  std::array<double, 3> point_durations_s{38.0, 9.0, 10.0};
  double total_duration_s = 16.0 * 3600.0;
  std::array<double, 3> power_points_dbm{-75.0, -55.0, -15.0};

  double cycle_period_s() const;
  void validate() const;
};

enum class MeasurementMode { kFast, kFull };

// Instrument-side knobs for synthetic acquisition. Full mode synthesizes and
// fits an S21 sweep per point; fast mode perturbs Q_i directly at the scale
// of the corresponding fit uncertainty.
struct MeasurementModel {
  MeasurementMode mode = MeasurementMode::kFast;
  double temperature_k = 0.01;
  double attenuation_db = 90.0;
  int sweep_points = 201;
  double span_linewidths = 10.0;
  double noise_sd = 1.0e-3;  // per-quadrature S21 noise, full mode
  std::array<double, 3> fast_rel_sigma{0.01, 0.005, 0.002};  // LP/MP/HP

  void validate() const;
};

// Zero-mean Gaussian sequence with one-sided PSD ~ 1/f^alpha, synthesized by
// spectral shaping and standardized to the exact sample variance.
std::vector<double> gen_one_over_f_gaussian(std::size_t n, double dt_s, double alpha,
                                            double variance, std::uint64_t seed);

// Strictly positive sequence exp(m + s g_t) with moment-matched (m, s).
std::vector<double> gen_loss_tangent_process(const FluctuationSpec& spec,
                                             std::size_t n, double dt_s);

// Model evaluation on the grid plus complex Gaussian noise with the given
// per-quadrature standard deviation.
FrequencySweep synth_sweep(const ResonatorParams& p, std::vector<double> grid_hz,
                           double noise_sd, std::uint64_t seed);

// Frequency grid spanning span_linewidths * f_r / Q around f_r.
std::vector<double> default_sweep_grid(const ResonatorParams& p, int n_points,
                                       double span_linewidths);

// Ground truth retained for oracle comparisons.
struct TruthRecord {
  std::vector<double> timestamps_s;
  std::vector<double> f_delta_tls;  // latent loss tangent at each point
  std::vector<double> inv_q_pi;     // perturbed power-independent loss
  std::vector<double> q_i_true;
  std::vector<int> power_index;     // 0 = LP, 1 = MP, 2 = HP
};

struct InterleavedRun {
  QiTimeSeries lp, mp, hp;
  TruthRecord truth;
  std::array<double, 3> mean_photons{};
  std::size_t n_failed_fits = 0;
  // Per-point fits, full mode only (LP/MP/HP order matches the series).
  std::vector<ResonatorFit> fits_lp, fits_mp, fits_hp;
};

// Steps wall-clock time through repeated LP/MP/HP cycles against a shared
// latent loss-tangent trajectory. threads parallelizes full-mode fitting.
InterleavedRun simulate_interleaved_run(const TLSModel& m, const ResonatorParams& p,
                                        const FluctuationSpec& spec,
                                        const InterleavedSchedule& sched,
                                        const MeasurementModel& meas = {},
                                        int threads = 1);

struct TimetraceRun {
  QiTimeSeries series;
  TruthRecord truth;
  double mean_photons = 0.0;
  std::size_t n_failed_fits = 0;
  std::vector<ResonatorFit> fits;
};

// Single-power time trace sampled at a fixed period. power_index selects the
// LP/MP/HP noise entry of the measurement model that applies to this trace.
TimetraceRun simulate_timetrace(const TLSModel& m, const ResonatorParams& p,
                                const FluctuationSpec& spec, double power_dbm,
                                double period_s, double duration_s,
                                const MeasurementModel& meas = {}, int power_index = 0,
                                int threads = 1);

}  // namespace tlsfluc
