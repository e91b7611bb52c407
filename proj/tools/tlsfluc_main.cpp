// Command-line driver: simulation, fitting, and analysis workflows built on
// the core library. Exit codes: 0 success, 1 validation/input error, 2 fit
// non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tlsfluc/circlefit.hpp"
#include "tlsfluc/constants.hpp"
#include "tlsfluc/errors.hpp"
#include "tlsfluc/io.hpp"
#include "tlsfluc/model.hpp"
#include "tlsfluc/spectral.hpp"
#include "tlsfluc/stats.hpp"
#include "tlsfluc/synth.hpp"
#include "tlsfluc/tls.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlsfluc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFit = 2;

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "Run configuration JSON");
  if (needs_config) cfg->required();
  cmd->add_option("--output-dir", opts.output_dir, "Output directory override");
  cmd->add_option("--seed", opts.seed, "Seed override");
  cmd->add_option("--threads", opts.threads, "Worker threads for batch fits")
      ->check(CLI::Range(1, 256));
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg = opts.config_path.empty() ? default_run_config()
                                           : load_run_config(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
  }
  cfg.fluctuation.seed = cfg.seed;
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  return cfg;
}

Provenance provenance_for(const RunConfig& cfg) {
  Provenance prov;
  prov.config_hash = config_hash(cfg);
  return prov;
}

fs::path ensure_output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  // Materialized defaults make every run self-describing.
  save_run_config(dir / "config_used.json", cfg);
  return dir;
}

void write_json_report(const fs::path& path, json j, const Provenance& prov) {
  j["tool_version"] = prov.tool_version;
  j["config_hash"] = prov.config_hash;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

// Series files are either Q_i series or loss-tangent series; dispatch on the
// header so analyze commands accept both.
struct AnySeries {
  std::vector<double> timestamps_s;
  std::vector<double> values;
};

AnySeries read_any_series(const fs::path& path) {
  std::ifstream probe(path);
  if (!probe) throw ValidationError("cannot open: " + path.string());
  std::string header;
  while (std::getline(probe, header)) {
    if (!header.empty() && header.front() != '#') break;
  }
  probe.close();

  AnySeries out;
  if (header.rfind("timestamp_s,q_i", 0) == 0) {
    const auto series = read_qi_series(path);
    out.timestamps_s = series.timestamps_s;
    out.values = series.q_i;
  } else {
    const auto series = read_loss_series(path);
    out.timestamps_s = series.timestamps_s;
    out.values = series.values;
  }
  return out;
}

std::vector<double> normalized(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / mean;
  return out;
}

json resonator_fit_json(const ResonatorFit& fit) {
  return json{{"converged", fit.converged},
              {"amplitude_re", fit.params.amplitude_a.real()},
              {"amplitude_im", fit.params.amplitude_a.imag()},
              {"delay_tau_s", fit.params.delay_tau_s},
              {"f_r_hz", fit.params.f_r_hz},
              {"loaded_q", fit.params.loaded_q},
              {"coupling_q_mag", fit.params.coupling_q_mag},
              {"phi_rad", fit.params.phi_rad},
              {"q_i", fit.q_i},
              {"sigma68",
               {{"f_r_hz", fit.sigma_f_r},
                {"loaded_q", fit.sigma_q},
                {"coupling_q_mag", fit.sigma_qc_mag},
                {"phi_rad", fit.sigma_phi},
                {"q_i", fit.sigma_q_i}}},
              {"residual_rms", fit.residual_rms}};
}

json lognormal_json(const LogNormalFit& fit, std::size_t n_excluded) {
  return json{{"mu_log", fit.mu_log}, {"sigma_log", fit.sigma_log},
              {"mean", fit.mean},     {"sd", fit.sd},
              {"n", fit.n},           {"n_excluded", n_excluded},
              {"band1", fit.band1},   {"band2", fit.band2}};
}

// --- command implementations -----------------------------------------------

int cmd_simulate_sweep(const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto dir = ensure_output_dir(cfg);
  const auto prov = provenance_for(cfg);

  auto grid = default_sweep_grid(cfg.resonator, cfg.measurement.sweep_points,
                                 cfg.measurement.span_linewidths);
  auto sweep = synth_sweep(cfg.resonator, std::move(grid), cfg.measurement.noise_sd,
                           cfg.seed);
  sweep.meta.power_dbm = cfg.schedule.power_points_dbm[0];
  sweep.meta.temperature_k = cfg.measurement.temperature_k;
  write_sweep(dir / "sweep.csv", sweep, prov);
  std::cout << (dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_simulate_timetrace(const CommonOpts& opts, double power_dbm, double period_s,
                           double duration_s) {
  RunConfig cfg = resolve_config(opts);
  const auto dir = ensure_output_dir(cfg);
  const auto prov = provenance_for(cfg);

  const double power = std::isfinite(power_dbm) ? power_dbm
                                                : cfg.schedule.power_points_dbm[0];
  const double period = period_s > 0.0 ? period_s : cfg.schedule.point_durations_s[0];
  const double duration =
      duration_s > 0.0 ? duration_s : cfg.schedule.total_duration_s;

  // Pick the LP/MP/HP noise entry nearest to the requested power.
  int power_index = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(power - cfg.schedule.power_points_dbm[static_cast<std::size_t>(i)]) <
        std::abs(power -
                 cfg.schedule.power_points_dbm[static_cast<std::size_t>(power_index)])) {
      power_index = i;
    }
  }

  const auto run =
      simulate_timetrace(cfg.tls, cfg.resonator, cfg.fluctuation, power, period,
                         duration, cfg.measurement, power_index, opts.threads);
  write_qi_series(dir / "timetrace.csv", run.series, prov);
  write_loss_series(dir / "timetrace_truth.csv", run.truth.timestamps_s,
                    run.truth.f_delta_tls, prov);
  std::cout << (dir / "timetrace.csv").string() << "\n";
  return kExitOk;
}

int cmd_simulate_interleaved(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  const auto dir = ensure_output_dir(cfg);
  const auto prov = provenance_for(cfg);

  const auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                            cfg.schedule, cfg.measurement, opts.threads);
  write_qi_series(dir / "qi_lp.csv", run.lp, prov);
  write_qi_series(dir / "qi_mp.csv", run.mp, prov);
  write_qi_series(dir / "qi_hp.csv", run.hp, prov);
  write_loss_series(dir / "truth.csv", run.truth.timestamps_s, run.truth.f_delta_tls,
                    prov);
  json summary{{"n_cycles", run.lp.size()},
               {"mean_photons", run.mean_photons},
               {"n_failed_fits", run.n_failed_fits}};
  write_json_report(dir / "interleaved_summary.json", summary, prov);
  std::cout << (dir / "qi_lp.csv").string() << "\n";
  return kExitOk;
}

int cmd_fit_sweep(const CommonOpts& opts, const std::string& input,
                  const std::string& output) {
  const RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  const auto sweep = read_sweep(input);

  ResonatorFit fit;
  try {
    fit = fit_resonance(sweep);
  } catch (const NonPhysicalError& e) {
    std::cerr << "fit sweep: " << e.what() << "\n";
    return kExitFit;
  }
  const fs::path out = output.empty() ? fs::path(input).replace_extension(".fit.json")
                                      : fs::path(output);
  write_json_report(out, resonator_fit_json(fit), prov);
  if (!fit.converged) {
    std::cerr << "fit sweep: did not converge (report written to " << out.string()
              << ")\n";
    return kExitFit;
  }
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_fit_power_curve(const CommonOpts& opts, const std::string& input,
                        const std::string& output) {
  const RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  const auto data = read_power_sweep(input);
  const auto fit = fit_power_dependence(data);

  json j{{"converged", fit.converged},
         {"f_delta0", fit.model.f_delta0},
         {"n_c", fit.model.n_c},
         {"beta", fit.model.beta},
         {"q_pi", fit.model.q_pi},
         {"sigma68",
          {{"f_delta0", fit.sigma_f_delta0},
           {"n_c", fit.sigma_n_c},
           {"beta", fit.sigma_beta},
           {"q_pi", fit.sigma_q_pi}}},
         {"rss", fit.rss}};
  const fs::path out = output.empty() ? fs::path(input).replace_extension(".fit.json")
                                      : fs::path(output);
  write_json_report(out, j, prov);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_spectrum(const CommonOpts& opts, const std::string& input,
                         const std::string& output, std::size_t segment_length,
                         double overlap, bool no_normalize) {
  RunConfig cfg = resolve_config(opts);
  if (segment_length > 0) cfg.analysis.segment_length = segment_length;
  if (overlap >= 0.0) cfg.analysis.overlap_fraction = overlap;
  const auto prov = provenance_for(cfg);

  const auto series = read_any_series(input);
  const auto values = no_normalize ? series.values : normalized(series.values);
  const auto uniform = resample_uniform(series.timestamps_s, values);
  const std::size_t seg = cfg.analysis.segment_length > 0
                              ? cfg.analysis.segment_length
                              : default_segment_length(uniform.values.size());
  const auto psd =
      welch_psd(uniform.values, uniform.dt_s, seg, cfg.analysis.overlap_fraction);

  const fs::path out = output.empty() ? fs::path(input).replace_extension(".psd.csv")
                                      : fs::path(output);
  write_spectrum(out, psd, prov);
  // Record the resampling decision next to the estimator settings.
  {
    const auto side = out.string() + ".meta.json";
    std::ifstream in_meta(side);
    json meta;
    in_meta >> meta;
    in_meta.close();
    meta["normalized"] = !no_normalize;
    meta["resample_dt_s"] = uniform.dt_s;
    meta["resample_method"] = "linear-median-interval";
    std::ofstream out_meta(side);
    out_meta << meta.dump(2) << "\n";
  }
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_coherence(const CommonOpts& opts, const std::string& input_a,
                          const std::string& input_b, const std::string& output,
                          std::size_t segment_length, double overlap) {
  RunConfig cfg = resolve_config(opts);
  if (segment_length > 0) cfg.analysis.segment_length = segment_length;
  if (overlap >= 0.0) cfg.analysis.overlap_fraction = overlap;
  const auto prov = provenance_for(cfg);

  const auto sa = read_any_series(input_a);
  const auto sb = read_any_series(input_b);
  const auto ua = resample_uniform(sa.timestamps_s, normalized(sa.values));
  const auto ub = resample_uniform(sb.timestamps_s, normalized(sb.values));
  if (std::abs(ua.dt_s - ub.dt_s) > 0.05 * ua.dt_s) {
    throw ValidationError("coherence: inputs have incompatible sampling intervals");
  }
  const std::size_t n = std::min(ua.values.size(), ub.values.size());
  std::vector<double> a(ua.values.begin(), ua.values.begin() + static_cast<long>(n));
  std::vector<double> b(ub.values.begin(), ub.values.begin() + static_cast<long>(n));
  const std::size_t seg = cfg.analysis.segment_length > 0
                              ? cfg.analysis.segment_length
                              : default_segment_length(n);
  const auto coh = coherence(a, b, ua.dt_s, seg, cfg.analysis.overlap_fraction);

  const fs::path out = output.empty() ? fs::path("coherence.csv") : fs::path(output);
  write_spectrum(out, coh, prov);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_distribution(const CommonOpts& opts, const std::string& input,
                             const std::string& output) {
  const RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  const auto raw = read_loss_series(input);

  std::vector<double> positive;
  positive.reserve(raw.values.size());
  for (double v : raw.values) {
    if (v > 0.0) positive.push_back(v);
  }
  const std::size_t excluded = raw.values.size() - positive.size();
  const auto fit = fit_lognormal(positive);

  const fs::path out = output.empty() ? fs::path(input).replace_extension(".dist.json")
                                      : fs::path(output);
  write_json_report(out, lognormal_json(fit, excluded), prov);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_convergence(const CommonOpts& opts, const std::string& input,
                            const std::string& output, double reference_span,
                            std::vector<double> windows) {
  RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  const auto raw = read_loss_series(input);

  LossTangentSeries series;
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    if (raw.values[i] > 0.0) {
      series.timestamps_s.push_back(raw.timestamps_s[i]);
      series.f_delta_tls.push_back(raw.values[i]);
    }
  }
  const double span = reference_span > 0.0 ? reference_span : series.span_s();
  if (windows.empty()) {
    for (double w : cfg.analysis.window_sizes_s) {
      if (w <= span) windows.push_back(w);
    }
  }
  const auto curve = windowed_convergence(series, windows, span);

  const fs::path out = output.empty()
                           ? fs::path(input).replace_extension(".convergence.csv")
                           : fs::path(output);
  std::ofstream os(out);
  if (!os) throw ValidationError("cannot open for writing: " + out.string());
  os << "window_s,delta_mu,delta_sigma,delta_mu_signed,delta_sigma_signed\n";
  char buf[200];
  for (std::size_t i = 0; i < curve.window_sizes_s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  curve.window_sizes_s[i], curve.delta_mu[i], curve.delta_sigma[i],
                  curve.delta_mu_signed[i], curve.delta_sigma_signed[i]);
    os << buf;
  }
  os.close();
  json meta{{"reference_span_s", span}, {"stride", "half-window"}};
  meta["tool_version"] = prov.tool_version;
  meta["config_hash"] = prov.config_hash;
  std::ofstream ms(out.string() + ".meta.json");
  ms << meta.dump(2) << "\n";
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_averaging(const CommonOpts& opts, const std::string& input_dir,
                          double q_hp, std::vector<std::size_t> k_values,
                          const std::string& output) {
  RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  if (k_values.empty()) k_values = cfg.analysis.k_values;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw ValidationError("no sweep files in " + input_dir);
  std::vector<FrequencySweep> sweeps;
  sweeps.reserve(files.size());
  for (const auto& f : files) sweeps.push_back(read_sweep(f));
  std::sort(sweeps.begin(), sweeps.end(),
            [](const FrequencySweep& a, const FrequencySweep& b) {
              return a.meta.timestamp_s < b.meta.timestamp_s;
            });

  const auto scan = averaging_time_scan(sweeps, q_hp, k_values, opts.threads);

  const fs::path out = output.empty() ? fs::path("averaging.csv") : fs::path(output);
  std::ofstream os(out);
  if (!os) throw ValidationError("cannot open for writing: " + out.string());
  os << "delta_t_s,z_score\n";
  char buf[100];
  for (std::size_t i = 0; i < scan.delta_t_s.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", scan.delta_t_s[i],
                  scan.z_scores[i]);
    os << buf;
  }
  os.close();
  json meta{{"q_hp", q_hp}, {"n_excluded", scan.n_excluded}};
  meta["tool_version"] = prov.tool_version;
  meta["config_hash"] = prov.config_hash;
  std::ofstream ms(out.string() + ".meta.json");
  ms << meta.dump(2) << "\n";
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_analyze_sigma_q(const CommonOpts& opts, const std::vector<std::string>& inputs,
                        const std::string& output) {
  const RunConfig cfg = resolve_config(opts);
  const auto prov = provenance_for(cfg);
  if (inputs.empty()) throw ValidationError("sigma-q: at least one series required");

  std::vector<std::pair<double, double>> points;
  json detail = json::array();
  for (const auto& path : inputs) {
    const auto series = read_any_series(path);
    if (series.values.size() < 2) {
      throw ValidationError("sigma-q: series too short: " + path);
    }
    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= static_cast<double>(series.values.size());
    double var = 0.0;
    for (double v : series.values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(series.values.size() - 1));
    points.emplace_back(mean, sd);
    detail.push_back({{"file", path}, {"q_i_mean", mean}, {"q_i_sd", sd}});
  }
  const double slope = fit_sigma_vs_q(points);

  json j{{"slope", slope}, {"points", detail}};
  const fs::path out = output.empty() ? fs::path("sigma_q.json") : fs::path(output);
  write_json_report(out, j, prov);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int cmd_report(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);
  const auto dir = ensure_output_dir(cfg);
  const auto prov = provenance_for(cfg);

  const auto run = simulate_interleaved_run(cfg.tls, cfg.resonator, cfg.fluctuation,
                                            cfg.schedule, cfg.measurement, opts.threads);
  write_qi_series(dir / "qi_lp.csv", run.lp, prov);
  write_qi_series(dir / "qi_mp.csv", run.mp, prov);
  write_qi_series(dir / "qi_hp.csv", run.hp, prov);
  write_loss_series(dir / "truth.csv", run.truth.timestamps_s, run.truth.f_delta_tls,
                    prov);

  // Two-point loss-tangent estimator and its distribution.
  const auto est = interleaved_series(run.lp, run.hp);
  write_loss_series(dir / "fdtls.csv", est.timestamps_s, est.f_delta_tls, prov);
  const auto positive = est.positive_series();
  const auto dist = fit_lognormal(positive.f_delta_tls);

  // Spectra and pairwise coherences of the normalized series.
  auto to_uniform = [](const QiTimeSeries& s) {
    std::vector<double> norm(s.q_i);
    double mean = 0.0;
    for (double v : norm) mean += v;
    mean /= static_cast<double>(norm.size());
    for (double& v : norm) v = (v - mean) / mean;
    return resample_uniform(s.timestamps_s, norm);
  };
  const auto u_lp = to_uniform(run.lp);
  const auto u_mp = to_uniform(run.mp);
  const auto u_hp = to_uniform(run.hp);
  const std::size_t seg = cfg.analysis.segment_length > 0
                              ? cfg.analysis.segment_length
                              : default_segment_length(u_lp.values.size());
  const double ov = cfg.analysis.overlap_fraction;
  write_spectrum(dir / "psd_lp.csv", welch_psd(u_lp.values, u_lp.dt_s, seg, ov), prov);
  write_spectrum(dir / "psd_mp.csv", welch_psd(u_mp.values, u_mp.dt_s, seg, ov), prov);
  write_spectrum(dir / "psd_hp.csv", welch_psd(u_hp.values, u_hp.dt_s, seg, ov), prov);
  const auto coh_lm = coherence(u_lp.values, u_mp.values, u_lp.dt_s, seg, ov);
  const auto coh_lh = coherence(u_lp.values, u_hp.values, u_lp.dt_s, seg, ov);
  const auto coh_mh = coherence(u_mp.values, u_hp.values, u_mp.dt_s, seg, ov);
  write_spectrum(dir / "coherence_lp_mp.csv", coh_lm, prov);
  write_spectrum(dir / "coherence_lp_hp.csv", coh_lh, prov);
  write_spectrum(dir / "coherence_mp_hp.csv", coh_mh, prov);

  // Distribution-parameter convergence against the full span.
  std::vector<double> windows;
  for (double w : cfg.analysis.window_sizes_s) {
    if (w <= positive.span_s()) windows.push_back(w);
  }
  json convergence = json::array();
  if (!windows.empty()) {
    const auto curve = windowed_convergence(positive, windows, positive.span_s());
    for (std::size_t i = 0; i < curve.window_sizes_s.size(); ++i) {
      convergence.push_back({{"window_s", curve.window_sizes_s[i]},
                             {"delta_mu", curve.delta_mu[i]},
                             {"delta_sigma", curve.delta_sigma[i]}});
    }
  }

  auto mean_low_decade = [](const SpectrumEstimate& coh) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < coh.freqs_hz.size(); ++i) {
      if (coh.freqs_hz[i] <= coh.freqs_hz.front() * 10.0) {
        acc += coh.values[i];
        ++n;
      }
    }
    return n > 0 ? acc / static_cast<double>(n) : 0.0;
  };

  json summary;
  summary["distribution"] = lognormal_json(dist, est.flagged.size());
  summary["coherence_low_decade"] = {{"lp_mp", mean_low_decade(coh_lm)},
                                     {"lp_hp", mean_low_decade(coh_lh)},
                                     {"mp_hp", mean_low_decade(coh_mh)}};
  summary["mean_photons"] = run.mean_photons;
  summary["n_cycles"] = run.lp.size();
  summary["n_failed_fits"] = run.n_failed_fits;
  summary["convergence"] = convergence;
  write_json_report(dir / "summary.json", summary, prov);
  std::cout << (dir / "summary.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superconducting-resonator loss-tangent fluctuation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(k_tool_version));

  CommonOpts opts;

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic data");
  simulate->require_subcommand(1);
  auto* sim_sweep = simulate->add_subcommand("sweep", "One synthetic S21 sweep");
  add_common(sim_sweep, opts, true);

  double power_dbm = std::numeric_limits<double>::quiet_NaN();
  double period_s = 0.0;
  double duration_s = 0.0;
  auto* sim_trace = simulate->add_subcommand("timetrace", "Single-power Q_i time trace");
  add_common(sim_trace, opts, true);
  sim_trace->add_option("--power-dbm", power_dbm, "Source power (default: LP point)");
  sim_trace->add_option("--period", period_s, "Sampling period in seconds");
  sim_trace->add_option("--duration", duration_s, "Total duration in seconds");

  auto* sim_inter = simulate->add_subcommand("interleaved", "Interleaved LP/MP/HP run");
  add_common(sim_inter, opts, true);

  auto* fit = app.add_subcommand("fit", "Fit measured or synthetic data");
  fit->require_subcommand(1);
  std::string input, input_b, output;
  auto* fit_sweep_cmd = fit->add_subcommand("sweep", "Resonance fit of one sweep");
  add_common(fit_sweep_cmd, opts, false);
  fit_sweep_cmd->add_option("--input", input, "Sweep CSV")->required();
  fit_sweep_cmd->add_option("--output", output, "Report JSON path");

  auto* fit_power_cmd =
      fit->add_subcommand("power-curve", "TLS saturation fit of Q_i(<n>)");
  add_common(fit_power_cmd, opts, false);
  fit_power_cmd->add_option("--input", input, "Power sweep CSV")->required();
  fit_power_cmd->add_option("--output", output, "Report JSON path");

  auto* analyze = app.add_subcommand("analyze", "Spectral and statistical analysis");
  analyze->require_subcommand(1);

  std::size_t segment_length = 0;
  double overlap = -1.0;
  bool no_normalize = false;
  auto* an_spec = analyze->add_subcommand("spectrum", "Welch PSD of a series");
  add_common(an_spec, opts, false);
  an_spec->add_option("--input", input, "Series CSV")->required();
  an_spec->add_option("--output", output, "Spectrum CSV path");
  an_spec->add_option("--segment-length", segment_length, "Welch segment length");
  an_spec->add_option("--overlap", overlap, "Overlap fraction [0, 0.9]");
  an_spec->add_flag("--no-normalize", no_normalize,
                    "Skip the (x - mean)/mean normalization");

  auto* an_coh = analyze->add_subcommand("coherence", "Magnitude-squared coherence");
  add_common(an_coh, opts, false);
  an_coh->add_option("--input-a", input, "First series CSV")->required();
  an_coh->add_option("--input-b", input_b, "Second series CSV")->required();
  an_coh->add_option("--output", output, "Coherence CSV path");
  an_coh->add_option("--segment-length", segment_length, "Welch segment length");
  an_coh->add_option("--overlap", overlap, "Overlap fraction [0, 0.9]");

  auto* an_dist =
      analyze->add_subcommand("distribution", "Log-normal fit of a loss series");
  add_common(an_dist, opts, false);
  an_dist->add_option("--input", input, "Loss-tangent series CSV")->required();
  an_dist->add_option("--output", output, "Report JSON path");

  double reference_span = 0.0;
  std::vector<double> windows;
  auto* an_conv = analyze->add_subcommand(
      "convergence", "Distribution parameters vs measurement window");
  add_common(an_conv, opts, false);
  an_conv->add_option("--input", input, "Loss-tangent series CSV")->required();
  an_conv->add_option("--output", output, "Curve CSV path");
  an_conv->add_option("--reference-span", reference_span, "Reference span in seconds");
  an_conv->add_option("--windows", windows, "Window sizes in seconds");

  double q_hp = 0.0;
  std::vector<std::size_t> k_values;
  std::string input_dir;
  auto* an_avg =
      analyze->add_subcommand("averaging", "Skewness vs raw-trace averaging time");
  add_common(an_avg, opts, false);
  an_avg->add_option("--input-dir", input_dir, "Directory of sweep CSVs")->required();
  an_avg->add_option("--q-hp", q_hp, "High-power Q_i reference")->required();
  an_avg->add_option("--k", k_values, "Averaging factors");
  an_avg->add_option("--output", output, "Curve CSV path");

  std::vector<std::string> inputs;
  auto* an_sq = analyze->add_subcommand("sigma-q", "sigma_Qi vs Q_i linear model");
  add_common(an_sq, opts, false);
  an_sq->add_option("--inputs", inputs, "Q_i series CSVs")->required();
  an_sq->add_option("--output", output, "Report JSON path");

  auto* report = app.add_subcommand("report", "Full simulate-and-analyze workflow");
  add_common(report, opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_sweep->parsed()) return cmd_simulate_sweep(opts);
    if (sim_trace->parsed()) {
      return cmd_simulate_timetrace(opts, power_dbm, period_s, duration_s);
    }
    if (sim_inter->parsed()) return cmd_simulate_interleaved(opts);
    if (fit_sweep_cmd->parsed()) return cmd_fit_sweep(opts, input, output);
    if (fit_power_cmd->parsed()) return cmd_fit_power_curve(opts, input, output);
    if (an_spec->parsed()) {
      return cmd_analyze_spectrum(opts, input, output, segment_length, overlap,
                                  no_normalize);
    }
    if (an_coh->parsed()) {
      return cmd_analyze_coherence(opts, input, input_b, output, segment_length,
                                   overlap);
    }
    if (an_dist->parsed()) return cmd_analyze_distribution(opts, input, output);
    if (an_conv->parsed()) {
      return cmd_analyze_convergence(opts, input, output, reference_span, windows);
    }
    if (an_avg->parsed()) {
      return cmd_analyze_averaging(opts, input_dir, q_hp, k_values, output);
    }
    if (an_sq->parsed()) return cmd_analyze_sigma_q(opts, inputs, output);
    if (report->parsed()) return cmd_report(opts);
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFit;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NonPhysicalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
