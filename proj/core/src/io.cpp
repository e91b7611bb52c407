#include "tlsfluc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tlsfluc/errors.hpp"

namespace tlsfluc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing sidecar: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed sidecar " + path.string() + ": " + e.what());
  }
  return j;
}

void add_provenance(json& j, const Provenance& prov) {
  j["tool_version"] = prov.tool_version;
  j["config_hash"] = prov.config_hash;
}

// Rows of doubles under an exact one-line header; '#' lines are comments.
struct CsvTable {
  std::vector<std::vector<double>> columns;
};

CsvTable read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open: " + path.string());

  const std::size_t n_cols = static_cast<std::size_t>(
      std::count(header.begin(), header.end(), ',')) + 1;
  CsvTable table;
  table.columns.resize(n_cols);

  std::string line;
  bool saw_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != header) {
        throw ValidationError("malformed header in " + path.string() + ": expected '" +
                              header + "'");
      }
      saw_header = true;
      continue;
    }
    ++row;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (col < n_cols) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw ValidationError("bad value at row " + std::to_string(row) + " in " +
                              path.string());
      }
      table.columns[col].push_back(v);
      ++col;
      p = next;
      if (col < n_cols) {
        if (p >= end || *p != ',') {
          throw ValidationError("length mismatch at row " + std::to_string(row) + " in " +
                                path.string());
        }
        ++p;
      }
    }
    if (p != end) {
      throw ValidationError("length mismatch at row " + std::to_string(row) + " in " +
                            path.string());
    }
  }
  if (!saw_header) throw ValidationError("malformed header in " + path.string() + ": empty file");
  return table;
}

json resonator_to_json(const ResonatorParams& p) {
  return json{{"amplitude_re", p.amplitude_a.real()},
              {"amplitude_im", p.amplitude_a.imag()},
              {"delay_tau_s", p.delay_tau_s},
              {"f_r_hz", p.f_r_hz},
              {"loaded_q", p.loaded_q},
              {"coupling_q_mag", p.coupling_q_mag},
              {"phi_rad", p.phi_rad}};
}

ResonatorParams resonator_from_json(const json& j, const ResonatorParams& d) {
  ResonatorParams p = d;
  p.amplitude_a = {j.value("amplitude_re", d.amplitude_a.real()),
                   j.value("amplitude_im", d.amplitude_a.imag())};
  p.delay_tau_s = j.value("delay_tau_s", d.delay_tau_s);
  p.f_r_hz = j.value("f_r_hz", d.f_r_hz);
  p.loaded_q = j.value("loaded_q", d.loaded_q);
  p.coupling_q_mag = j.value("coupling_q_mag", d.coupling_q_mag);
  p.phi_rad = j.value("phi_rad", d.phi_rad);
  return p;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.resonator.amplitude_a = {1.0, 0.0};
  cfg.resonator.delay_tau_s = 30.0e-9;
  cfg.resonator.f_r_hz = 6.0e9;
  cfg.resonator.loaded_q = 2.6e5;
  cfg.resonator.coupling_q_mag = 5.0e5;
  cfg.resonator.phi_rad = 0.0;

  cfg.tls.f_delta0 = 9.0e-7;
  cfg.tls.n_c = 1.0;
  cfg.tls.beta = 0.5;
  cfg.tls.q_pi = 1.0e6;

  cfg.fluctuation = FluctuationSpec{};
  cfg.schedule = InterleavedSchedule{};
  cfg.measurement = MeasurementModel{};

  cfg.analysis.segment_length = 0;
  cfg.analysis.overlap_fraction = 0.5;
  for (double h : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0}) {
    cfg.analysis.window_sizes_s.push_back(h * 3600.0);
  }
  cfg.analysis.k_values = {1, 2, 4, 8, 16, 32, 64, 91};
  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["resonator"] = resonator_to_json(cfg.resonator);
  j["tls"] = {{"f_delta0", cfg.tls.f_delta0},
              {"n_c", cfg.tls.n_c},
              {"beta", cfg.tls.beta},
              {"q_pi", cfg.tls.q_pi}};
  j["fluctuation"] = {{"target_mean", cfg.fluctuation.target_mean},
                      {"target_sd", cfg.fluctuation.target_sd},
                      {"spectral_exponent", cfg.fluctuation.spectral_exponent},
                      {"hp_relative_sd", cfg.fluctuation.hp_relative_sd},
                      {"freq_relative_sd", cfg.fluctuation.freq_relative_sd},
                      {"seed", cfg.fluctuation.seed}};
  j["schedule"] = {{"idle_tau1_s", cfg.schedule.idle_tau1_s},
                   {"idle_tau2_s", cfg.schedule.idle_tau2_s},
                   {"point_durations_s", cfg.schedule.point_durations_s},
                   {"total_duration_s", cfg.schedule.total_duration_s},
                   {"power_points_dbm", cfg.schedule.power_points_dbm}};
  j["measurement"] = {
      {"mode", cfg.measurement.mode == MeasurementMode::kFast ? "fast" : "full"},
      {"temperature_k", cfg.measurement.temperature_k},
      {"attenuation_db", cfg.measurement.attenuation_db},
      {"sweep_points", cfg.measurement.sweep_points},
      {"span_linewidths", cfg.measurement.span_linewidths},
      {"noise_sd", cfg.measurement.noise_sd},
      {"fast_rel_sigma", cfg.measurement.fast_rel_sigma}};
  j["analysis"] = {{"segment_length", cfg.analysis.segment_length},
                   {"overlap_fraction", cfg.analysis.overlap_fraction},
                   {"window_sizes_s", cfg.analysis.window_sizes_s},
                   {"k_values", cfg.analysis.k_values}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = run_config_json(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = read_json(path);
  const RunConfig d = default_run_config();
  RunConfig cfg = d;

  if (j.contains("resonator")) cfg.resonator = resonator_from_json(j["resonator"], d.resonator);
  if (j.contains("tls")) {
    const auto& t = j["tls"];
    cfg.tls.f_delta0 = t.value("f_delta0", d.tls.f_delta0);
    cfg.tls.n_c = t.value("n_c", d.tls.n_c);
    cfg.tls.beta = t.value("beta", d.tls.beta);
    cfg.tls.q_pi = t.value("q_pi", d.tls.q_pi);
  }
  if (j.contains("fluctuation")) {
    const auto& f = j["fluctuation"];
    cfg.fluctuation.target_mean = f.value("target_mean", d.fluctuation.target_mean);
    cfg.fluctuation.target_sd = f.value("target_sd", d.fluctuation.target_sd);
    cfg.fluctuation.spectral_exponent =
        f.value("spectral_exponent", d.fluctuation.spectral_exponent);
    cfg.fluctuation.hp_relative_sd = f.value("hp_relative_sd", d.fluctuation.hp_relative_sd);
    cfg.fluctuation.freq_relative_sd =
        f.value("freq_relative_sd", d.fluctuation.freq_relative_sd);
    cfg.fluctuation.seed = f.value("seed", d.fluctuation.seed);
  }
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    cfg.schedule.idle_tau1_s = s.value("idle_tau1_s", d.schedule.idle_tau1_s);
    cfg.schedule.idle_tau2_s = s.value("idle_tau2_s", d.schedule.idle_tau2_s);
    cfg.schedule.point_durations_s =
        s.value("point_durations_s", d.schedule.point_durations_s);
    cfg.schedule.total_duration_s = s.value("total_duration_s", d.schedule.total_duration_s);
    cfg.schedule.power_points_dbm = s.value("power_points_dbm", d.schedule.power_points_dbm);
  }
  if (j.contains("measurement")) {
    const auto& m = j["measurement"];
    const std::string mode = m.value("mode", std::string("fast"));
    if (mode != "fast" && mode != "full") {
      throw ValidationError("config: measurement.mode must be 'fast' or 'full'");
    }
    cfg.measurement.mode = mode == "fast" ? MeasurementMode::kFast : MeasurementMode::kFull;
    cfg.measurement.temperature_k = m.value("temperature_k", d.measurement.temperature_k);
    cfg.measurement.attenuation_db = m.value("attenuation_db", d.measurement.attenuation_db);
    cfg.measurement.sweep_points = m.value("sweep_points", d.measurement.sweep_points);
    cfg.measurement.span_linewidths =
        m.value("span_linewidths", d.measurement.span_linewidths);
    cfg.measurement.noise_sd = m.value("noise_sd", d.measurement.noise_sd);
    cfg.measurement.fast_rel_sigma = m.value("fast_rel_sigma", d.measurement.fast_rel_sigma);
  }
  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    cfg.analysis.segment_length = a.value("segment_length", d.analysis.segment_length);
    cfg.analysis.overlap_fraction = a.value("overlap_fraction", d.analysis.overlap_fraction);
    cfg.analysis.window_sizes_s = a.value("window_sizes_s", d.analysis.window_sizes_s);
    cfg.analysis.k_values = a.value("k_values", d.analysis.k_values);
  }
  cfg.seed = j.value("seed", d.seed);
  cfg.output_dir = j.value("output_dir", d.output_dir);
  return cfg;
}

void save_run_config(const std::filesystem::path& path, const RunConfig& cfg) {
  write_text(path, run_config_json(cfg) + "\n");
}

void write_sweep(const std::filesystem::path& path, const FrequencySweep& sweep,
                 const Provenance& prov) {
  sweep.validate();
  std::ostringstream body;
  body << "freq_hz,s21_re,s21_im\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    body << fmt(sweep.frequencies_hz[i]) << ',' << fmt(sweep.s21[i].real()) << ','
         << fmt(sweep.s21[i].imag()) << '\n';
  }
  write_text(path, body.str());

  json meta{{"power_dbm", sweep.meta.power_dbm},
            {"temperature_k", sweep.meta.temperature_k},
            {"timestamp_s", sweep.meta.timestamp_s},
            {"resonator_id", sweep.meta.resonator_id}};
  add_provenance(meta, prov);
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

FrequencySweep read_sweep(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "freq_hz,s21_re,s21_im");
  FrequencySweep sweep;
  sweep.frequencies_hz = table.columns[0];
  sweep.s21.resize(table.columns[1].size());
  for (std::size_t i = 0; i < sweep.s21.size(); ++i) {
    sweep.s21[i] = {table.columns[1][i], table.columns[2][i]};
  }

  const json meta = read_json(sidecar_path(path));
  sweep.meta.power_dbm = meta.value("power_dbm", 0.0);
  sweep.meta.temperature_k = meta.value("temperature_k", 0.0);
  sweep.meta.timestamp_s = meta.value("timestamp_s", 0.0);
  sweep.meta.resonator_id = meta.value("resonator_id", std::string());
  sweep.validate();
  return sweep;
}

void write_qi_series(const std::filesystem::path& path, const QiTimeSeries& series,
                     const Provenance& prov) {
  series.validate();
  std::ostringstream body;
  body << "timestamp_s,q_i,q_i_sigma\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    body << fmt(series.timestamps_s[i]) << ',' << fmt(series.q_i[i]) << ','
         << fmt(series.q_i_sigma[i]) << '\n';
  }
  write_text(path, body.str());

  json meta{{"power_dbm", series.power_dbm},
            {"temperature_k", series.temperature_k},
            {"resonator_id", series.resonator_id}};
  add_provenance(meta, prov);
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

QiTimeSeries read_qi_series(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "timestamp_s,q_i,q_i_sigma");
  QiTimeSeries series;
  series.timestamps_s = table.columns[0];
  series.q_i = table.columns[1];
  series.q_i_sigma = table.columns[2];

  const json meta = read_json(sidecar_path(path));
  series.power_dbm = meta.value("power_dbm", 0.0);
  series.temperature_k = meta.value("temperature_k", 0.0);
  series.resonator_id = meta.value("resonator_id", std::string());
  series.validate();
  return series;
}

void write_loss_series(const std::filesystem::path& path,
                       const std::vector<double>& timestamps_s,
                       const std::vector<double>& values, const Provenance& prov) {
  if (timestamps_s.size() != values.size()) {
    throw ValidationError("loss series: array lengths differ");
  }
  std::ostringstream body;
  body << "timestamp_s,f_delta_tls\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    body << fmt(timestamps_s[i]) << ',' << fmt(values[i]) << '\n';
  }
  write_text(path, body.str());

  json meta = json::object();
  add_provenance(meta, prov);
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

RawSeries read_loss_series(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "timestamp_s,f_delta_tls");
  RawSeries series;
  series.timestamps_s = table.columns[0];
  series.values = table.columns[1];
  for (std::size_t i = 1; i < series.timestamps_s.size(); ++i) {
    if (!(series.timestamps_s[i] > series.timestamps_s[i - 1])) {
      throw ValidationError("loss series: non-increasing timestamp at row " +
                            std::to_string(i));
    }
  }
  return series;
}

void write_spectrum(const std::filesystem::path& path, const SpectrumEstimate& spec,
                    const Provenance& prov) {
  std::ostringstream body;
  body << "freq_hz,value\n";
  for (std::size_t i = 0; i < spec.freqs_hz.size(); ++i) {
    body << fmt(spec.freqs_hz[i]) << ',' << fmt(spec.values[i]) << '\n';
  }
  write_text(path, body.str());

  json meta{{"window", spec.window_name},
            {"segment_length", spec.segment_length},
            {"n_segments", spec.n_segments},
            {"overlap_fraction", spec.overlap_fraction}};
  add_provenance(meta, prov);
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

SpectrumEstimate read_spectrum(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "freq_hz,value");
  SpectrumEstimate spec;
  spec.freqs_hz = table.columns[0];
  spec.values = table.columns[1];
  const json meta = read_json(sidecar_path(path));
  spec.window_name = meta.value("window", std::string());
  spec.segment_length = meta.value("segment_length", std::size_t{0});
  spec.n_segments = meta.value("n_segments", std::size_t{0});
  spec.overlap_fraction = meta.value("overlap_fraction", 0.0);
  return spec;
}

void write_power_sweep(const std::filesystem::path& path, const PowerSweepData& data,
                       const Provenance& prov) {
  data.validate();
  std::ostringstream body;
  body << "mean_photons,q_i,q_i_sigma\n";
  for (std::size_t i = 0; i < data.q_i.size(); ++i) {
    body << fmt(data.mean_photons[i]) << ',' << fmt(data.q_i[i]) << ','
         << fmt(data.q_i_sigma[i]) << '\n';
  }
  write_text(path, body.str());

  json meta{{"temperature_k", data.temperature_k}, {"f_r_hz", data.f_r_hz}};
  add_provenance(meta, prov);
  write_text(sidecar_path(path), meta.dump(2) + "\n");
}

PowerSweepData read_power_sweep(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path, "mean_photons,q_i,q_i_sigma");
  PowerSweepData data;
  data.mean_photons = table.columns[0];
  data.q_i = table.columns[1];
  data.q_i_sigma = table.columns[2];
  const json meta = read_json(sidecar_path(path));
  data.temperature_k = meta.value("temperature_k", 0.0);
  data.f_r_hz = meta.value("f_r_hz", 0.0);
  data.validate();
  return data;
}

}  // namespace tlsfluc
