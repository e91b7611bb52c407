#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tlsfluc/constants.hpp"
#include "tlsfluc/series.hpp"
#include "tlsfluc/spectral.hpp"
#include "tlsfluc/sweep.hpp"
#include "tlsfluc/synth.hpp"
#include "tlsfluc/tls.hpp"

namespace tlsfluc {

struct AnalysisConfig {
  std::size_t segment_length = 0;  // 0 = len/8 rounded to a power of two
  double overlap_fraction = 0.5;
  std::vector<double> window_sizes_s;
  std::vector<std::size_t> k_values;
};

// Complete description of a simulation-and-analysis run. A config plus seed
// reproduces outputs byte for byte.
struct RunConfig {
  ResonatorParams resonator;
  TLSModel tls;
  FluctuationSpec fluctuation;
  InterleavedSchedule schedule;
  MeasurementModel measurement;
  AnalysisConfig analysis;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

RunConfig default_run_config();
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& cfg);

// Canonical JSON dump (sorted keys, defaults materialized).
std::string run_config_json(const RunConfig& cfg);

// FNV-1a 64 of the canonical dump, as hex; embedded in every output file.
std::string config_hash(const RunConfig& cfg);

struct Provenance {
  std::string tool_version = k_tool_version;
  std::string config_hash;
};

// CSV body freq_hz,s21_re,s21_im at full precision plus a JSON sidecar
// <path>.meta.json carrying acquisition metadata and provenance.
void write_sweep(const std::filesystem::path& path, const FrequencySweep& sweep,
                 const Provenance& prov = {});
FrequencySweep read_sweep(const std::filesystem::path& path);

// CSV body timestamp_s,q_i,q_i_sigma plus sidecar.
void write_qi_series(const std::filesystem::path& path, const QiTimeSeries& series,
                     const Provenance& prov = {});
QiTimeSeries read_qi_series(const std::filesystem::path& path);

// CSV body timestamp_s,f_delta_tls. Raw estimator output may contain flagged
// non-positive values, so reading returns plain arrays.
struct RawSeries {
  std::vector<double> timestamps_s;
  std::vector<double> values;
};
void write_loss_series(const std::filesystem::path& path,
                       const std::vector<double>& timestamps_s,
                       const std::vector<double>& values, const Provenance& prov = {});
RawSeries read_loss_series(const std::filesystem::path& path);

// CSV body freq_hz,value plus a sidecar recording the estimator settings.
void write_spectrum(const std::filesystem::path& path, const SpectrumEstimate& spec,
                    const Provenance& prov = {});
SpectrumEstimate read_spectrum(const std::filesystem::path& path);

// CSV body mean_photons,q_i,q_i_sigma plus sidecar with temperature and f_r.
void write_power_sweep(const std::filesystem::path& path, const PowerSweepData& data,
                       const Provenance& prov = {});
PowerSweepData read_power_sweep(const std::filesystem::path& path);

}  // namespace tlsfluc
