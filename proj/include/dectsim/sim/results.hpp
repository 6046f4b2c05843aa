// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dectsim/modem/ofdm.hpp"
#include "dectsim/sim/harness.hpp"

namespace dectsim::sim {

inline constexpr const char* csv_header = "snr_db,trials,packet_errors,per,per_ci_lo,per_ci_hi,ber,harq_mean_tx";
inline constexpr const char* tool_version = "dectsim 1.0.0";

/// Files written for one series: <dir>/<stem>.csv and <dir>/<stem>.json.
struct result_files_t {
        std::string csv;
        std::string sidecar;
};

/// "<spec name>" for a single series, "<spec name>_<csi>" for paired runs.
std::string series_stem(const experiment_spec_t& spec, const series_t& series, size_t n_series);

/**
 * Writes one CSV plus sidecar per series. The sidecar holds the tool version, the full
 * experiment spec, the CSI mode of the series and every record (including raw counters and the
 * HARQ histogram). Creates `dir` if needed; throws io_error naming the path on I/O failure.
 */
std::vector<result_files_t> persist_results(const sweep_result_t& result, const std::string& dir);

struct loaded_series_t {
        experiment_spec_t spec;
        series_t series;
};

/// Reads a sidecar written by persist_results(); the CSV next to it must agree on every row.
loaded_series_t load_results(const std::string& sidecar_path);

/// Parses a results CSV; throws config_error naming the first missing column.
std::vector<point_record_t> read_csv(const std::string& path);

/**
 * Raw waveform dump: interleaved float32 I/Q, little-endian, antenna-major (all samples of
 * antenna 0, then antenna 1). The JSON sidecar records rate, antenna and sample counts, the
 * packet format and the seed.
 */
void dump_waveform(const modem::waveform_t& w, const packet_format_t& format, uint64_t seed,
                   const std::string& path_stem);

}  // namespace dectsim::sim
