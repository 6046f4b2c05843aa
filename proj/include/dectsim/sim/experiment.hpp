// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dectsim/numerology/packet_format.hpp"
#include "dectsim/receiver/receiver.hpp"
#include "dectsim/receiver/wiener.hpp"
#include "json.hpp"

namespace dectsim::sim {

/**
 * awgn           unit-gain channel, noise only
 * nlos / los     TDL-iii / TDL-v with Jakes fading
 * flat_rayleigh  single Jakes-faded tap per link
 * iid_rayleigh   symbol-level Rayleigh, independent per resource element (pair-constant for SFBC);
 *                bypasses the waveform and fading models
 */
enum class channel_kind_t : uint8_t { awgn, nlos, los, flat_rayleigh, iid_rayleigh };

std::string_view to_string(channel_kind_t c);
channel_kind_t channel_from_string(std::string_view s);

/// packet: turbo-coded transport blocks with HARQ. uncoded: random bits straight onto the grid, BER only.
enum class measure_t : uint8_t { packet, uncoded };

/// paired evaluates Wiener and perfect CSI on the same received samples.
enum class csi_selection_t : uint8_t { wiener, perfect, paired };

std::string_view to_string(csi_selection_t c);
csi_selection_t csi_from_string(std::string_view s);

struct stop_rule_t {
        /// Packet errors (packet measure) or bit errors (uncoded) that end a point.
        uint64_t min_errors{100};
        uint64_t max_trials{10'000'000};

        bool operator==(const stop_rule_t&) const = default;
};

struct experiment_spec_t {
        std::string name{"experiment"};
        packet_format_t format{preset_format(format_name_t::format0)};
        /// Set when the format's modulation and code rate come from an MCS table row.
        std::optional<uint32_t> mcs;
        channel_kind_t channel{channel_kind_t::nlos};
        double carrier_hz{4.0e9};
        double velocity_mps{30.0 / 3.6};
        uint32_t n_rx{1};
        csi_selection_t csi{csi_selection_t::wiener};
        measure_t measure{measure_t::packet};
        std::vector<double> snr_db;
        uint32_t harq_max_retx{0};
        stop_rule_t stop{};
        uint64_t master_seed{1};
        /// Skip the rest of the grid after two consecutive points with PER below 1e-5.
        bool early_stop{false};
        /// Trials per work unit; affects scheduling only, never the statistics.
        uint32_t batch_size{32};
        /// Overrides the default worst-case Wiener design when set.
        std::optional<receiver::wiener_design_t> wiener;

        uint32_t n_tx() const { return format.n_tx_antennas; }
        double max_doppler_hz() const;
        receiver::wiener_design_t wiener_design() const;

        bool operator==(const experiment_spec_t&) const;
};

/// Throws validation_error naming the offending field.
void validate(const experiment_spec_t& spec);

nlohmann::json to_json(const packet_format_t& f);
/// Accepts a preset name with optional overrides, or a full description; "mcs" selects a table row.
packet_format_t format_from_json(const nlohmann::json& j, std::optional<uint32_t>* mcs = nullptr);

nlohmann::json to_json(const experiment_spec_t& spec);
/// Throws config_error on malformed input, with the JSON path of the problem.
experiment_spec_t experiment_from_json(const nlohmann::json& j);
experiment_spec_t load_experiment(const std::string& path);
/// A single experiment object, or {"experiments": [ ... ]}.
std::vector<experiment_spec_t> load_experiments(const std::string& path);

/// Names accepted by experiment_preset().
std::vector<std::string> preset_names();

/// The experiments behind one shipped preset; throws config_error for unknown names.
std::vector<experiment_spec_t> experiment_preset(const std::string& name);

}  // namespace dectsim::sim
