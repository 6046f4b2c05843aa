// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dectsim/channel/fading.hpp"
#include "dectsim/common/types.hpp"
#include "dectsim/modem/ofdm.hpp"
#include "dectsim/modem/resource_grid.hpp"
#include "dectsim/numerology/packet_format.hpp"
#include "dectsim/receiver/wiener.hpp"

namespace dectsim::receiver {

enum class csi_mode_t : uint8_t { wiener, perfect };

/// Oracle-assisted synchronization: the window starts at the first tap arrival.
int64_t time_sync(std::span<const cf_t> rx_samples, int64_t first_tap_delay_samples);

/// Channel at every DATA RE for each (rx, tx) link, indexed by position in layout.data_res().
struct channel_estimate_t {
        uint32_t n_tx{1};
        uint32_t n_rx{1};
        uint32_t n_data{0};
        csi_mode_t source{csi_mode_t::wiener};
        std::vector<cf_t> h;

        channel_estimate_t() = default;
        channel_estimate_t(uint32_t tx, uint32_t rx, uint32_t data, csi_mode_t src)
            : n_tx(tx), n_rx(rx), n_data(data), source(src), h(size_t{tx} * rx * data) {}

        cf_t& at(uint32_t rx, uint32_t tx, uint32_t i) { return h[(size_t{rx} * n_tx + tx) * n_data + i]; }
        cf_t at(uint32_t rx, uint32_t tx, uint32_t i) const { return h[(size_t{rx} * n_tx + tx) * n_data + i]; }
};

/// Least-squares estimates at each antenna's DRS, interpolated to DATA REs with the fixed bank.
channel_estimate_t estimate_channel(std::span<const modem::resource_grid_t> rx_grids, const wiener_bank_t& bank);

/**
 * True per-RE channel as seen by the FFT. For each tap l the response T_l(k) = D_l(f_k), the tap's
 * delay filter at subcarrier frequency f_k relative to the sync offset, is precomputed; the
 * per-packet channel is sum_l g_l(t) T_l(k) with g evaluated at the middle of each FFT window.
 */
class perfect_csi_t {
    public:
        perfect_csi_t(const packet_format_t& format, const channel::channel_realization_t& shape,
                      double sim_rate_hz, int64_t sync_offset_samples, uint32_t window_advance);

        /// packet_start_samples: sim-rate time of the packet's first sample in the realization.
        channel_estimate_t estimate(const channel::channel_realization_t& h, int64_t packet_start_samples) const;

    private:
        packet_format_t format_;
        packet_layout_t layout_;
        double sim_rate_;
        uint32_t window_advance_;
        size_t n_taps_;
        std::vector<cd_t> response_;  // [tap][subcarrier]
};

enum class combining_t : uint8_t { mrc, sfbc_mrc };

struct combined_t {
        std::vector<cf_t> symbols;
        std::vector<float> post_snr;
};

/**
 * MRC for one transmit antenna, s = sum_r h_r* y_r / sum_r |h_r|^2 with post-SNR
 * sum_r |h_r|^2 / noise_var. SFBC+MRC for two: over each pair with the channel averaged across it,
 * s1 = sqrt(2) sum_r (h1* y1 + h2 y2*) / S, s2 = sqrt(2) sum_r (h1* y2 - h2 y1*) / S,
 * S = sum_r |h1|^2 + |h2|^2, post-SNR S / (2 noise_var). Throws validation_error on scheme and
 * antenna mismatch.
 */
combined_t combine(std::span<const modem::resource_grid_t> rx_grids, const channel_estimate_t& est,
                   const packet_layout_t& layout, combining_t scheme, double noise_var);

/// Max-log LLRs per bit, (min_{b=1} |y-s|^2 - min_{b=0} |y-s|^2) * post_snr; positive favors 0.
llrs_t demap_llrs(std::span<const cf_t> symbols, std::span<const float> post_snr, modulation_t m);

struct receiver_config_t {
        csi_mode_t csi{csi_mode_t::wiener};
        /// FFT window advance into the CP in base-rate samples, -1 selects cp / 4.
        int32_t window_advance{-1};
};

/// Output of one packet's reception.
struct reception_t {
        combined_t combined;
        llrs_t llrs;
};

/**
 * Packet receiver at the simulation rate: synchronization on the first tap, oversampled OFDM
 * demodulation with CP back-off and phase compensation, channel estimation, combining and
 * demapping. Holds read-only shared state only.
 */
class packet_receiver_t {
    public:
        packet_receiver_t(const packet_format_t& format, uint32_t n_rx, receiver_config_t config,
                          std::shared_ptr<const wiener_bank_t> bank, const channel::channel_realization_t& shape,
                          double sim_rate_hz = modem::simulation_rate_hz);

        const packet_layout_t& layout() const { return layout_; }
        uint32_t oversampling() const { return L_; }
        uint32_t window_advance() const { return advance_; }

        /// Demodulated and phase-compensated grids, one per receive antenna.
        std::vector<modem::resource_grid_t> demodulate(const std::vector<std::vector<cf_t>>& rx,
                                                       int64_t start_index) const;

        channel_estimate_t estimate(std::span<const modem::resource_grid_t> grids, csi_mode_t mode,
                                    const channel::channel_realization_t& h, int64_t packet_start_samples) const;

        /// Full chain; noise_var is the per-RE noise variance after demodulation.
        reception_t receive(const std::vector<std::vector<cf_t>>& rx, const channel::channel_realization_t& h,
                            int64_t packet_start_samples, double noise_var) const;

    private:
        packet_format_t format_;
        packet_layout_t layout_;
        uint32_t n_rx_;
        receiver_config_t cfg_;
        uint32_t advance_;
        uint32_t L_;
        std::shared_ptr<const wiener_bank_t> bank_;
        std::shared_ptr<const perfect_csi_t> perfect_;
        std::vector<cf_t> derotation_;
};

}  // namespace dectsim::receiver
