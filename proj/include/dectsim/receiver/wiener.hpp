// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dectsim/common/types.hpp"
#include "dectsim/numerology/packet_format.hpp"
#include "dectsim/numerology/packet_layout.hpp"

namespace dectsim::receiver {

/**
 * Design statistics of the fixed interpolator. Frequency correlation of an exponential power
 * delay profile about its mean delay, e^{j x} / (1 + j x) with x = 2 pi df tau, times the Jakes
 * time correlation J0(2 pi fd dt).
 */
struct wiener_design_t {
        static constexpr double worst_delay_spread_s = 363e-9;
        static constexpr double worst_doppler_hz = 111.2;

        double delay_spread_s{worst_delay_spread_s};
        double doppler_hz{worst_doppler_hz};
        double snr_db{30.0};
        /// Nearest pilots in frequency taken from each pilot symbol.
        uint32_t pilots_per_symbol{16};
        /// Added to the diagonal on top of the design noise, relative to unit signal power.
        double diagonal_loading{1e-6};
};

/// Default design: the largest delay spread (363 ns) and Doppler (111.2 Hz) of the channel set, 30 dB.
wiener_design_t default_wiener_design(const packet_format_t& format);

/// Weights of one RE over a set of pilot REs.
struct wiener_taps_t {
        std::vector<uint32_t> pilots;  ///< indices into layout.drs_res(antenna)
        std::vector<cf_t> weights;
};

/// w = R_dp (R_pp + sigma^2 I)^-1 for the RE at (symbol, subcarrier). Throws validation_error on invalid design.
wiener_taps_t wiener_weights(const packet_layout_t& layout, const numerology_t& n, const wiener_design_t& design,
                             uint32_t antenna, uint32_t symbol, uint32_t subcarrier);

/**
 * Per-DATA-RE weights for every transmit antenna, fixed at construction. Immutable afterwards and
 * safe to share between workers.
 */
class wiener_bank_t {
    public:
        wiener_bank_t(const packet_format_t& format, const wiener_design_t& design);

        const wiener_design_t& design() const { return design_; }
        const packet_layout_t& layout() const { return layout_; }
        /// taps(a, i) for DATA RE i (position in layout.data_res()).
        const wiener_taps_t& taps(uint32_t antenna, uint32_t data_index) const { return taps_[antenna][data_index]; }

        bool operator==(const wiener_bank_t& o) const;

    private:
        wiener_design_t design_;
        packet_layout_t layout_;
        std::vector<std::vector<wiener_taps_t>> taps_;
};

wiener_bank_t build_wiener_bank(const packet_format_t& format, double worst_ds, double worst_fd, double design_snr_db);

}  // namespace dectsim::receiver
