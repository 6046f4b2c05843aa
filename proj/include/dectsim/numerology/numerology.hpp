// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace dectsim {

/**
 * OFDM timing and sizing for one (mu, beta) pair.
 *
 * mu scales the subcarrier spacing (27 kHz * mu), beta scales the DFT size (64 * beta). The
 * cyclic prefix is always 1/8 of the DFT size, which makes 10 * mu symbols fill one slot of
 * 10 ms / 24 exactly.
 */
struct numerology_t {
        uint32_t mu{1};
        uint32_t beta{1};
        uint32_t subcarrier_spacing_hz{27000};
        uint32_t fft_size{64};
        uint32_t sample_rate_hz{1728000};
        uint32_t cp_samples{8};
        uint32_t symbols_per_slot{10};

        static constexpr uint32_t frame_slots = 24;
        static constexpr double frame_duration_s = 10.0e-3;
        static constexpr double slot_duration_s = frame_duration_s / frame_slots;

        uint32_t samples_per_symbol() const { return fft_size + cp_samples; }
        uint32_t samples_per_slot() const { return samples_per_symbol() * symbols_per_slot; }
        double symbol_duration_s() const;
        double cp_duration_s() const;

        bool operator==(const numerology_t&) const = default;
};

/// Throws validation_error for mu outside {1,2,4,8} or beta outside {1,2,4,8,12,16}.
numerology_t derive_numerology(uint32_t mu, uint32_t beta);

}  // namespace dectsim
