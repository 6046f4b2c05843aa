// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/common/types.hpp"
#include "dectsim/numerology/packet_format.hpp"

namespace dectsim::modem {

/**
 * Gray-labeled unit-power alphabet.
 *
 * BPSK maps 0 -> +1, 1 -> -1. For square QAM with 2m bits b0 b1 ... the even bits b0 b2 ...
 * select the in-phase level and the odd bits the quadrature level. Per axis, with c0 c1 ... the
 * axis bits, the level is (1 - 2 c0) * (2^(m-1) - (1 - 2 c1) * (2^(m-2) - ...)), scaled by
 * 1 / sqrt(2 (M - 1) / 3). QPSK 00 is (1 + j) / sqrt(2).
 */
class constellation_t {
    public:
        explicit constellation_t(modulation_t m);

        modulation_t modulation() const { return mod_; }
        uint32_t bits_per_symbol() const { return bps_; }
        uint32_t order() const { return 1u << bps_; }
        /// Bits per axis; BPSK has one real axis.
        uint32_t axis_bits() const { return axis_bits_; }

        /// points()[label], label read MSB first from the symbol's bits.
        const std::vector<cf_t>& points() const { return points_; }
        /// Axis amplitude for each axis label (already scaled).
        const std::vector<float>& axis_levels() const { return levels_; }

    private:
        modulation_t mod_;
        uint32_t bps_;
        uint32_t axis_bits_;
        std::vector<cf_t> points_;
        std::vector<float> levels_;
};

/// Shared immutable instance per modulation.
const constellation_t& constellation(modulation_t m);

/// Throws validation_error if bits.size() is not a multiple of bits_per_symbol.
std::vector<cf_t> map_symbols(std::span<const uint8_t> bits, modulation_t m);

/// Minimum-distance hard decisions, exhaustive over the alphabet.
bits_t hard_demap(std::span<const cf_t> symbols, modulation_t m);

}  // namespace dectsim::modem
