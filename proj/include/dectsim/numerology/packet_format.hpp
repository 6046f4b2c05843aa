// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dectsim/numerology/numerology.hpp"

namespace dectsim {

enum class modulation_t : uint8_t { bpsk, qpsk, qam16, qam64, qam256, qam1024 };

uint32_t bits_per_symbol(modulation_t m);
std::string_view to_string(modulation_t m);
modulation_t modulation_from_string(std::string_view s);

struct code_rate_t {
        uint32_t num{1};
        uint32_t den{2};

        double value() const { return static_cast<double>(num) / den; }
        bool operator==(const code_rate_t&) const = default;
};

struct mcs_entry_t {
        uint32_t index{0};
        modulation_t modulation{modulation_t::bpsk};
        code_rate_t code_rate{};

        bool operator==(const mcs_entry_t&) const = default;
};

/// MCS 0 to 9. Throws validation_error for other indices.
mcs_entry_t mcs_entry(uint32_t index);

enum class format_name_t : uint8_t { format0, format1, format2, custom };

std::string_view to_string(format_name_t f);
format_name_t format_from_string(std::string_view s);

struct packet_format_t {
        format_name_t name{format_name_t::custom};
        numerology_t numerology{};
        uint32_t n_symbols{10};
        uint32_t tbs_bits{0};
        modulation_t modulation{modulation_t::qpsk};
        code_rate_t code_rate{};
        uint32_t max_harq_retx{0};
        uint32_t n_tx_antennas{1};

        bool operator==(const packet_format_t&) const = default;
};

/// Preset packet formats for URLLC / mMTC; n_tx is 1 or 2.
packet_format_t preset_format(format_name_t name, uint32_t n_tx_antennas = 1);

/**
 * Single-slot packet on numerology (mu, beta) with the given MCS. The transport block size is
 * the largest multiple of 8 such that TBS + 24 <= floor(capacity * code_rate), so a higher MCS
 * carries a larger transport block.
 */
packet_format_t mcs_format(uint32_t mcs_index, uint32_t mu = 1, uint32_t beta = 1, uint32_t n_tx_antennas = 1);

/// Layer-2 PDU floor used by the preset formats (32 bytes).
inline constexpr uint32_t min_urllc_tbs_bits = 256;

}  // namespace dectsim
