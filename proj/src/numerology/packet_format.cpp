// SPDX-License-Identifier: Apache-2.0

#include "dectsim/numerology/packet_format.hpp"

#include <cmath>

#include "dectsim/common/types.hpp"
#include "dectsim/numerology/packet_layout.hpp"

namespace dectsim {

uint32_t bits_per_symbol(modulation_t m) {
    switch (m) {
        case modulation_t::bpsk:
            return 1;
        case modulation_t::qpsk:
            return 2;
        case modulation_t::qam16:
            return 4;
        case modulation_t::qam64:
            return 6;
        case modulation_t::qam256:
            return 8;
        case modulation_t::qam1024:
            return 10;
    }
    return 0;
}

std::string_view to_string(modulation_t m) {
    switch (m) {
        case modulation_t::bpsk:
            return "BPSK";
        case modulation_t::qpsk:
            return "QPSK";
        case modulation_t::qam16:
            return "QAM16";
        case modulation_t::qam64:
            return "QAM64";
        case modulation_t::qam256:
            return "QAM256";
        case modulation_t::qam1024:
            return "QAM1024";
    }
    return "?";
}

modulation_t modulation_from_string(std::string_view s) {
    for (const auto m : {modulation_t::bpsk, modulation_t::qpsk, modulation_t::qam16,
                         modulation_t::qam64, modulation_t::qam256, modulation_t::qam1024}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw validation_error("unknown modulation '" + std::string(s) + "'");
}

mcs_entry_t mcs_entry(uint32_t index) {
    // rows 0, 1, 2 and 7 are fixed by the published evaluation, the rest follow the usual
    // progression of the standard's table
    static constexpr std::array<mcs_entry_t, 10> table = {{
        {0, modulation_t::bpsk, {1, 2}},
        {1, modulation_t::qpsk, {1, 2}},
        {2, modulation_t::qpsk, {2, 3}},
        {3, modulation_t::qam16, {1, 2}},
        {4, modulation_t::qam16, {3, 4}},
        {5, modulation_t::qam64, {2, 3}},
        {6, modulation_t::qam64, {3, 4}},
        {7, modulation_t::qam64, {5, 6}},
        {8, modulation_t::qam256, {3, 4}},
        {9, modulation_t::qam256, {5, 6}},
    }};
    if (index >= table.size()) {
        throw validation_error("MCS index " + std::to_string(index) + " outside 0..9");
    }
    return table[index];
}

std::string_view to_string(format_name_t f) {
    switch (f) {
        case format_name_t::format0:
            return "Format0";
        case format_name_t::format1:
            return "Format1";
        case format_name_t::format2:
            return "Format2";
        case format_name_t::custom:
            return "Custom";
    }
    return "?";
}

format_name_t format_from_string(std::string_view s) {
    for (const auto f : {format_name_t::format0, format_name_t::format1, format_name_t::format2,
                         format_name_t::custom}) {
        if (s == to_string(f)) {
            return f;
        }
    }
    throw validation_error("unknown packet format '" + std::string(s) + "'");
}

packet_format_t preset_format(format_name_t name, uint32_t n_tx_antennas) {
    if (n_tx_antennas != 1 && n_tx_antennas != 2) {
        throw validation_error("preset formats support 1 or 2 transmit antennas");
    }
    packet_format_t f;
    f.name = name;
    f.n_symbols = 10;
    f.n_tx_antennas = n_tx_antennas;
    switch (name) {
        case format_name_t::format0:
            f.numerology = derive_numerology(1, 1);
            f.tbs_bits = 296;
            f.modulation = modulation_t::qpsk;
            f.code_rate = {1, 2};
            f.max_harq_retx = 0;
            break;
        case format_name_t::format1:
            f.numerology = derive_numerology(4, 1);
            f.tbs_bits = 368;
            f.modulation = modulation_t::qpsk;
            f.code_rate = {3, 4};
            f.max_harq_retx = 1;
            break;
        case format_name_t::format2:
            f.numerology = derive_numerology(4, 2);
            f.tbs_bits = 288;
            f.modulation = modulation_t::bpsk;
            f.code_rate = {1, 2};
            f.max_harq_retx = 1;
            break;
        case format_name_t::custom:
            throw validation_error("Custom is not a preset format");
    }
    return f;
}

packet_format_t mcs_format(uint32_t mcs_index, uint32_t mu, uint32_t beta, uint32_t n_tx_antennas) {
    const mcs_entry_t mcs = mcs_entry(mcs_index);
    packet_format_t f;
    f.name = format_name_t::custom;
    f.numerology = derive_numerology(mu, beta);
    f.n_symbols = 10;
    f.modulation = mcs.modulation;
    f.code_rate = mcs.code_rate;
    f.max_harq_retx = 0;
    f.n_tx_antennas = n_tx_antennas;

    const packet_layout_t layout(f);
    const uint64_t capacity = payload_capacity_bits(layout.n_data_res(), f.modulation);
    const uint64_t coded = capacity * mcs.code_rate.num / mcs.code_rate.den;
    if (coded < 24 + 8) {
        throw config_error("MCS " + std::to_string(mcs_index) + " leaves no room for a transport block");
    }
    f.tbs_bits = static_cast<uint32_t>((coded - 24) / 8 * 8);
    return f;
}

}  // namespace dectsim
