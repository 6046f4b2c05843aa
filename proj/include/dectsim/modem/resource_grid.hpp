// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/common/types.hpp"
#include "dectsim/numerology/packet_layout.hpp"

namespace dectsim::modem {

/// Complex symbols of one antenna on the (OFDM symbol x subcarrier) lattice, row-major.
struct resource_grid_t {
        uint32_t n_symbols{0};
        uint32_t n_subcarriers{0};
        std::vector<cf_t> re;

        resource_grid_t() = default;
        resource_grid_t(uint32_t symbols, uint32_t subcarriers)
            : n_symbols(symbols), n_subcarriers(subcarriers), re(size_t{symbols} * subcarriers) {}

        cf_t& at(uint32_t l, uint32_t k) { return re[size_t{l} * n_subcarriers + k]; }
        cf_t at(uint32_t l, uint32_t k) const { return re[size_t{l} * n_subcarriers + k]; }
        std::span<cf_t> row(uint32_t l) { return {re.data() + size_t{l} * n_subcarriers, n_subcarriers}; }
        std::span<const cf_t> row(uint32_t l) const { return {re.data() + size_t{l} * n_subcarriers, n_subcarriers}; }
};

/**
 * Fixed unit-power QPSK sequences. A resource element's value depends only on its position and
 * the field, through mix64(field_seed ^ (l << 16 | k)) bits 0 and 1 (bit = 1 negates the axis).
 */
cf_t stf_symbol(uint32_t l, uint32_t k);
cf_t drs_symbol(uint32_t l, uint32_t k);
cf_t pcc_symbol(uint32_t l, uint32_t k);

/**
 * Single-antenna logical grid: DATA REs in symbol-major order from `data_symbols`, STF, DRS of
 * every antenna and PCC placeholders from the fixed sequences. Throws validation_error when
 * data_symbols.size() != layout.n_data_res().
 */
resource_grid_t assemble_logical_grid(std::span<const cf_t> data_symbols, const packet_layout_t& layout);

/**
 * Maps coded bits and assembles one grid per transmit antenna (SFBC for two antennas). Throws
 * validation_error when the bit count is not the layout's payload capacity.
 */
std::vector<resource_grid_t> assemble_grid(std::span<const uint8_t> coded_bits, const packet_layout_t& layout,
                                           modulation_t modulation);

/// DATA REs in symbol-major order.
std::vector<cf_t> extract_data(const resource_grid_t& grid, const packet_layout_t& layout);

/// Hard-decision inverse of assemble_grid() for one antenna without SFBC.
bits_t disassemble_grid(const resource_grid_t& grid, const packet_layout_t& layout, modulation_t modulation);

/**
 * Consecutive DATA REs of each OFDM symbol form Alamouti pairs (s1, s2): antenna 0 sends
 * (s1, s2) / sqrt(2), antenna 1 sends (-s2*, s1*) / sqrt(2). STF and PCC are sent by both
 * antennas at 1 / sqrt(2); each antenna sends its own DRS at unit power and nothing on the other
 * antenna's DRS. Per-antenna mean power is 1/2. Throws validation_error if a symbol holds an odd
 * number of DATA REs or the layout is not a two-antenna layout.
 */
std::array<resource_grid_t, 2> sfbc_encode(const resource_grid_t& grid, const packet_layout_t& layout);

/// Indices into layout.data_res() of each Alamouti pair, in order.
std::vector<std::array<uint32_t, 2>> sfbc_pairs(const packet_layout_t& layout);

}  // namespace dectsim::modem
