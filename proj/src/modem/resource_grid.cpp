// SPDX-License-Identifier: Apache-2.0

#include "dectsim/modem/resource_grid.hpp"

#include <cmath>
#include <string>

#include "dectsim/common/seed.hpp"
#include "dectsim/modem/constellation.hpp"

namespace dectsim::modem {

namespace {

constexpr uint64_t stf_seed = 0x5354460000000001ULL;
constexpr uint64_t drs_seed = 0x4452530000000002ULL;
constexpr uint64_t pcc_seed = 0x5043430000000003ULL;

cf_t qpsk_from_hash(uint64_t seed, uint32_t l, uint32_t k) {
    const uint64_t h = mix64(seed ^ ((uint64_t{l} << 16) | k));
    const float a = static_cast<float>(M_SQRT1_2);
    return {(h & 1u) ? -a : a, (h & 2u) ? -a : a};
}

}  // namespace

cf_t stf_symbol(uint32_t l, uint32_t k) { return qpsk_from_hash(stf_seed, l, k); }
cf_t drs_symbol(uint32_t l, uint32_t k) { return qpsk_from_hash(drs_seed, l, k); }
cf_t pcc_symbol(uint32_t l, uint32_t k) { return qpsk_from_hash(pcc_seed, l, k); }

resource_grid_t assemble_logical_grid(std::span<const cf_t> data_symbols, const packet_layout_t& layout) {
    if (data_symbols.size() != layout.n_data_res()) {
        throw validation_error("grid needs " + std::to_string(layout.n_data_res()) + " data symbols, got " +
                               std::to_string(data_symbols.size()));
    }
    resource_grid_t g(layout.n_symbols(), layout.n_subcarriers());
    size_t d = 0;
    for (uint32_t l = 0; l < g.n_symbols; ++l) {
        for (uint32_t k = 0; k < g.n_subcarriers; ++k) {
            switch (layout.label(l, k)) {
                case re_label_t::stf:
                    g.at(l, k) = stf_symbol(l, k);
                    break;
                case re_label_t::drs:
                    g.at(l, k) = drs_symbol(l, k);
                    break;
                case re_label_t::pcc:
                    g.at(l, k) = pcc_symbol(l, k);
                    break;
                case re_label_t::data:
                    g.at(l, k) = data_symbols[d++];
                    break;
                case re_label_t::null:
                    break;
            }
        }
    }
    return g;
}

std::vector<resource_grid_t> assemble_grid(std::span<const uint8_t> coded_bits, const packet_layout_t& layout,
                                           modulation_t modulation) {
    const uint32_t capacity = payload_capacity_bits(layout.n_data_res(), modulation);
    if (coded_bits.size() != capacity) {
        throw validation_error("coded bit count " + std::to_string(coded_bits.size()) +
                               " does not match the payload capacity " + std::to_string(capacity));
    }
    const auto symbols = map_symbols(coded_bits, modulation);
    resource_grid_t logical = assemble_logical_grid(symbols, layout);
    if (layout.n_tx_antennas() == 1) return {std::move(logical)};
    auto pair = sfbc_encode(logical, layout);
    return {std::move(pair[0]), std::move(pair[1])};
}

std::vector<cf_t> extract_data(const resource_grid_t& grid, const packet_layout_t& layout) {
    std::vector<cf_t> out;
    out.reserve(layout.n_data_res());
    for (const uint32_t idx : layout.data_res()) out.push_back(grid.re[idx]);
    return out;
}

bits_t disassemble_grid(const resource_grid_t& grid, const packet_layout_t& layout, modulation_t modulation) {
    return hard_demap(extract_data(grid, layout), modulation);
}

std::vector<std::array<uint32_t, 2>> sfbc_pairs(const packet_layout_t& layout) {
    const auto& data = layout.data_res();
    std::vector<std::array<uint32_t, 2>> pairs;
    pairs.reserve(data.size() / 2);
    size_t i = 0;
    while (i < data.size()) {
        const uint32_t row = data[i] / layout.n_subcarriers();
        if (i + 1 >= data.size() || data[i + 1] / layout.n_subcarriers() != row) {
            throw validation_error("OFDM symbol " + std::to_string(row) +
                                   " holds an odd number of DATA resource elements, SFBC needs pairs");
        }
        pairs.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(i + 1)});
        i += 2;
    }
    return pairs;
}

std::array<resource_grid_t, 2> sfbc_encode(const resource_grid_t& grid, const packet_layout_t& layout) {
    if (layout.n_tx_antennas() != 2) throw validation_error("SFBC needs a two-antenna layout");
    const float s = static_cast<float>(M_SQRT1_2);
    std::array<resource_grid_t, 2> out{resource_grid_t(grid.n_symbols, grid.n_subcarriers),
                                       resource_grid_t(grid.n_symbols, grid.n_subcarriers)};
    for (uint32_t l = 0; l < grid.n_symbols; ++l) {
        for (uint32_t k = 0; k < grid.n_subcarriers; ++k) {
            const re_label_t lab = layout.label(l, k);
            if (lab == re_label_t::stf || lab == re_label_t::pcc) {
                out[0].at(l, k) = s * grid.at(l, k);
                out[1].at(l, k) = s * grid.at(l, k);
            } else if (lab == re_label_t::drs) {
                out[layout.drs_antenna(l, k)].at(l, k) = grid.at(l, k);
            }
        }
    }
    const auto& data = layout.data_res();
    for (const auto& p : sfbc_pairs(layout)) {
        const uint32_t i1 = data[p[0]], i2 = data[p[1]];
        const cf_t s1 = grid.re[i1], s2 = grid.re[i2];
        out[0].re[i1] = s * s1;
        out[0].re[i2] = s * s2;
        out[1].re[i1] = -s * std::conj(s2);
        out[1].re[i2] = s * std::conj(s1);
    }
    return out;
}

}  // namespace dectsim::modem
