// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dectsim/numerology/packet_format.hpp"

namespace dectsim {

enum class re_label_t : uint8_t { null, stf, drs, pcc, data };

/**
 * Resource-element map of one packet.
 *
 *   row 0          STF, every subcarrier
 *   rows 1..9      data field (DF)
 *     DF row 0, 5  DRS on every 4th subcarrier; antenna a uses offset 2a on DF row 0 and
 *                  (2a + 2) mod 4 on DF row 5, so antenna sets are disjoint and staggered
 *     first 98 non-DRS DF resource elements (row-major)  PCC
 *     remainder    DATA
 *
 * Column k maps to baseband frequency (k - fft_size/2) * subcarrier_spacing; DC carries data.
 */
class packet_layout_t {
    public:
        static constexpr uint32_t n_stf_symbols = 1;
        static constexpr uint32_t n_pcc_res = 98;
        static constexpr uint32_t drs_subcarrier_stride = 4;
        static constexpr uint32_t drs_df_rows[2] = {0, 5};

        packet_layout_t() = default;

        /// Throws config_error if the grid is empty or leaves no DATA resource elements.
        packet_layout_t(uint32_t n_symbols, uint32_t n_subcarriers, uint32_t n_tx_antennas);
        explicit packet_layout_t(const packet_format_t& format);

        uint32_t n_symbols() const { return n_symbols_; }
        uint32_t n_subcarriers() const { return n_subcarriers_; }
        uint32_t n_tx_antennas() const { return n_tx_; }

        re_label_t label(uint32_t symbol, uint32_t subcarrier) const {
            return labels_[symbol * n_subcarriers_ + subcarrier];
        }

        /// Antenna owning a DRS resource element, undefined for other labels.
        uint32_t drs_antenna(uint32_t symbol, uint32_t subcarrier) const {
            return drs_owner_[symbol * n_subcarriers_ + subcarrier];
        }

        /// Flat indices (symbol * n_subcarriers + subcarrier) in symbol-major order.
        const std::vector<uint32_t>& data_res() const { return data_res_; }
        const std::vector<uint32_t>& pcc_res() const { return pcc_res_; }
        const std::vector<uint32_t>& drs_res(uint32_t antenna) const { return drs_res_[antenna]; }

        uint32_t n_total_res() const { return n_symbols_ * n_subcarriers_; }
        uint32_t n_stf_res() const { return n_stf_; }
        uint32_t n_drs_res() const;
        uint32_t n_data_res() const { return static_cast<uint32_t>(data_res_.size()); }

        bool operator==(const packet_layout_t&) const = default;

    private:
        uint32_t n_symbols_{0};
        uint32_t n_subcarriers_{0};
        uint32_t n_tx_{1};
        uint32_t n_stf_{0};
        std::vector<re_label_t> labels_;
        std::vector<uint8_t> drs_owner_;
        std::vector<uint32_t> data_res_;
        std::vector<uint32_t> pcc_res_;
        std::vector<std::vector<uint32_t>> drs_res_;
};

struct grid_dimensions_t {
        uint32_t n_symbols;
        uint32_t n_subcarriers;
        uint32_t n_stf_symbols;
        uint32_t n_drs_res;
        uint32_t n_pcc_res;
        uint32_t n_data_res;
};

/// Throws config_error when the format yields no DATA resource elements.
grid_dimensions_t packet_grid_dimensions(const packet_format_t& format);

/// n_data_res * bits_per_symbol, no validation.
uint32_t payload_capacity_bits(uint32_t n_data_res, modulation_t modulation);

/// Throws config_error if the capacity cannot hold TBS + 24 CRC bits.
uint32_t payload_capacity_bits(const packet_format_t& format);

}  // namespace dectsim
