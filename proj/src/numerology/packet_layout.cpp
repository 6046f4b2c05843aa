// SPDX-License-Identifier: Apache-2.0

#include "dectsim/numerology/packet_layout.hpp"

#include "dectsim/common/types.hpp"

namespace dectsim {

packet_layout_t::packet_layout_t(uint32_t n_symbols, uint32_t n_subcarriers, uint32_t n_tx_antennas)
    : n_symbols_(n_symbols),
      n_subcarriers_(n_subcarriers),
      n_tx_(n_tx_antennas) {
    if (n_symbols == 0 || n_subcarriers == 0) {
        throw config_error("packet grid is empty (" + std::to_string(n_symbols) + " symbols x " +
                           std::to_string(n_subcarriers) + " subcarriers)");
    }
    if (n_tx_antennas != 1 && n_tx_antennas != 2) {
        throw config_error("packet layout supports 1 or 2 transmit antennas");
    }
    if (n_subcarriers % drs_subcarrier_stride != 0) {
        throw config_error("subcarrier count must be a multiple of the DRS stride");
    }

    labels_.assign(n_total_res(), re_label_t::null);
    drs_owner_.assign(n_total_res(), 0);
    drs_res_.resize(n_tx_);

    for (uint32_t k = 0; k < n_subcarriers_; ++k) {
        labels_[k] = re_label_t::stf;
    }
    n_stf_ = n_subcarriers_;

    for (uint32_t l = n_stf_symbols; l < n_symbols_; ++l) {
        const uint32_t df_row = l - n_stf_symbols;
        for (const uint32_t drs_row : drs_df_rows) {
            if (df_row != drs_row) {
                continue;
            }
            for (uint32_t a = 0; a < n_tx_; ++a) {
                const uint32_t offset = (2 * a + (drs_row == drs_df_rows[0] ? 0 : 2)) % drs_subcarrier_stride;
                for (uint32_t k = offset; k < n_subcarriers_; k += drs_subcarrier_stride) {
                    labels_[l * n_subcarriers_ + k] = re_label_t::drs;
                    drs_owner_[l * n_subcarriers_ + k] = static_cast<uint8_t>(a);
                }
            }
        }
    }

    // PCC takes the first free DF resource elements, DATA gets the rest
    uint32_t pcc_left = n_pcc_res;
    for (uint32_t l = n_stf_symbols; l < n_symbols_; ++l) {
        for (uint32_t k = 0; k < n_subcarriers_; ++k) {
            const uint32_t idx = l * n_subcarriers_ + k;
            if (labels_[idx] == re_label_t::drs) {
                drs_res_[drs_owner_[idx]].push_back(idx);
                continue;
            }
            if (pcc_left > 0) {
                labels_[idx] = re_label_t::pcc;
                pcc_res_.push_back(idx);
                --pcc_left;
            } else {
                labels_[idx] = re_label_t::data;
                data_res_.push_back(idx);
            }
        }
    }

    if (data_res_.empty()) {
        throw config_error("packet grid of " + std::to_string(n_symbols) + " x " + std::to_string(n_subcarriers) +
                           " leaves no DATA resource elements after STF, DRS and PCC overhead");
    }
}

packet_layout_t::packet_layout_t(const packet_format_t& format)
    : packet_layout_t(format.n_symbols, format.numerology.fft_size, format.n_tx_antennas) {}

uint32_t packet_layout_t::n_drs_res() const {
    uint32_t n = 0;
    for (const auto& v : drs_res_) {
        n += static_cast<uint32_t>(v.size());
    }
    return n;
}

grid_dimensions_t packet_grid_dimensions(const packet_format_t& format) {
    const packet_layout_t layout(format);
    return {layout.n_symbols(),
            layout.n_subcarriers(),
            packet_layout_t::n_stf_symbols,
            layout.n_drs_res(),
            static_cast<uint32_t>(layout.pcc_res().size()),
            layout.n_data_res()};
}

uint32_t payload_capacity_bits(uint32_t n_data_res, modulation_t modulation) {
    return n_data_res * bits_per_symbol(modulation);
}

uint32_t payload_capacity_bits(const packet_format_t& format) {
    const packet_layout_t layout(format);
    const uint32_t capacity = payload_capacity_bits(layout.n_data_res(), format.modulation);
    if (capacity < format.tbs_bits + 24) {
        throw config_error("payload capacity " + std::to_string(capacity) + " bits cannot hold TBS " +
                           std::to_string(format.tbs_bits) + " + 24 CRC bits");
    }
    return capacity;
}

}  // namespace dectsim
