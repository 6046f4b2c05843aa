// SPDX-License-Identifier: Apache-2.0

#include "dectsim/modem/constellation.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace dectsim::modem {

namespace {

// axis label c0 c1 ... (c0 is the MSB) to unnormalized PAM level
float pam_level(uint32_t label, uint32_t m) {
    auto bit = [&](uint32_t i) { return static_cast<int>((label >> (m - 1 - i)) & 1u); };
    int inner = 1;
    for (int i = static_cast<int>(m) - 2; i >= 0; --i) {
        inner = (1 << (m - 1 - i)) - (1 - 2 * bit(i + 1)) * inner;
    }
    return static_cast<float>((1 - 2 * bit(0)) * inner);
}

}  // namespace

constellation_t::constellation_t(modulation_t m) : mod_(m), bps_(::dectsim::bits_per_symbol(m)) {
    if (m == modulation_t::bpsk) {
        axis_bits_ = 1;
        levels_ = {1.0f, -1.0f};
        points_ = {cf_t{1.0f, 0.0f}, cf_t{-1.0f, 0.0f}};
        return;
    }
    axis_bits_ = bps_ / 2;
    const uint32_t M = order();
    const float scale = 1.0f / std::sqrt(2.0f * static_cast<float>(M - 1) / 3.0f);
    levels_.resize(1u << axis_bits_);
    for (uint32_t a = 0; a < levels_.size(); ++a) levels_[a] = scale * pam_level(a, axis_bits_);

    points_.resize(M);
    for (uint32_t label = 0; label < M; ++label) {
        uint32_t i_label = 0, q_label = 0;
        for (uint32_t b = 0; b < bps_; ++b) {
            const uint32_t bit = (label >> (bps_ - 1 - b)) & 1u;
            if (b % 2 == 0) i_label = (i_label << 1) | bit;
            else q_label = (q_label << 1) | bit;
        }
        points_[label] = {levels_[i_label], levels_[q_label]};
    }
}

const constellation_t& constellation(modulation_t m) {
    static const std::array<constellation_t, 6> table = {
        constellation_t(modulation_t::bpsk),   constellation_t(modulation_t::qpsk),
        constellation_t(modulation_t::qam16),  constellation_t(modulation_t::qam64),
        constellation_t(modulation_t::qam256), constellation_t(modulation_t::qam1024)};
    return table[static_cast<size_t>(m)];
}

std::vector<cf_t> map_symbols(std::span<const uint8_t> bits, modulation_t m) {
    const constellation_t& c = constellation(m);
    const uint32_t q = c.bits_per_symbol();
    if (bits.size() % q != 0) {
        throw validation_error(std::to_string(bits.size()) + " bits do not divide into " + std::string(to_string(m)) +
                               " symbols of " + std::to_string(q) + " bits");
    }
    std::vector<cf_t> out(bits.size() / q);
    for (size_t s = 0; s < out.size(); ++s) {
        uint32_t label = 0;
        for (uint32_t b = 0; b < q; ++b) label = (label << 1) | (bits[s * q + b] & 1u);
        out[s] = c.points()[label];
    }
    return out;
}

bits_t hard_demap(std::span<const cf_t> symbols, modulation_t m) {
    const constellation_t& c = constellation(m);
    const uint32_t q = c.bits_per_symbol();
    bits_t out(symbols.size() * q);
    for (size_t s = 0; s < symbols.size(); ++s) {
        uint32_t best = 0;
        float best_d = std::numeric_limits<float>::max();
        for (uint32_t label = 0; label < c.order(); ++label) {
            const float d = std::norm(symbols[s] - c.points()[label]);
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        for (uint32_t b = 0; b < q; ++b) out[s * q + b] = static_cast<uint8_t>((best >> (q - 1 - b)) & 1u);
    }
    return out;
}

}  // namespace dectsim::modem
