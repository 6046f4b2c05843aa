// SPDX-License-Identifier: Apache-2.0

#include "dectsim/numerology/numerology.hpp"

#include <algorithm>
#include <array>

#include "dectsim/common/types.hpp"

namespace dectsim {

namespace {

constexpr std::array<uint32_t, 4> legal_mu = {1, 2, 4, 8};
constexpr std::array<uint32_t, 6> legal_beta = {1, 2, 4, 8, 12, 16};

}  // namespace

double numerology_t::symbol_duration_s() const {
    return static_cast<double>(samples_per_symbol()) / sample_rate_hz;
}

double numerology_t::cp_duration_s() const {
    return static_cast<double>(cp_samples) / sample_rate_hz;
}

numerology_t derive_numerology(uint32_t mu, uint32_t beta) {
    if (std::find(legal_mu.begin(), legal_mu.end(), mu) == legal_mu.end()) {
        throw validation_error("illegal subcarrier scaling factor mu=" + std::to_string(mu) +
                               ", expected one of 1, 2, 4, 8");
    }
    if (std::find(legal_beta.begin(), legal_beta.end(), beta) == legal_beta.end()) {
        throw validation_error("illegal Fourier scaling factor beta=" + std::to_string(beta) +
                               ", expected one of 1, 2, 4, 8, 12, 16");
    }

    numerology_t n;
    n.mu = mu;
    n.beta = beta;
    n.subcarrier_spacing_hz = 27000 * mu;
    n.fft_size = 64 * beta;
    n.sample_rate_hz = n.subcarrier_spacing_hz * n.fft_size;
    n.cp_samples = n.fft_size / 8;
    n.symbols_per_slot = 10 * mu;
    return n;
}

}  // namespace dectsim
