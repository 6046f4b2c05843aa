// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/common/types.hpp"
#include "dectsim/modem/resource_grid.hpp"
#include "dectsim/numerology/numerology.hpp"

namespace dectsim::modem {

/// Simulation rate shared by all formats.
inline constexpr double simulation_rate_hz = 27.648e6;

/// Complex baseband samples per transmit antenna.
struct waveform_t {
        std::vector<std::vector<cf_t>> antennas;
        double rate_hz{0.0};

        size_t n_samples() const { return antennas.empty() ? 0 : antennas.front().size(); }
};

/// Throws validation_error unless to_hz / from_hz is a positive integer.
uint32_t resampling_factor(double from_hz, double to_hz);

/**
 * CP-OFDM with a unitary DFT at L times the numerology rate: each symbol is
 * IDFT_{N L}(row zero-padded) / sqrt(N) with the last L * cp_samples prepended. Grid column k
 * sits at baseband frequency (k - N/2) * subcarrier spacing; bins outside the N occupied ones are
 * zero, so the useful part of every symbol is the band-limited (periodic sinc) interpolation of
 * the L = 1 symbol and mean sample power stays 1 for unit-power grids. Throws validation_error
 * if the grid width differs from fft_size or L is 0.
 */
std::vector<cf_t> ofdm_modulate(const resource_grid_t& grid, const numerology_t& n, uint32_t oversampling = 1);
waveform_t ofdm_modulate(std::span<const resource_grid_t> grids, const numerology_t& n, uint32_t oversampling = 1);

/// ofdm_modulate() at target_hz (the factor comes from resampling_factor()).
waveform_t ofdm_modulate_at(std::span<const resource_grid_t> grids, const numerology_t& n,
                            double target_hz = simulation_rate_hz);

/**
 * Inverse of ofdm_modulate(): DFT_{N L} of each window, keeping the N occupied bins scaled by
 * 1 / (L sqrt(N)). White noise of variance s per sample therefore leaves with variance s / L per
 * RE. The window of symbol l starts at start_index + L (l (N + cp) + cp - window_advance), with
 * window_advance in numerology-rate samples; each subcarrier then carries an extra phase
 * e^{-j 2 pi (k - N/2) window_advance / N}. Throws validation_error if the samples do not cover
 * n_symbols symbols.
 */
resource_grid_t ofdm_demodulate(std::span<const cf_t> samples, const numerology_t& n, size_t start_index,
                                uint32_t n_symbols, uint32_t window_advance = 0, uint32_t oversampling = 1);

}  // namespace dectsim::modem
