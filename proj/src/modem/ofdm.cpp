// SPDX-License-Identifier: Apache-2.0

#include "dectsim/modem/ofdm.hpp"

#include <cmath>
#include <string>

#include "dectsim/common/fft.hpp"

namespace dectsim::modem {

uint32_t resampling_factor(double from_hz, double to_hz) {
    if (from_hz <= 0.0 || to_hz <= 0.0) throw validation_error("sample rates must be positive");
    const double r = to_hz / from_hz;
    const double L = std::round(r);
    if (L < 1.0 || std::abs(r - L) > 1e-9 * r) {
        throw validation_error("rate " + std::to_string(to_hz) + " Hz is not an integer multiple of " +
                               std::to_string(from_hz) + " Hz");
    }
    return static_cast<uint32_t>(L);
}

std::vector<cf_t> ofdm_modulate(const resource_grid_t& grid, const numerology_t& n, uint32_t oversampling) {
    const uint32_t N = n.fft_size;
    if (grid.n_subcarriers != N) {
        throw validation_error("grid has " + std::to_string(grid.n_subcarriers) + " subcarriers, numerology needs " +
                               std::to_string(N));
    }
    if (oversampling == 0) throw validation_error("oversampling factor must be positive");
    const uint32_t M = N * oversampling;
    const uint32_t cp = n.cp_samples * oversampling;
    const float scale = 1.0f / std::sqrt(static_cast<float>(N));
    std::vector<cf_t> out(size_t{grid.n_symbols} * (M + cp));
    std::vector<cf_t> bins(M), time(M);
    for (uint32_t l = 0; l < grid.n_symbols; ++l) {
        const auto row = grid.row(l);
        std::fill(bins.begin(), bins.end(), cf_t{});
        for (uint32_t k = 0; k < N; ++k) bins[(k + M - N / 2) % M] = row[k];
        dft::inverse(bins, time);
        cf_t* sym = out.data() + size_t{l} * (M + cp);
        for (uint32_t i = 0; i < cp; ++i) sym[i] = scale * time[M - cp + i];
        for (uint32_t i = 0; i < M; ++i) sym[cp + i] = scale * time[i];
    }
    return out;
}

waveform_t ofdm_modulate(std::span<const resource_grid_t> grids, const numerology_t& n, uint32_t oversampling) {
    waveform_t w;
    w.rate_hz = n.sample_rate_hz * oversampling;
    for (const auto& g : grids) w.antennas.push_back(ofdm_modulate(g, n, oversampling));
    return w;
}

waveform_t ofdm_modulate_at(std::span<const resource_grid_t> grids, const numerology_t& n, double target_hz) {
    auto w = ofdm_modulate(grids, n, resampling_factor(n.sample_rate_hz, target_hz));
    w.rate_hz = target_hz;
    return w;
}

resource_grid_t ofdm_demodulate(std::span<const cf_t> samples, const numerology_t& n, size_t start_index,
                                uint32_t n_symbols, uint32_t window_advance, uint32_t oversampling) {
    const uint32_t N = n.fft_size;
    const uint32_t cp = n.cp_samples;
    if (oversampling == 0) throw validation_error("oversampling factor must be positive");
    if (window_advance > cp) throw validation_error("window advance exceeds the cyclic prefix");
    const uint32_t M = N * oversampling;
    const size_t needed = start_index + size_t{n_symbols} * (N + cp) * oversampling;
    if (samples.size() < needed) {
        throw validation_error("demodulation needs " + std::to_string(needed) + " samples, got " +
                               std::to_string(samples.size()));
    }
    const float scale = 1.0f / (static_cast<float>(oversampling) * std::sqrt(static_cast<float>(N)));
    resource_grid_t g(n_symbols, N);
    std::vector<cf_t> bins(M);
    for (uint32_t l = 0; l < n_symbols; ++l) {
        const size_t w0 = start_index + (size_t{l} * (N + cp) + cp - window_advance) * oversampling;
        dft::forward(samples.subspan(w0, M), bins);
        auto row = g.row(l);
        for (uint32_t k = 0; k < N; ++k) row[k] = scale * bins[(k + M - N / 2) % M];
    }
    return g;
}

}  // namespace dectsim::modem
