// SPDX-License-Identifier: Apache-2.0

#include "dectsim/channel/awgn.hpp"

#include <cmath>
#include <random>

namespace dectsim::channel {

double awgn_variance(double snr_db, double signal_power, uint32_t oversampling) {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return oversampling * signal_power / std::pow(10.0, snr_db / 10.0);
}

void add_noise(std::span<cf_t> samples, double variance, uint64_t seed) {
    if (variance <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal(0.0f, static_cast<float>(std::sqrt(variance / 2.0)));
    for (auto& s : samples) {
        const float re = normal(rng);
        const float im = normal(rng);
        s += cf_t{re, im};
    }
}

double mean_power(std::span<const cf_t> samples) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : samples) acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

double add_awgn(std::span<cf_t> samples, double snr_db, uint32_t oversampling, uint64_t seed) {
    const double v = awgn_variance(snr_db, mean_power(samples), oversampling);
    add_noise(samples, v, seed);
    return v;
}

}  // namespace dectsim::channel
