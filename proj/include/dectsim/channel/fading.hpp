// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/channel/tap_profile.hpp"
#include "dectsim/common/types.hpp"

namespace dectsim::channel {

struct doppler_spec_t {
        /// Jakes spectrum edge, Hz.
        double max_doppler_hz{0.0};
};

/**
 * Time-varying tap gains of every (tx, rx) link.
 *
 * Each Rayleigh tap is a sum of 33 spectral lines at k * fd / 16, k = -16..16, with independent
 * CN(0, P_k) amplitudes, where P_k integrates the Jakes density over the line's bin. This is a
 * white Gaussian sequence shaped by the Jakes amplitude response at a fading rate of 64 fd
 * (1024 bins), interpolated band-limited to any time instant. The line-of-sight part of a Rician
 * first tap has fixed phase 0 and no Doppler shift. Tap delays are realized as 33-tap Kaiser
 * windowed sinc filters at the given sample rate.
 */
class channel_realization_t {
    public:
        static constexpr uint32_t n_lines_half = 16;
        static constexpr uint32_t fractional_delay_taps = 33;

        channel_realization_t(const tap_profile_t& profile, doppler_spec_t doppler, uint32_t n_tx, uint32_t n_rx,
                              uint64_t duration_samples, uint64_t seed, double sample_rate_hz);

        uint32_t n_tx() const { return n_tx_; }
        uint32_t n_rx() const { return n_rx_; }
        size_t n_taps() const { return profile_.n_taps(); }
        const tap_profile_t& profile() const { return profile_; }
        const doppler_spec_t& doppler() const { return doppler_; }
        double sample_rate_hz() const { return fs_; }
        uint64_t duration_samples() const { return duration_; }
        uint64_t seed() const { return seed_; }
        /// Delay of the earliest tap in samples (rounded).
        int64_t first_tap_delay_samples() const;

        /// Gain of one tap at time t (seconds from the realization origin).
        cd_t gain(uint32_t tx, uint32_t rx, size_t tap, double t) const;
        /// All tap gains of one link at time t.
        void link_gains(uint32_t tx, uint32_t rx, double t, std::span<cd_t> out) const;

        /// Sample-domain filter realizing tap `tap`'s delay: coefficients for offsets first..first+size-1.
        struct delay_filter_t {
                int64_t first{0};
                std::vector<double> coef;
        };
        const delay_filter_t& delay_filter(size_t tap) const { return filters_[tap]; }

        /// Spectral line frequencies in Hz.
        const std::vector<double>& line_frequencies() const { return freqs_; }

    private:
        size_t link_index(uint32_t tx, uint32_t rx) const { return size_t{rx} * n_tx_ + tx; }

        tap_profile_t profile_;
        doppler_spec_t doppler_;
        uint32_t n_tx_, n_rx_;
        uint64_t duration_;
        uint64_t seed_;
        double fs_;
        std::vector<double> freqs_;
        std::vector<cd_t> amp_;  // [link][tap][line]
        double los_amp_{0.0};
        std::vector<delay_filter_t> filters_;
};

channel_realization_t generate_channel(const tap_profile_t& profile, doppler_spec_t doppler, uint32_t n_tx,
                                       uint32_t n_rx, uint64_t duration_samples, uint64_t seed,
                                       double sample_rate_hz = 27.648e6);

/**
 * y_r[n] = sum_t sum_l g_l(t0 + n) x_t[n - tau_l] per receive antenna. Gains are evaluated every
 * 64 samples and interpolated linearly in between. Output length is the input length plus the
 * channel tail. Throws validation_error on antenna-count mismatch or a rate other than the
 * realization's.
 */
std::vector<std::vector<cf_t>> apply_channel(const std::vector<std::vector<cf_t>>& tx, double rate_hz,
                                             const channel_realization_t& h, int64_t t0_samples = 0);
std::vector<std::vector<cd_t>> apply_channel(const std::vector<std::vector<cd_t>>& tx, double rate_hz,
                                             const channel_realization_t& h, int64_t t0_samples = 0);

/// Samples beyond the input that apply_channel() appends.
int64_t channel_tail_samples(const channel_realization_t& h);

}  // namespace dectsim::channel
