// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "dectsim/common/types.hpp"

namespace dectsim::channel {

/**
 * Per-sample complex noise variance at the oversampled rate for a given SNR. The SNR counts
 * noise inside the occupied bandwidth only, which is 1 / oversampling of the simulated band, so
 * the variance is oversampling * signal_power / 10^(snr_db / 10).
 */
double awgn_variance(double snr_db, double signal_power, uint32_t oversampling);

/// Adds CN(0, variance) samples drawn from a generator seeded with `seed`. variance 0 is a no-op.
void add_noise(std::span<cf_t> samples, double variance, uint64_t seed);

/// Mean |x|^2.
double mean_power(std::span<const cf_t> samples);

/**
 * Adds noise for `snr_db` using the measured mean power of `samples` as signal power
 * (the signal is assumed band-limited to the occupied band). snr_db = +inf leaves the samples
 * untouched. Returns the variance used.
 */
double add_awgn(std::span<cf_t> samples, double snr_db, uint32_t oversampling, uint64_t seed);

}  // namespace dectsim::channel
