// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dectsim::channel {

/**
 * Tapped-delay-line power delay profile. Construction sorts taps by delay and normalizes the
 * linear powers to sum 1. With a K-factor, the first tap's power splits into a fixed line-of-sight
 * part K / (K + 1) and a Rayleigh part 1 / (K + 1); K = +inf leaves it purely line-of-sight.
 */
class tap_profile_t {
    public:
        tap_profile_t() = default;
        /// Throws validation_error on empty, mismatched, negative or non-finite input.
        tap_profile_t(std::string name, std::vector<double> delays_s, std::vector<double> powers_db,
                      std::optional<double> k_factor_db = std::nullopt);

        const std::string& name() const { return name_; }
        size_t n_taps() const { return delays_s_.size(); }
        const std::vector<double>& delays_s() const { return delays_s_; }
        /// Linear, summing to 1.
        const std::vector<double>& powers() const { return powers_; }
        std::vector<double> powers_db() const;
        const std::optional<double>& k_factor_db() const { return k_db_; }

        /// Power-weighted RMS delay spread in seconds.
        double rms_delay_spread() const;

        bool operator==(const tap_profile_t&) const = default;

    private:
        std::string name_;
        std::vector<double> delays_s_;
        std::vector<double> powers_;
        std::optional<double> k_db_;
};

/// Multiplies all delays by one factor to hit target_rms_ds. Throws validation_error for single-tap profiles.
tap_profile_t scale_profile(const tap_profile_t& p, double target_rms_ds);

/// Single tap at zero delay with unit power.
tap_profile_t flat_profile();

/// Single fixed unit-gain tap (K = +inf), the AWGN-only channel.
tap_profile_t unit_profile();

/**
 * Reads a profile file: {"name", "delays_ns", "powers_db", "k_factor_db" (number or null),
 * "target_rms_delay_spread_ns" (optional, applied with scale_profile)}. Throws config_error
 * naming the path on I/O or schema errors.
 */
tap_profile_t load_profile(const std::string& path);

/// "TDL-iii" or "TDL-v" from the shipped data directory (DECTSIM_DATA_DIR or the build-time default).
tap_profile_t builtin_profile(const std::string& name);

/// Carrier velocity product over the speed of light.
double max_doppler(double velocity_mps, double carrier_hz);

inline constexpr double speed_of_light = 299792458.0;

}  // namespace dectsim::channel
