// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dectsim/channel/fading.hpp"
#include "dectsim/channel/tap_profile.hpp"
#include "dectsim/modem/ofdm.hpp"
#include "dectsim/receiver/receiver.hpp"
#include "dectsim/receiver/wiener.hpp"
#include "dectsim/sim/experiment.hpp"

namespace dectsim::sim {

/// Outcome of one trial for one CSI mode.
struct trial_result_t {
        bool success{false};
        uint32_t n_transmissions{1};
        uint64_t bit_errors{0};
        uint64_t bits{0};
        /// Uncoded only: errors on the first bit of every symbol. Different symbols see independent
        /// noise, so these are Bernoulli trials even when bits of one symbol share a fade.
        uint64_t lead_bit_errors{0};
        uint64_t lead_bits{0};
};

/// Wilson score interval at 95 %; with zero errors the lower bound is 0 and the upper bound is
/// the one-sided 1 - 0.05^(1/n).
std::pair<double, double> wilson_interval(uint64_t errors, uint64_t trials);

/// Clopper-Pearson interval at the given two-sided confidence (binomial CI for BER checks).
std::pair<double, double> binomial_interval(uint64_t errors, uint64_t trials, double confidence);

struct point_record_t {
        double snr_db{0.0};
        uint64_t trials{0};
        uint64_t packet_errors{0};
        uint64_t bit_errors{0};
        uint64_t bits_total{0};
        uint64_t lead_bit_errors{0};
        uint64_t lead_bits{0};
        double per{0.0};
        double per_ci_lo{0.0};
        double per_ci_hi{1.0};
        double ber{0.0};
        /// histogram[i] = trials that used i + 1 transmissions (failures count as 1 + harq_max_retx).
        std::vector<uint64_t> harq_histogram;

        double harq_mean_tx() const;
        bool operator==(const point_record_t&) const = default;
};

/// One curve: every grid point for one CSI mode.
struct series_t {
        receiver::csi_mode_t csi{receiver::csi_mode_t::wiener};
        std::vector<point_record_t> points;

        bool operator==(const series_t&) const = default;
};

struct sweep_result_t {
        experiment_spec_t spec;
        std::vector<series_t> series;

        const series_t& curve(receiver::csi_mode_t csi) const;
};

/// Called after every completed point, in grid order.
using progress_fn = std::function<void(const experiment_spec_t&, receiver::csi_mode_t, const point_record_t&)>;

/**
 * Monte Carlo engine for one experiment. Construction builds everything shared by all trials
 * (profile, Wiener bank, receiver, perfect-CSI tables); trials only read it.
 *
 * Trial seeds come from derive_seed(master_seed, {snr_index, trial_index, tag}), so outcomes do
 * not depend on the worker count or schedule. Points run in rounds of workers * batch_size
 * trials; the stop rule is applied in trial order, so trials past the stopping trial are
 * discarded and every worker count reports identical counters.
 */
class simulator_t {
    public:
        explicit simulator_t(experiment_spec_t spec, uint32_t workers = 1);

        const experiment_spec_t& spec() const { return spec_; }
        uint32_t workers() const { return workers_; }
        /// CSI modes evaluated per trial (two for paired).
        const std::vector<receiver::csi_mode_t>& csi_modes() const { return modes_; }
        const receiver::wiener_bank_t* wiener_bank() const { return bank_.get(); }

        /// One result per CSI mode, in csi_modes() order.
        std::vector<trial_result_t> run_trial(double snr_db, uint64_t snr_index, uint64_t trial_index) const;

        /// One record per CSI mode.
        std::vector<point_record_t> run_point(size_t snr_index) const;

        sweep_result_t run_sweep(const progress_fn& progress = {}) const;

        /// Transmit waveform (simulation rate) of one trial, for inspection.
        modem::waveform_t transmit_waveform(uint64_t snr_index, uint64_t trial_index) const;

    private:
        struct context_t;

        std::vector<trial_result_t> packet_trial(context_t& ctx, double snr_db, uint64_t si, uint64_t ti) const;
        std::vector<trial_result_t> uncoded_trial(context_t& ctx, double snr_db, uint64_t si, uint64_t ti) const;
        std::vector<trial_result_t> iid_trial(context_t& ctx, double snr_db, uint64_t si, uint64_t ti) const;
        bits_t payload_bits(uint64_t si, uint64_t ti) const;
        channel::channel_realization_t realization(uint64_t si, uint64_t ti) const;
        std::vector<std::vector<cf_t>> waveform_for(const bits_t& coded) const;

        experiment_spec_t spec_;
        uint32_t workers_;
        std::vector<receiver::csi_mode_t> modes_;
        packet_layout_t layout_;
        uint32_t capacity_bits_{0};
        channel::tap_profile_t profile_;
        double doppler_hz_{0.0};
        uint64_t duration_samples_{0};
        uint32_t slot_samples_{0};
        std::shared_ptr<const receiver::wiener_bank_t> bank_;
        std::unique_ptr<receiver::packet_receiver_t> rx_;
};

/// Convenience wrappers around simulator_t.
std::vector<trial_result_t> run_trial(const experiment_spec_t& spec, double snr_db, uint64_t snr_index,
                                      uint64_t trial_index);
sweep_result_t run_sweep(const experiment_spec_t& spec, uint32_t workers = 1, const progress_fn& progress = {});

/**
 * SNR where the metric crosses `target`, by linear interpolation of log10(metric) between the
 * bracketing points; the first crossing from above is used. A crossing onto a zero-error point
 * returns that point's SNR (an upper bound). nullopt when the curve never brackets the target.
 */
std::optional<double> snr_at(const std::vector<point_record_t>& points, double target, bool use_ber = false);

}  // namespace dectsim::sim
