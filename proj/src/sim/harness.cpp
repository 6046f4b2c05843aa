// SPDX-License-Identifier: Apache-2.0

#include "dectsim/sim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "dectsim/channel/awgn.hpp"
#include "dectsim/coding/rate_matching.hpp"
#include "dectsim/coding/transport_codec.hpp"
#include "dectsim/common/seed.hpp"
#include "dectsim/modem/constellation.hpp"
#include "dectsim/modem/resource_grid.hpp"

namespace dectsim::sim {

namespace {

constexpr double z95 = 1.959963984540054;
constexpr double urllc_per = 1e-5;

// trial-stream tags beyond the shared ones
constexpr uint64_t tag_fading_iid = 16;

bits_t random_bits(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    bits_t b(n);
    size_t i = 0;
    while (i < n) {
        uint64_t w = rng();
        for (int k = 0; k < 64 && i < n; ++k, ++i, w >>= 1) b[i] = static_cast<uint8_t>(w & 1u);
    }
    return b;
}

// regularized incomplete beta I_x(a, b), continued fraction (Lentz)
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    double c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lbt) * betacf(a, b, x) / a;
    return 1.0 - std::exp(lbt) * betacf(b, a, 1.0 - x) / b;
}

// x with I_x(a, b) = q, bisection
double ibeta_inv(double a, double b, double q) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
        const double x = 0.5 * (lo + hi);
        if (ibeta(a, b, x) < q) {
            lo = x;
        } else {
            hi = x;
        }
    }
    return 0.5 * (lo + hi);
}

void count_bit_errors(const llrs_t& llr, const bits_t& bits, uint32_t bps, trial_result_t& r) {
    for (size_t k = 0; k < bits.size(); ++k) {
        const bool wrong = (llr[k] < 0.0f) != (bits[k] == 1);
        r.bit_errors += wrong;
        if (k % bps == 0) {
            r.lead_bit_errors += wrong;
            ++r.lead_bits;
        }
    }
}

struct counters_t {
        uint64_t trials{0};
        uint64_t packet_errors{0};
        uint64_t bit_errors{0};
        uint64_t bits{0};
        uint64_t lead_bit_errors{0};
        uint64_t lead_bits{0};
        std::vector<uint64_t> hist;

        void add(const trial_result_t& r) {
            ++trials;
            packet_errors += r.success ? 0 : 1;
            bit_errors += r.bit_errors;
            bits += r.bits;
            lead_bit_errors += r.lead_bit_errors;
            lead_bits += r.lead_bits;
            ++hist[r.n_transmissions - 1];
        }
};

}  // namespace

std::pair<double, double> wilson_interval(uint64_t errors, uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    if (errors == 0) return {0.0, 1.0 - std::pow(0.05, 1.0 / n)};
    const double p = errors / n;
    const double z2 = z95 * z95;
    const double den = 1.0 + z2 / n;
    const double centre = (p + z2 / (2 * n)) / den;
    const double half = z95 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / den;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::pair<double, double> binomial_interval(uint64_t errors, uint64_t trials, double confidence) {
    if (trials == 0) return {0.0, 1.0};
    const double alpha = 1.0 - confidence;
    const double k = static_cast<double>(errors), n = static_cast<double>(trials);
    const double lo = errors == 0 ? 0.0 : ibeta_inv(k, n - k + 1.0, alpha / 2);
    const double hi = errors == trials ? 1.0 : ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2);
    return {lo, hi};
}

double point_record_t::harq_mean_tx() const {
    if (trials == 0) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < harq_histogram.size(); ++i) s += static_cast<double>(i + 1) * harq_histogram[i];
    return s / trials;
}

const series_t& sweep_result_t::curve(receiver::csi_mode_t csi) const {
    for (const auto& s : series)
        if (s.csi == csi) return s;
    throw validation_error("sweep has no series for the requested CSI mode");
}

struct simulator_t::context_t {
        std::optional<coding::transport_codec_t> codec;
};

simulator_t::simulator_t(experiment_spec_t spec, uint32_t workers) : spec_(std::move(spec)), workers_(workers) {
    validate(spec_);
    if (workers_ == 0) throw validation_error("at least one worker is required");
    if (spec_.channel == channel_kind_t::iid_rayleigh && spec_.csi != csi_selection_t::perfect) {
        throw validation_error("iid_rayleigh supports perfect CSI only");
    }
    switch (spec_.csi) {
        case csi_selection_t::wiener:
            modes_ = {receiver::csi_mode_t::wiener};
            break;
        case csi_selection_t::perfect:
            modes_ = {receiver::csi_mode_t::perfect};
            break;
        case csi_selection_t::paired:
            modes_ = {receiver::csi_mode_t::wiener, receiver::csi_mode_t::perfect};
            break;
    }
    layout_ = packet_layout_t(spec_.format);
    capacity_bits_ = payload_capacity_bits(layout_.n_data_res(), spec_.format.modulation);
    switch (spec_.channel) {
        case channel_kind_t::awgn:
            profile_ = channel::unit_profile();
            break;
        case channel_kind_t::nlos:
            profile_ = channel::builtin_profile("TDL-iii");
            break;
        case channel_kind_t::los:
            profile_ = channel::builtin_profile("TDL-v");
            break;
        case channel_kind_t::flat_rayleigh:
        case channel_kind_t::iid_rayleigh:
            profile_ = channel::flat_profile();
            break;
    }
    doppler_hz_ = spec_.max_doppler_hz();
    const uint32_t L = modem::resampling_factor(spec_.format.numerology.sample_rate_hz, modem::simulation_rate_hz);
    slot_samples_ = spec_.format.numerology.samples_per_slot() * L;
    duration_samples_ = uint64_t{slot_samples_} * (spec_.harq_max_retx + 1) + 4096;
    if (std::find(modes_.begin(), modes_.end(), receiver::csi_mode_t::wiener) != modes_.end()) {
        bank_ = std::make_shared<const receiver::wiener_bank_t>(spec_.format, spec_.wiener_design());
    }
    if (spec_.channel != channel_kind_t::iid_rayleigh) {
        const auto shape = channel::generate_channel(profile_, {doppler_hz_}, spec_.n_tx(), spec_.n_rx, 1, 0);
        rx_ = std::make_unique<receiver::packet_receiver_t>(spec_.format, spec_.n_rx,
                                                            receiver::receiver_config_t{modes_.front()}, bank_, shape);
    }
}

bits_t simulator_t::payload_bits(uint64_t si, uint64_t ti) const {
    const size_t n = spec_.measure == measure_t::packet ? spec_.format.tbs_bits : capacity_bits_;
    return random_bits(n, derive_seed(spec_.master_seed, {si, ti, seed_tag::payload}));
}

channel::channel_realization_t simulator_t::realization(uint64_t si, uint64_t ti) const {
    return channel::generate_channel(profile_, {doppler_hz_}, spec_.n_tx(), spec_.n_rx, duration_samples_,
                                     derive_seed(spec_.master_seed, {si, ti, seed_tag::channel}));
}

std::vector<std::vector<cf_t>> simulator_t::waveform_for(const bits_t& coded) const {
    const auto grids = modem::assemble_grid(coded, layout_, spec_.format.modulation);
    return modem::ofdm_modulate_at(std::span(grids), spec_.format.numerology).antennas;
}

modem::waveform_t simulator_t::transmit_waveform(uint64_t si, uint64_t ti) const {
    const bits_t payload = payload_bits(si, ti);
    bits_t coded = payload;
    if (spec_.measure == measure_t::packet) {
        coding::transport_codec_t codec({spec_.format.tbs_bits, capacity_bits_,
                                         bits_per_symbol(spec_.format.modulation)});
        coded = codec.encode(payload, 0);
    }
    const auto grids = modem::assemble_grid(coded, layout_, spec_.format.modulation);
    return modem::ofdm_modulate_at(std::span(grids), spec_.format.numerology);
}

std::vector<trial_result_t> simulator_t::packet_trial(context_t& ctx, double snr_db, uint64_t si, uint64_t ti) const {
    auto& codec = *ctx.codec;
    const bits_t payload = payload_bits(si, ti);
    const auto h = realization(si, ti);
    const uint32_t L = rx_->oversampling();
    const double var = channel::awgn_variance(snr_db, 1.0, L);
    const auto codewords = codec.encode_blocks(payload);
    auto buffer = codec.make_soft_buffer();

    trial_result_t r;
    r.bits = payload.size();
    coding::transport_decode_result_t dec;
    for (uint32_t i = 0; i <= spec_.harq_max_retx; ++i) {
        const uint32_t rv = coding::rv_for_transmission(i);
        const int64_t t0 = int64_t{i} * slot_samples_;
        auto rx = channel::apply_channel(waveform_for(codec.rate_match(codewords, rv)), modem::simulation_rate_hz, h, t0);
        for (uint32_t a = 0; a < rx.size(); ++a) {
            channel::add_noise(rx[a], var, derive_seed(spec_.master_seed, {si, ti, seed_tag::noise, i, a}));
        }
        const auto rec = rx_->receive(rx, h, t0, var / L);
        codec.harq_accumulate(buffer, rec.llrs, rv);
        dec = codec.decode(buffer);
        r.n_transmissions = i + 1;
        if (dec.crc_pass) break;
    }
    r.success = dec.crc_pass;
    for (size_t k = 0; k < payload.size(); ++k) r.bit_errors += dec.payload[k] != payload[k];
    return {r};
}

std::vector<trial_result_t> simulator_t::uncoded_trial(context_t&, double snr_db, uint64_t si, uint64_t ti) const {
    const bits_t bits = payload_bits(si, ti);
    const auto h = realization(si, ti);
    const uint32_t L = rx_->oversampling();
    const double var = channel::awgn_variance(snr_db, 1.0, L);
    auto rx = channel::apply_channel(waveform_for(bits), modem::simulation_rate_hz, h, 0);
    for (uint32_t a = 0; a < rx.size(); ++a) {
        channel::add_noise(rx[a], var, derive_seed(spec_.master_seed, {si, ti, seed_tag::noise, 0, a}));
    }
    const auto grids = rx_->demodulate(rx, receiver::time_sync({}, h.first_tap_delay_samples()));
    const auto scheme = spec_.n_tx() == 2 ? receiver::combining_t::sfbc_mrc : receiver::combining_t::mrc;
    const uint32_t bps = bits_per_symbol(spec_.format.modulation);
    std::vector<trial_result_t> out;
    for (const auto mode : modes_) {
        const auto est = rx_->estimate(grids, mode, h, 0);
        const auto c = receiver::combine(grids, est, layout_, scheme, var / L);
        const auto llr = receiver::demap_llrs(c.symbols, c.post_snr, spec_.format.modulation);
        trial_result_t r;
        r.bits = bits.size();
        count_bit_errors(llr, bits, bps, r);
        r.success = r.bit_errors == 0;
        out.push_back(r);
    }
    return out;
}

std::vector<trial_result_t> simulator_t::iid_trial(context_t&, double snr_db, uint64_t si, uint64_t ti) const {
    const bits_t bits = payload_bits(si, ti);
    const auto tx = modem::assemble_grid(bits, layout_, spec_.format.modulation);
    const uint32_t n_tx = spec_.n_tx(), n_rx = spec_.n_rx, n_data = layout_.n_data_res();
    const double noise_var = std::pow(10.0, -snr_db / 10.0);
    std::mt19937_64 rng(derive_seed(spec_.master_seed, {si, ti, tag_fading_iid}));
    std::normal_distribution<float> g(0.0f, static_cast<float>(std::sqrt(0.5)));
    std::normal_distribution<float> w(0.0f, static_cast<float>(std::sqrt(noise_var / 2)));

    // one fade per DATA RE, shared by both REs of an Alamouti pair
    std::vector<uint32_t> fade_of(n_data);
    uint32_t n_fades = 0;
    if (n_tx == 2) {
        for (const auto& p : modem::sfbc_pairs(layout_)) {
            fade_of[p[0]] = fade_of[p[1]] = n_fades++;
        }
    } else {
        for (uint32_t i = 0; i < n_data; ++i) fade_of[i] = n_fades++;
    }
    std::vector<cf_t> fades(size_t{n_fades} * n_rx * n_tx);
    for (auto& v : fades) v = {g(rng), g(rng)};

    receiver::channel_estimate_t est(n_tx, n_rx, n_data, receiver::csi_mode_t::perfect);
    std::vector<modem::resource_grid_t> grids(n_rx, modem::resource_grid_t(layout_.n_symbols(), layout_.n_subcarriers()));
    for (uint32_t r = 0; r < n_rx; ++r) {
        for (uint32_t i = 0; i < n_data; ++i) {
            const uint32_t idx = layout_.data_res()[i];
            cf_t y{};
            for (uint32_t t = 0; t < n_tx; ++t) {
                const cf_t hv = fades[(size_t{fade_of[i]} * n_rx + r) * n_tx + t];
                est.at(r, t, i) = hv;
                y += hv * tx[t].re[idx];
            }
            grids[r].re[idx] = y + cf_t(w(rng), w(rng));
        }
    }
    const auto scheme = n_tx == 2 ? receiver::combining_t::sfbc_mrc : receiver::combining_t::mrc;
    const auto c = receiver::combine(grids, est, layout_, scheme, noise_var);
    const auto llr = receiver::demap_llrs(c.symbols, c.post_snr, spec_.format.modulation);
    trial_result_t r;
    r.bits = bits.size();
    count_bit_errors(llr, bits, bits_per_symbol(spec_.format.modulation), r);
    r.success = r.bit_errors == 0;
    return {r};
}

std::vector<trial_result_t> simulator_t::run_trial(double snr_db, uint64_t si, uint64_t ti) const {
    context_t ctx;
    if (spec_.measure == measure_t::packet) {
        ctx.codec.emplace(coding::transport_config_t{spec_.format.tbs_bits, capacity_bits_,
                                                     bits_per_symbol(spec_.format.modulation)});
    }
    if (spec_.channel == channel_kind_t::iid_rayleigh) return iid_trial(ctx, snr_db, si, ti);
    if (spec_.measure == measure_t::uncoded) return uncoded_trial(ctx, snr_db, si, ti);
    return packet_trial(ctx, snr_db, si, ti);
}

std::vector<point_record_t> simulator_t::run_point(size_t si) const {
    if (si >= spec_.snr_db.size()) throw validation_error("SNR index out of range");
    const double snr = spec_.snr_db[si];
    const size_t n_modes = modes_.size();
    const uint32_t hist_len = spec_.harq_max_retx + 1;

    std::vector<context_t> ctx(workers_);
    for (auto& c : ctx) {
        if (spec_.measure == measure_t::packet) {
            c.codec.emplace(coding::transport_config_t{spec_.format.tbs_bits, capacity_bits_,
                                                       bits_per_symbol(spec_.format.modulation)});
        }
    }
    auto trial = [&](context_t& c, uint64_t ti) {
        if (spec_.channel == channel_kind_t::iid_rayleigh) return iid_trial(c, snr, si, ti);
        if (spec_.measure == measure_t::uncoded) return uncoded_trial(c, snr, si, ti);
        return packet_trial(c, snr, si, ti);
    };

    std::vector<counters_t> acc(n_modes);
    for (auto& a : acc) a.hist.assign(hist_len, 0);
    auto errors_of = [&](const counters_t& a) {
        return spec_.measure == measure_t::packet ? a.packet_errors : a.bit_errors;
    };

    const uint64_t round = uint64_t{workers_} * spec_.batch_size;
    std::vector<std::vector<trial_result_t>> results;
    uint64_t next = 0;
    bool done = false;
    while (!done) {
        const uint64_t n = std::min(round, spec_.stop.max_trials - next);
        results.assign(n, {});
        const uint64_t n_batches = (n + spec_.batch_size - 1) / spec_.batch_size;
        std::atomic<uint64_t> cursor{0};
        std::exception_ptr failure;
        std::mutex failure_lock;
        auto work = [&](uint32_t w) {
            try {
                for (uint64_t b = cursor++; b < n_batches; b = cursor++) {
                    const uint64_t end = std::min(n, (b + 1) * spec_.batch_size);
                    for (uint64_t k = b * spec_.batch_size; k < end; ++k) results[k] = trial(ctx[w], next + k);
                }
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        };
        if (workers_ == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (uint32_t w = 0; w < workers_; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        // stop rule in trial order
        for (uint64_t k = 0; k < n && !done; ++k) {
            for (size_t m = 0; m < n_modes; ++m) acc[m].add(results[k][m]);
            uint64_t worst = UINT64_MAX;
            for (const auto& a : acc) worst = std::min(worst, errors_of(a));
            if (worst >= spec_.stop.min_errors || acc[0].trials >= spec_.stop.max_trials) done = true;
        }
        next += n;
    }

    std::vector<point_record_t> out;
    for (const auto& a : acc) {
        point_record_t p;
        p.snr_db = snr;
        p.trials = a.trials;
        p.packet_errors = a.packet_errors;
        p.bit_errors = a.bit_errors;
        p.bits_total = a.bits;
        p.lead_bit_errors = a.lead_bit_errors;
        p.lead_bits = a.lead_bits;
        p.per = static_cast<double>(a.packet_errors) / a.trials;
        std::tie(p.per_ci_lo, p.per_ci_hi) = wilson_interval(a.packet_errors, a.trials);
        p.ber = a.bits ? static_cast<double>(a.bit_errors) / a.bits : 0.0;
        p.harq_histogram = a.hist;
        out.push_back(p);
    }
    return out;
}

sweep_result_t simulator_t::run_sweep(const progress_fn& progress) const {
    sweep_result_t res;
    res.spec = spec_;
    for (const auto m : modes_) res.series.push_back({m, {}});
    uint32_t below = 0;
    for (size_t si = 0; si < spec_.snr_db.size(); ++si) {
        const auto recs = run_point(si);
        for (size_t m = 0; m < recs.size(); ++m) {
            res.series[m].points.push_back(recs[m]);
            if (progress) progress(spec_, modes_[m], recs[m]);
        }
        if (spec_.early_stop && spec_.measure == measure_t::packet) {
            below = recs.front().per < urllc_per ? below + 1 : 0;
            if (below >= 2) break;
        }
    }
    return res;
}

std::vector<trial_result_t> run_trial(const experiment_spec_t& spec, double snr_db, uint64_t snr_index,
                                      uint64_t trial_index) {
    return simulator_t(spec).run_trial(snr_db, snr_index, trial_index);
}

sweep_result_t run_sweep(const experiment_spec_t& spec, uint32_t workers, const progress_fn& progress) {
    return simulator_t(spec, workers).run_sweep(progress);
}

std::optional<double> snr_at(const std::vector<point_record_t>& points, double target, bool use_ber) {
    auto value = [&](const point_record_t& p) { return use_ber ? p.ber : p.per; };
    for (size_t i = 1; i < points.size(); ++i) {
        const double a = value(points[i - 1]), b = value(points[i]);
        if (a >= target && b < target) {
            if (b <= 0.0) return points[i].snr_db;
            const double la = std::log10(a), lb = std::log10(b), lt = std::log10(target);
            const double f = la == lb ? 0.0 : (la - lt) / (la - lb);
            return points[i - 1].snr_db + f * (points[i].snr_db - points[i - 1].snr_db);
        }
    }
    return std::nullopt;
}

}  // namespace dectsim::sim
