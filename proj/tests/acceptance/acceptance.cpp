// SPDX-License-Identifier: Apache-2.0
//
// acceptance --criterion N [--long] [--workers W]
// Prints one "criterion N: PASS|FAIL ..." line; exit status 0 on pass.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dectsim/channel/fading.hpp"
#include "dectsim/channel/tap_profile.hpp"
#include "dectsim/coding/transport_codec.hpp"
#include "dectsim/numerology/packet_layout.hpp"
#include "dectsim/sim/experiment.hpp"
#include "dectsim/sim/harness.hpp"

using namespace dectsim;
using sim::experiment_spec_t;
using sim::point_record_t;

namespace {

// Tolerances and run sizes.
constexpr int c_max_extensions = 4;
constexpr uint32_t c1_blocks = 10'000;
constexpr double c2_target_per = 1e-2;
constexpr uint64_t c2_min_errors = 200;
constexpr double c2_half_width = 0.1;
constexpr double c3_confidence = 0.99;
constexpr uint64_t c3_trials = 2000;
constexpr double c4_target_ber = 1e-3;
constexpr uint64_t c4_trials = 3000;
constexpr double c4_siso_gap = 1.0, c4_siso_tol = 0.5;
constexpr double c4_div_gap = 2.0, c4_div_tol = 0.75;
constexpr double c4_mimo_simo_gap = 3.0, c4_mimo_simo_tol = 0.5;
constexpr double c5_target_per = 1e-3;
constexpr double c6_target_per = 1e-3;
constexpr uint64_t c6_min_errors = 100;
constexpr double c6_half_width = 0.25;
constexpr double long_target_per = 1e-5;
constexpr double long_tol_db = 1.0;
constexpr double c7_nlos_ds = 363e-9, c7_los_ds = 93e-9, c7_ds_tol = 1e-12;
constexpr double c7_fd_hi = 111.2, c7_fd_lo = 1.9, c7_fd_tol = 0.05;
constexpr uint32_t c7_realizations = 2000;
constexpr double c7_j0_tol = 0.05;

uint32_t g_workers = 0;

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(prec);
    os << v;
    return os.str();
}

std::string fmt(const std::optional<double>& v, int prec = 3) { return v ? fmt(*v, prec) : std::string("n/a"); }

void note(const std::string& s) { std::cout << "  " << s << "\n" << std::flush; }

struct verdict_t {
        bool pass{true};
        std::string summary;

        void check(bool ok, const std::string& what) {
            pass = pass && ok;
            note(std::string(ok ? "ok   " : "FAIL ") + what);
        }
};

std::vector<point_record_t> with_metric(std::vector<point_record_t> pts, double point_record_t::*field) {
    for (auto& p : pts) p.per = p.*field;
    return pts;
}

/// Crossing of the PER curve and of its lower / upper CI curves.
struct threshold_t {
        std::optional<double> lo, mid, hi;
        bool valid() const { return lo && mid && hi; }
};

threshold_t threshold(const std::vector<point_record_t>& pts, double target) {
    threshold_t t;
    t.lo = sim::snr_at(with_metric(pts, &point_record_t::per_ci_lo), target);
    t.mid = sim::snr_at(pts, target);
    t.hi = sim::snr_at(with_metric(pts, &point_record_t::per_ci_hi), target);
    return t;
}

std::string describe(const threshold_t& t) {
    return fmt(t.mid, 2) + " dB [" + fmt(t.lo, 2) + ", " + fmt(t.hi, 2) + "]";
}

std::string describe(const point_record_t& r) {
    return "snr " + fmt(r.snr_db, 1) + " trials " + std::to_string(r.trials) + " errors " +
           std::to_string(r.packet_errors) + " per " + fmt(r.per, 6);
}

/**
 * PER threshold in two passes. A cheap scan along the grid stops at the first point below the
 * target; the crossing interpolated from the scan is then re-measured with the fine stop rule at
 * +-half_width. While a CI curve fails to cross the target inside the measured span, one more
 * point is added 2 * half_width further out on that side, under a fresh seed.
 */
std::vector<point_record_t> locate_threshold(experiment_spec_t spec, double target, sim::stop_rule_t coarse,
                                             sim::stop_rule_t fine, double half_width) {
    const auto grid = spec.snr_db;
    spec.stop = coarse;
    spec.early_stop = false;
    std::vector<point_record_t> scan;
    {
        const sim::simulator_t s(spec, g_workers);
        for (size_t i = 0; i < grid.size(); ++i) {
            scan.push_back(s.run_point(i).front());
            note(spec.name + " scan " + describe(scan.back()));
            if (scan.back().per < target) break;
        }
    }
    if (scan.size() < 2 || scan.back().per >= target) {
        note(spec.name + ": grid does not bracket the target");
        return {};
    }
    const double x0 = sim::snr_at({scan.end() - 2, scan.end()}, target).value_or(scan.back().snr_db);

    uint64_t seed_offset = 0;
    auto run = [&](std::vector<double> snrs) {
        auto f = spec;
        f.stop = fine;
        f.snr_db = std::move(snrs);
        f.master_seed = spec.master_seed + ++seed_offset;
        auto c = sim::run_sweep(f, g_workers).series.front().points;
        for (const auto& r : c) note(spec.name + " fine " + describe(r));
        return c;
    };
    auto pts = run({x0 - half_width, x0 + half_width});
    for (int extend = 0; extend < c_max_extensions; ++extend) {
        std::vector<double> extra;
        if (pts.front().per_ci_lo < target) extra.push_back(pts.front().snr_db - 2.0 * half_width);
        if (pts.back().per_ci_hi >= target) extra.push_back(pts.back().snr_db + 2.0 * half_width);
        if (extra.empty()) break;
        for (const auto& r : run(extra)) pts.push_back(r);
        std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.snr_db < y.snr_db; });
    }
    return pts;
}

// ---------------------------------------------------------------------------------------------

verdict_t criterion1() {
    verdict_t v;
    std::vector<std::pair<std::string, packet_format_t>> formats;
    for (const auto f : {format_name_t::format0, format_name_t::format1, format_name_t::format2})
        for (const uint32_t tx : {1u, 2u})
            formats.emplace_back(std::string(to_string(f)) + " " + std::to_string(tx) + "tx", preset_format(f, tx));
    for (uint32_t m = 0; m <= 9; ++m) formats.emplace_back("MCS " + std::to_string(m), mcs_format(m));

    std::mt19937_64 rng(20201);
    uint64_t failures = 0, total = 0;
    for (const auto& [name, f] : formats) {
        coding::transport_codec_t codec({f.tbs_bits, payload_capacity_bits(f), bits_per_symbol(f.modulation)});
        uint64_t bad = 0;
        bits_t payload(f.tbs_bits);
        llrs_t llr(codec.config().coded_bits);
        for (uint32_t b = 0; b < c1_blocks; ++b) {
            for (auto& x : payload) x = static_cast<uint8_t>(rng() & 1u);
            const auto coded = codec.encode(payload, 0);
            for (size_t i = 0; i < coded.size(); ++i) llr[i] = coded[i] ? -1.0e3f : 1.0e3f;
            auto buf = codec.make_soft_buffer();
            codec.harq_accumulate(buf, llr, 0);
            const auto d = codec.decode(buf);
            bad += !(d.crc_pass && d.payload == payload);
        }
        failures += bad;
        total += c1_blocks;
        v.check(bad == 0, name + ": TBS " + std::to_string(f.tbs_bits) + ", G " +
                              std::to_string(codec.config().coded_bits) + ", " + std::to_string(bad) + " / " +
                              std::to_string(c1_blocks) + " failures");
    }
    // full chain, noise-free apart from a +60 dB floor
    for (const auto f : {format_name_t::format0, format_name_t::format1, format_name_t::format2}) {
        for (const uint32_t tx : {1u, 2u}) {
            experiment_spec_t s;
            s.name = std::string(to_string(f)) + "_awgn60";
            s.format = preset_format(f, tx);
            s.channel = sim::channel_kind_t::awgn;
            s.n_rx = tx;
            s.csi = sim::csi_selection_t::perfect;
            s.snr_db = {60.0};
            s.stop = {1, 50};
            const auto r = sim::run_sweep(s, g_workers).series.front().points.front();
            failures += r.packet_errors;
            total += r.trials;
            v.check(r.packet_errors == 0 && r.trials == 50,
                    s.name + " " + std::to_string(tx) + "tx full chain: " + describe(r));
        }
    }
    v.summary = std::to_string(failures) + " failures in " + std::to_string(total) + " transport blocks";
    return v;
}

verdict_t criterion2() {
    verdict_t v;
    const auto specs = sim::experiment_preset("fig2-awgn-mcs");
    std::vector<threshold_t> th;
    for (const auto& s : specs) {
        const auto pts = locate_threshold(s, c2_target_per, {40, 2000}, {c2_min_errors, 400'000}, c2_half_width);
        th.push_back(threshold(pts, c2_target_per));
        bool enough = !pts.empty();
        for (const auto& p : pts) enough = enough && p.packet_errors >= c2_min_errors;
        v.check(th.back().valid(), s.name + " PER 1e-2 at " + describe(th.back()));
        v.check(enough, s.name + " bracketing points have >= " + std::to_string(c2_min_errors) + " errors");
    }
    for (size_t m = 0; m + 1 < th.size(); ++m) {
        const bool ok = th[m].valid() && th[m + 1].valid() && *th[m].hi < *th[m + 1].lo;
        v.check(ok, "MCS " + std::to_string(m) + " < MCS " + std::to_string(m + 1) + ": " + fmt(th[m].hi, 2) +
                        " < " + fmt(th[m + 1].lo, 2));
    }
    v.summary = "thresholds at PER 1e-2 strictly increasing over MCS 0-9";
    return v;
}

/// Closed-form BER of coherent BPSK / Gray QPSK per bit with L-branch MRC on i.i.d. Rayleigh.
double rayleigh_mrc_ber(double gamma_bit, uint32_t L) {
    const double mu = std::sqrt(gamma_bit / (1.0 + gamma_bit));
    double sum = 0.0, binom = 1.0;
    for (uint32_t k = 0; k < L; ++k) {
        if (k > 0) binom = binom * (L - 1 + k) / k;
        sum += binom * std::pow((1.0 + mu) / 2.0, k);
    }
    return std::pow((1.0 - mu) / 2.0, L) * sum;
}

verdict_t criterion3() {
    verdict_t v;
    const std::pair<uint32_t, std::vector<double>> cases[] = {
        {1, {0.0, 5.0, 10.0, 15.0, 20.0}}, {2, {0.0, 3.0, 6.0, 9.0, 12.0}}, {4, {-3.0, 0.0, 3.0, 6.0, 9.0}}};
    for (const auto& [L, grid] : cases) {
        experiment_spec_t s;
        s.name = "rayleigh_1x" + std::to_string(L);
        s.format = preset_format(format_name_t::format0);
        s.channel = sim::channel_kind_t::iid_rayleigh;
        s.n_rx = L;
        s.csi = sim::csi_selection_t::perfect;
        s.measure = sim::measure_t::uncoded;
        s.snr_db = grid;
        s.stop = {~uint64_t{0}, c3_trials};
        const auto res = sim::run_sweep(s, g_workers);
        for (const auto& r : res.series.front().points) {
            const double pb = rayleigh_mrc_ber(std::pow(10.0, r.snr_db / 10.0) / 2.0, L);
            const auto [lo, hi] = sim::binomial_interval(r.lead_bit_errors, r.lead_bits, c3_confidence);
            const double sim_ber = static_cast<double>(r.lead_bit_errors) / r.lead_bits;
            v.check(lo <= pb && pb <= hi, s.name + " snr " + fmt(r.snr_db, 1) + ": closed form " + fmt(pb, 6) +
                                              ", simulated " + fmt(sim_ber, 6) + " 99% CI [" + fmt(lo, 6) + ", " +
                                              fmt(hi, 6) + "] over " + std::to_string(r.lead_bits) + " bits");
        }
    }
    v.summary = "closed-form diversity-L BER inside the 99% CI at all 15 points";
    return v;
}

verdict_t criterion4() {
    verdict_t v;
    struct cfg_t {
            std::string name;
            uint32_t tx, rx;
            std::vector<double> grid;
    };
    const cfg_t cfgs[] = {{"1x1", 1, 1, {24.0, 27.0, 30.0, 33.0}},
                          {"2x2", 2, 2, {6.0, 9.0, 12.0, 15.0}},
                          {"1x4", 1, 4, {3.0, 6.0, 9.0, 12.0}}};
    std::vector<std::optional<double>> perfect, wiener;
    for (const auto& c : cfgs) {
        experiment_spec_t s;
        s.name = "nlos_" + c.name;
        s.format = preset_format(format_name_t::format0, c.tx);
        s.channel = sim::channel_kind_t::nlos;
        s.n_rx = c.rx;
        s.csi = sim::csi_selection_t::paired;
        s.measure = sim::measure_t::uncoded;
        s.snr_db = c.grid;
        s.stop = {~uint64_t{0}, c4_trials};
        s.master_seed = 4;
        const auto res = sim::run_sweep(s, g_workers);
        for (const auto& series : res.series) {
            for (const auto& r : series.points)
                note(s.name + (series.csi == receiver::csi_mode_t::perfect ? " perfect" : " wiener ") + " snr " +
                     fmt(r.snr_db, 1) + " ber " + fmt(r.ber, 7));
        }
        perfect.push_back(sim::snr_at(res.curve(receiver::csi_mode_t::perfect).points, c4_target_ber, true));
        wiener.push_back(sim::snr_at(res.curve(receiver::csi_mode_t::wiener).points, c4_target_ber, true));
        note(s.name + " BER 1e-3: perfect " + fmt(perfect.back(), 2) + " dB, wiener " + fmt(wiener.back(), 2) + " dB");
    }
    auto gap_check = [&](const std::string& what, std::optional<double> a, std::optional<double> b, double want,
                         double tol) {
        const bool ok = a && b && std::abs((*a - *b) - want) <= tol;
        v.check(ok, what + " gap " + (a && b ? fmt(*a - *b, 2) : std::string("n/a")) + " dB, want " + fmt(want, 2) +
                        " +- " + fmt(tol, 2));
    };
    gap_check("1x1 wiener vs perfect", wiener[0], perfect[0], c4_siso_gap, c4_siso_tol);
    gap_check("2x2 wiener vs perfect", wiener[1], perfect[1], c4_div_gap, c4_div_tol);
    gap_check("1x4 wiener vs perfect", wiener[2], perfect[2], c4_div_gap, c4_div_tol);
    gap_check("perfect 2x2 vs 1x4", perfect[1], perfect[2], c4_mimo_simo_gap, c4_mimo_simo_tol);
    v.summary = "Wiener loss and MIMO/SIMO gap at BER 1e-3";
    return v;
}

/// Long-run PER 1e-5 threshold on a grid around `want`.
void long_threshold(verdict_t& v, experiment_spec_t s, double want) {
    s.snr_db.clear();
    for (double x = want - 2.0; x <= want + 2.0 + 1e-9; x += 0.5) s.snr_db.push_back(x);
    s.stop = {100, 10'000'000};
    s.early_stop = true;
    const auto pts = sim::run_sweep(s, g_workers, [](const auto& sp, auto, const point_record_t& r) {
                         note(sp.name + " long " + describe(r));
                     }).series.front().points;
    const auto t = sim::snr_at(pts, long_target_per);
    v.check(t && std::abs(*t - want) <= long_tol_db,
            s.name + " PER 1e-5 at " + fmt(t, 2) + " dB, want " + fmt(want, 1) + " +- " + fmt(long_tol_db, 1));
}

verdict_t criterion5(bool long_run) {
    verdict_t v;
    const auto specs = sim::experiment_preset("fig4-format0-nlos");
    auto find = [&](const std::string& suffix) {
        for (const auto& s : specs)
            if (s.name.ends_with(suffix)) return s;
        throw config_error("preset experiment " + suffix + " missing");
    };
    auto h0 = find("_2x2_harq0");
    auto h2 = find("_2x2_harq2");
    for (auto* s : {&h0, &h2}) {
        s->snr_db = {-4.0, -2.0, 0.0, 2.0, 4.0};
        s->stop = {100, 4000};
        s->early_stop = false;
    }
    const auto p0 = sim::run_sweep(h0, g_workers).series.front().points;
    const auto p2 = sim::run_sweep(h2, g_workers).series.front().points;
    for (size_t i = 0; i < p0.size(); ++i) {
        v.check(p2[i].per_ci_hi < p0[i].per_ci_lo,
                "snr " + fmt(p0[i].snr_db, 1) + ": 2 retx PER " + fmt(p2[i].per, 5) + " [" + fmt(p2[i].per_ci_lo, 5) +
                    ", " + fmt(p2[i].per_ci_hi, 5) + "] below 0 retx PER " + fmt(p0[i].per, 5) + " [" +
                    fmt(p0[i].per_ci_lo, 5) + ", " + fmt(p0[i].per_ci_hi, 5) + "]");
    }
    // interpolated PER 1e-3 points, reported only
    for (auto s : {h0, h2}) {
        s.snr_db.clear();
        for (double x = s.name.ends_with("harq0") ? 2.0 : -4.0; x <= 14.0; x += 2.0) s.snr_db.push_back(x);
        const auto pts = locate_threshold(s, c5_target_per, {20, 3000}, {30, 30'000}, 0.5);
        note(s.name + " PER 1e-3 at " + describe(threshold(pts, c5_target_per)) + " (reported)");
    }
    if (long_run) {
        long_threshold(v, find("_2x2_harq0"), 11.0);
        long_threshold(v, find("_2x2_harq2"), 2.5);
    }
    v.summary = std::string("PER with 2 retransmissions below PER without, disjoint 95% CIs") +
                (long_run ? "; PER 1e-5 targets" : "");
    return v;
}

verdict_t criterion6(bool long_run) {
    verdict_t v;
    auto harq0 = [](const std::string& preset, const std::string& ch) {
        for (auto s : sim::experiment_preset(preset))
            if (s.name.ends_with("_" + ch + "_harq0")) return s;
        throw config_error(preset + ": no " + ch + " experiment");
    };
    auto measure = [&](experiment_spec_t s) {
        const auto t = threshold(locate_threshold(s, c6_target_per, {20, 4000}, {c6_min_errors, 100'000}, c6_half_width), c6_target_per);
        note(s.name + " PER 1e-3 at " + describe(t));
        return t;
    };
    const auto f2_los = measure(harq0("fig5-format2-simo", "los"));
    const auto f2_nlos = measure(harq0("fig5-format2-simo", "nlos"));
    const auto f1_los = measure(harq0("fig5-format1-simo", "los"));
    const auto f1_nlos = measure(harq0("fig5-format1-simo", "nlos"));
    auto below = [&](const threshold_t& a, const threshold_t& b, const std::string& what) {
        v.check(a.hi && b.lo && *a.hi < *b.lo, what + ": " + fmt(a.hi, 2) + " < " + fmt(b.lo, 2));
    };
    below(f2_los, f2_nlos, "Format 2 LOS below NLOS");
    below(f2_los, f1_los, "Format 1 LOS above Format 2 LOS");
    below(f2_nlos, f1_nlos, "Format 1 NLOS above Format 2 NLOS");

    if (long_run) {
        for (const auto& s : sim::experiment_preset("fig5-format2-simo")) {
            const bool los = s.name.find("_los_") != std::string::npos;
            const bool retx = s.name.ends_with("harq1");
            long_threshold(v, s, los ? (retx ? -2.5 : 2.0) : (retx ? -2.0 : 3.5));
        }
    }
    v.summary = std::string("LOS < NLOS and Format 1 > Format 2 at PER 1e-3") + (long_run ? "; PER 1e-5 targets" : "");
    return v;
}

verdict_t criterion7() {
    verdict_t v;
    const auto nlos = channel::builtin_profile("TDL-iii");
    const auto los = channel::builtin_profile("TDL-v");
    v.check(std::abs(nlos.rms_delay_spread() - c7_nlos_ds) <= c7_ds_tol,
            "TDL-iii RMS delay spread " + fmt(nlos.rms_delay_spread() * 1e9, 6) + " ns");
    v.check(std::abs(los.rms_delay_spread() - c7_los_ds) <= c7_ds_tol,
            "TDL-v RMS delay spread " + fmt(los.rms_delay_spread() * 1e9, 6) + " ns");
    const double hi = channel::max_doppler(30.0 / 3.6, 4.0e9);
    const double lo = channel::max_doppler(3.0 / 3.6, 700.0e6);
    v.check(std::abs(hi - c7_fd_hi) <= c7_fd_tol, "30 km/h at 4 GHz: " + fmt(hi, 3) + " Hz");
    v.check(std::abs(lo - c7_fd_lo) <= c7_fd_tol, "3 km/h at 700 MHz: " + fmt(lo, 3) + " Hz");

    // Jakes autocorrelation of a single Rayleigh tap, lags up to 2 / fd
    const double fd = c7_fd_hi;
    const auto flat = channel::flat_profile();
    std::vector<double> lags;
    for (double x = 0.0; x <= 2.0 + 1e-9; x += 0.05) lags.push_back(x / fd);
    std::vector<cd_t> corr(lags.size());
    double power = 0.0;
    for (uint32_t n = 0; n < c7_realizations; ++n) {
        const auto h = channel::generate_channel(flat, {fd}, 1, 1, 1, 7000 + n);
        const cd_t a = h.gain(0, 0, 0, 0.0);
        power += std::norm(a);
        for (size_t i = 0; i < lags.size(); ++i) corr[i] += h.gain(0, 0, 0, lags[i]) * std::conj(a);
    }
    double worst = 0.0, worst_lag = 0.0;
    for (size_t i = 0; i < lags.size(); ++i) {
        const double dev = std::abs(corr[i] / power - std::cyl_bessel_j(0.0, 2.0 * M_PI * fd * lags[i]));
        if (dev > worst) worst = dev, worst_lag = lags[i] * fd;
    }
    v.check(worst <= c7_j0_tol, "Jakes autocorrelation vs J0 over " + std::to_string(c7_realizations) +
                                    " realizations: max deviation " + fmt(worst, 4) + " at fd*tau " +
                                    fmt(worst_lag, 2));
    v.summary = "delay spreads, Doppler bounds and J0 autocorrelation";
    return v;
}

verdict_t criterion8() {
    verdict_t v;
    const uint32_t many = std::max(3u, g_workers);
    for (const auto& preset : sim::preset_names()) {
        bool same = true;
        uint64_t trials = 0;
        for (auto s : sim::experiment_preset(preset)) {
            s.stop = {10, 24};
            s.batch_size = 4;
            const auto a = sim::run_sweep(s, 1);
            const auto b = sim::run_sweep(s, many);
            same = same && a.series == b.series;
            for (const auto& c : a.series)
                for (const auto& p : c.points) trials += p.trials;
        }
        v.check(same, preset + ": 1 vs " + std::to_string(many) + " workers, " + std::to_string(trials) +
                          " trials per run, counters identical");
    }
    v.summary = "identical counters across worker counts for every preset";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int criterion = 0;
    bool long_run = false;
    app.add_option("--criterion", criterion, "criterion number")->required()->check(CLI::Range(1, 8));
    app.add_flag("--long", long_run, "also run the PER 1e-5 targets of criteria 5 and 6 (hours)");
    app.add_option("--workers", g_workers, "worker threads (default: hardware concurrency)");
    CLI11_PARSE(app, argc, argv);
    if (g_workers == 0) g_workers = std::max(1u, std::thread::hardware_concurrency());

    const std::function<verdict_t()> run[] = {criterion1,
                                              criterion2,
                                              criterion3,
                                              criterion4,
                                              [&] { return criterion5(long_run); },
                                              [&] { return criterion6(long_run); },
                                              criterion7,
                                              criterion8};
    try {
        const auto v = run[criterion - 1]();
        std::cout << "criterion " << criterion << ": " << (v.pass ? "PASS" : "FAIL") << " " << v.summary << "\n";
        return v.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cout << "criterion " << criterion << ": FAIL " << e.what() << "\n";
        return 1;
    }
}
