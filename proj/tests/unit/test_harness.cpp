// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dectsim/sim/experiment.hpp"
#include "dectsim/sim/harness.hpp"
#include "dectsim/sim/results.hpp"

using namespace dectsim;
using namespace dectsim::sim;
namespace fs = std::filesystem;

namespace {

experiment_spec_t small_spec(format_name_t f, channel_kind_t ch, std::vector<double> grid) {
    experiment_spec_t s;
    s.name = "small";
    s.format = preset_format(f);
    s.channel = ch;
    s.snr_db = std::move(grid);
    s.stop = {20, 200};
    s.batch_size = 8;
    return s;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dectsim_test_" + name);
    fs::remove_all(p);
    return p;
}

// CI-aware "a is not above b": a violation needs a's interval entirely above b's.
bool not_above(const point_record_t& a, const point_record_t& b) { return a.per_ci_lo <= b.per_ci_hi; }

}  // namespace

TEST_CASE("Wilson interval") {
    // statsmodels proportion_confint(37, 1000, method="wilson")
    const auto [lo, hi] = wilson_interval(37, 1000);
    CHECK(lo == doctest::Approx(0.026961180875554734).epsilon(1e-9));
    CHECK(hi == doctest::Approx(0.05058239748206931).epsilon(1e-9));

    const auto z = wilson_interval(0, 500);
    CHECK(z.first == 0.0);
    CHECK(z.second == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 500)));

    double prev = 1.0;
    for (uint64_t n = 100; n <= 1'000'000; n *= 10) {
        const auto [a, b] = wilson_interval(n / 50, n);
        CHECK(b - a < prev);
        prev = b - a;
    }
}

TEST_CASE("Clopper-Pearson interval") {
    // scipy.stats.beta.ppf
    struct row_t {
            uint64_t k, n;
            double conf, lo, hi;
    };
    const row_t rows[] = {{5, 10, 0.95, 0.18708602844739855, 0.8129139715526015},
                          {3, 1000, 0.99, 0.00033814452906649344, 0.01093377742040524},
                          {200, 100000, 0.99, 0.0016547914570513944, 0.0023934700776251775},
                          {10, 10, 0.95, 0.6915028921812392, 1.0}};
    for (const auto& r : rows) {
        const auto [lo, hi] = binomial_interval(r.k, r.n, r.conf);
        CHECK(lo == doctest::Approx(r.lo).epsilon(1e-8));
        CHECK(hi == doctest::Approx(r.hi).epsilon(1e-8));
    }
    const auto z = binomial_interval(0, 10, 0.95);
    CHECK(z.first == 0.0);
    CHECK(z.second == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
}

TEST_CASE("experiment validation") {
    auto s = small_spec(format_name_t::format0, channel_kind_t::awgn, {0.0});
    CHECK_NOTHROW(validate(s));
    auto e = s;
    e.snr_db = {};
    CHECK_THROWS_AS(validate(e), validation_error);
    e.snr_db = {1.0, 1.0};
    CHECK_THROWS_AS(validate(e), validation_error);
    e = s;
    e.stop.min_errors = 0;
    CHECK_THROWS_AS(validate(e), validation_error);
    e = s;
    e.measure = measure_t::uncoded;
    e.harq_max_retx = 1;
    CHECK_THROWS_AS(validate(e), validation_error);
    e = s;
    e.csi = csi_selection_t::paired;
    CHECK_THROWS_AS(validate(e), validation_error);
    CHECK_THROWS_AS(simulator_t(s, 0), validation_error);
}

TEST_CASE("noiseless trials succeed on the first transmission") {
    for (const auto f : {format_name_t::format0, format_name_t::format1, format_name_t::format2}) {
        for (const auto ch : {channel_kind_t::awgn, channel_kind_t::nlos, channel_kind_t::los}) {
            auto s = small_spec(f, ch, {60.0});
            s.harq_max_retx = 1;
            const simulator_t sim(s);
            for (uint64_t t = 0; t < 3; ++t) {
                const auto r = sim.run_trial(60.0, 0, t);
                REQUIRE(r.size() == 1);
                CHECK(r[0].success);
                CHECK(r[0].n_transmissions == 1);
                CHECK(r[0].bit_errors == 0);
            }
        }
    }
}

TEST_CASE("HARQ budget bounds the transmission count") {
    auto s = small_spec(format_name_t::format0, channel_kind_t::awgn, {-10.0});
    const simulator_t none(s);
    s.harq_max_retx = 2;
    const simulator_t two(s);
    for (uint64_t t = 0; t < 5; ++t) {
        const auto a = none.run_trial(-10.0, 0, t)[0];
        CHECK(!a.success);
        CHECK(a.n_transmissions == 1);
        const auto b = two.run_trial(-10.0, 0, t)[0];
        CHECK(!b.success);
        CHECK(b.n_transmissions == 3);
    }
}

TEST_CASE("trials are deterministic") {
    auto s = small_spec(format_name_t::format2, channel_kind_t::nlos, {-2.0});
    s.n_rx = 2;
    s.harq_max_retx = 1;
    for (uint64_t t = 0; t < 4; ++t) {
        const auto a = run_trial(s, -2.0, 0, t)[0];
        const auto b = run_trial(s, -2.0, 0, t)[0];
        CHECK(a.success == b.success);
        CHECK(a.n_transmissions == b.n_transmissions);
        CHECK(a.bit_errors == b.bit_errors);
    }
}

TEST_CASE("stop rule") {
    SUBCASE("min errors") {
        auto s = small_spec(format_name_t::format0, channel_kind_t::awgn, {-10.0});
        s.stop = {7, 1000};
        const auto p = simulator_t(s).run_point(0)[0];
        CHECK(p.trials == 7);
        CHECK(p.packet_errors == 7);
        CHECK(p.per == 1.0);
    }
    SUBCASE("max trials with zero errors") {
        auto s = small_spec(format_name_t::format0, channel_kind_t::awgn, {20.0});
        s.stop = {5, 40};
        const auto p = simulator_t(s).run_point(0)[0];
        CHECK(p.trials == 40);
        CHECK(p.packet_errors == 0);
        CHECK(p.per == 0.0);
        CHECK(p.per_ci_lo == 0.0);
        CHECK(p.per_ci_hi == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 40)));
    }
}

TEST_CASE("record invariants and worker independence") {
    auto s = small_spec(format_name_t::format0, channel_kind_t::nlos, {0.0, 3.0});
    s.harq_max_retx = 2;
    s.stop = {10, 60};
    s.batch_size = 4;
    const auto one = run_sweep(s, 1);
    const auto three = run_sweep(s, 3);
    REQUIRE(one.series.size() == 1);
    CHECK(one.series == three.series);
    for (const auto& p : one.series[0].points) {
        CHECK(p.per == doctest::Approx(static_cast<double>(p.packet_errors) / p.trials));
        CHECK(p.per >= 0.0);
        CHECK(p.per <= 1.0);
        uint64_t sum = 0;
        for (auto h : p.harq_histogram) sum += h;
        CHECK(sum == p.trials);
        CHECK(p.harq_histogram.size() == 3);
        CHECK(p.harq_mean_tx() >= 1.0);
        CHECK(p.harq_mean_tx() <= 3.0);
    }
}

TEST_CASE("paired CSI series come from the same trials") {
    experiment_spec_t s = experiment_preset("fig3-rayleigh-wiener").front();
    s.snr_db = {6.0, 12.0};
    s.stop = {200, 30};
    const auto r = run_sweep(s, 1);
    REQUIRE(r.series.size() == 2);
    const auto& w = r.curve(receiver::csi_mode_t::wiener);
    const auto& p = r.curve(receiver::csi_mode_t::perfect);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(w.points[i].trials == p.points[i].trials);
        CHECK(w.points[i].bits_total == p.points[i].bits_total);
        CHECK(w.points[i].lead_bits * 2 == w.points[i].bits_total);
    }
    CHECK(p.points[1].ber < p.points[0].ber);
}

TEST_CASE("different master seeds agree statistically") {
    auto s = small_spec(format_name_t::format2, channel_kind_t::awgn, {-5.0});
    s.stop = {60, 400};
    auto t = s;
    t.master_seed = 99;
    const auto a = simulator_t(s).run_point(0)[0];
    const auto b = simulator_t(t).run_point(0)[0];
    CHECK(a.packet_errors != 0);
    CHECK(!(a == b));
    CHECK(a.per_ci_lo <= b.per_ci_hi);
    CHECK(b.per_ci_lo <= a.per_ci_hi);
}

TEST_CASE("PER falls along the grid and with HARQ") {
    auto s = small_spec(format_name_t::format2, channel_kind_t::nlos, {-6.0, -4.0, -2.0});
    s.n_rx = 4;
    s.stop = {30, 300};
    const auto r0 = run_sweep(s).series[0].points;
    s.harq_max_retx = 1;
    const auto r1 = run_sweep(s).series[0].points;
    for (size_t i = 0; i + 1 < r0.size(); ++i) {
        CHECK(not_above(r0[i + 1], r0[i]));
        CHECK(not_above(r1[i + 1], r1[i]));
    }
    for (size_t i = 0; i < r0.size(); ++i) CHECK(not_above(r1[i], r0[i]));
}

TEST_CASE("shipped presets are valid and short runs are monotone") {
    for (const auto& name : preset_names()) {
        const auto specs = experiment_preset(name);
        REQUIRE(!specs.empty());
        for (const auto& s : specs) CHECK_NOTHROW(validate(s));

        auto s = specs.front();
        s.snr_db.resize(3);
        s.stop = {s.stop.min_errors, s.measure == measure_t::uncoded ? 20u : 60u};
        s.early_stop = false;
        const auto r = run_sweep(s);
        for (const auto& series : r.series) {
            for (size_t i = 0; i + 1 < series.points.size(); ++i) {
                const auto& a = series.points[i];
                const auto& b = series.points[i + 1];
                if (s.measure == measure_t::uncoded) {
                    const auto ia = binomial_interval(a.lead_bit_errors, a.lead_bits, 0.99);
                    const auto ib = binomial_interval(b.lead_bit_errors, b.lead_bits, 0.99);
                    CHECK_MESSAGE(ib.first <= ia.second, s.name);
                } else {
                    CHECK_MESSAGE(not_above(b, a), s.name);
                }
            }
        }
    }
    CHECK_THROWS_AS(experiment_preset("fig9"), config_error);
}

TEST_CASE("experiment JSON round trip") {
    for (const auto& name : preset_names()) {
        for (const auto& s : experiment_preset(name)) {
            const auto back = experiment_from_json(to_json(s));
            CHECK_MESSAGE(back == s, s.name);
        }
    }
    auto j = to_json(experiment_preset("fig2-awgn-mcs").front());
    j["snr_db"] = nlohmann::json{{"start", 0.0}, {"stop", 2.0}, {"step", 0.5}};
    CHECK(experiment_from_json(j).snr_db == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    j["channel"] = "rician";
    CHECK_THROWS_AS(experiment_from_json(j), config_error);
}

TEST_CASE("experiment files") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    const auto path = (dir / "exp.json").string();
    nlohmann::json j{{"experiments", nlohmann::json::array()}};
    for (const auto& s : experiment_preset("fig5-format1-simo")) j["experiments"].push_back(to_json(s));
    std::ofstream(path) << j.dump();
    const auto loaded = load_experiments(path);
    CHECK(loaded == experiment_preset("fig5-format1-simo"));
    CHECK_THROWS_AS(load_experiment(path), config_error);

    std::ofstream(path) << "{\"format\": \"Format0\", \"channel\": \"nlos\", \"snr_db\": [2, 1]}";
    try {
        load_experiment(path);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
        CHECK(std::string(e.what()).find("snr") != std::string::npos);
    }
    CHECK_THROWS_AS(load_experiment((dir / "missing.json").string()), io_error);
    fs::remove_all(dir);
}

TEST_CASE("result persistence") {
    auto s = small_spec(format_name_t::format0, channel_kind_t::awgn, {-3.0, -2.0, -1.0});
    s.name = "persist";
    s.harq_max_retx = 1;
    const auto r = run_sweep(s);
    const auto dir = scratch("persist");
    const auto files = persist_results(r, dir.string());
    REQUIRE(files.size() == 1);
    CHECK(fs::path(files[0].csv).filename() == "persist.csv");

    std::ifstream in(files[0].csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "snr_db,trials,packet_errors,per,per_ci_lo,per_ci_hi,ber,harq_mean_tx");
    CHECK(read_csv(files[0].csv).size() == s.snr_db.size());

    const auto back = load_results(files[0].sidecar);
    CHECK(back.spec == s);
    CHECK(back.series == r.series[0]);

    // persisting does not perturb later runs
    CHECK(run_sweep(s).series == r.series);

    SUBCASE("paired runs write one file pair per CSI mode") {
        auto p = experiment_preset("fig3-rayleigh-wiener").front();
        p.snr_db = {10.0};
        p.stop = {1, 2};
        const auto pf = persist_results(run_sweep(p), dir.string());
        REQUIRE(pf.size() == 2);
        CHECK(fs::path(pf[0].csv).filename() == p.name + "_wiener.csv");
        CHECK(fs::path(pf[1].csv).filename() == p.name + "_perfect.csv");
        CHECK(load_results(pf[1].sidecar).series.csi == receiver::csi_mode_t::perfect);
    }
    SUBCASE("errors carry the path") {
        std::ofstream(dir / "bad.csv") << "snr_db,trials,per\n1,2,0.5\n";
        try {
            read_csv((dir / "bad.csv").string());
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
            CHECK(std::string(e.what()).find("packet_errors") != std::string::npos);
        }
        CHECK_THROWS_AS(load_results((dir / "none.json").string()), io_error);
        std::ofstream(dir / "blocker") << "x";
        CHECK_THROWS_AS(persist_results(r, (dir / "blocker" / "sub").string()), io_error);
    }
    fs::remove_all(dir);
}

TEST_CASE("waveform dump") {
    auto s = small_spec(format_name_t::format2, channel_kind_t::awgn, {0.0});
    s.format = preset_format(format_name_t::format2, 2);
    const simulator_t sim(s);
    const auto w = sim.transmit_waveform(0, 0);
    const auto dir = scratch("dump");
    dump_waveform(w, s.format, 7, (dir / "w").string());
    const auto bin = dir / "w.cf32";
    REQUIRE(fs::exists(bin));
    CHECK(fs::file_size(bin) == w.antennas.size() * w.n_samples() * 8);

    std::ifstream in(bin, std::ios::binary);
    std::vector<unsigned char> raw(fs::file_size(bin));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    auto sample = [&](size_t ant, size_t n) {
        const size_t off = (ant * w.n_samples() + n) * 8;
        uint32_t u[2];
        for (int k = 0; k < 2; ++k) {
            u[k] = 0;
            for (int b = 3; b >= 0; --b) u[k] = (u[k] << 8) | raw[off + 4 * k + b];
        }
        float f[2];
        std::memcpy(f, u, 8);
        return cf_t(f[0], f[1]);
    };
    CHECK(sample(0, 1000) == w.antennas[0][1000]);
    CHECK(sample(1, 2345) == w.antennas[1][2345]);

    nlohmann::json side;
    std::ifstream(dir / "w.json") >> side;
    CHECK(side["sample_rate_hz"].get<double>() == doctest::Approx(27.648e6));
    CHECK(side["n_antennas"].get<int>() == 2);
    CHECK(side["n_samples"].get<size_t>() == w.n_samples());
    CHECK(side["seed"].get<int>() == 7);
    CHECK(format_from_json(side["format"]) == s.format);
    fs::remove_all(dir);
}

TEST_CASE("threshold interpolation") {
    auto pt = [](double snr, double per) {
        point_record_t p;
        p.snr_db = snr;
        p.per = per;
        p.ber = per / 10;
        return p;
    };
    const std::vector<point_record_t> c = {pt(0, 0.5), pt(1, 0.1), pt(2, 0.001), pt(3, 0.0)};
    CHECK(*snr_at(c, 0.1) == doctest::Approx(1.0));
    CHECK(*snr_at(c, 0.01) == doctest::Approx(1.5));
    CHECK(*snr_at(c, 1e-4) == doctest::Approx(3.0));
    CHECK(*snr_at(c, 1e-3, true) == doctest::Approx(1.5));
    CHECK(!snr_at(c, 0.9));
    CHECK(!snr_at({pt(0, 0.5)}, 0.1));
}
