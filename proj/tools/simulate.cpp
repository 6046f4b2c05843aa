// SPDX-License-Identifier: Apache-2.0
//
// simulate --config <file> --out <dir> [--workers N] [--seed S] [--preset NAME] [--csi MODE]
// Exit codes: 0 done, 1 bad arguments, 2 config error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "dectsim/common/types.hpp"
#include "dectsim/sim/experiment.hpp"
#include "dectsim/sim/harness.hpp"
#include "dectsim/sim/results.hpp"

using namespace dectsim;

namespace {

constexpr int exit_config = 2;
constexpr int exit_io = 3;

struct options_t {
        std::string config;
        std::string out;
        std::string preset;
        std::string csi;
        std::string only;
        std::string export_path;
        uint32_t workers{0};
        std::optional<uint64_t> seed;
        std::optional<uint64_t> min_errors;
        std::optional<uint64_t> max_trials;
        bool dump_waveform{false};
        bool list{false};
        bool quiet{false};
};

std::vector<sim::experiment_spec_t> gather(const options_t& o) {
    std::vector<sim::experiment_spec_t> specs;
    if (!o.config.empty()) specs = sim::load_experiments(o.config);
    if (!o.preset.empty()) {
        auto p = sim::experiment_preset(o.preset);
        specs.insert(specs.end(), p.begin(), p.end());
    }
    if (!o.only.empty()) {
        std::erase_if(specs, [&](const auto& s) { return s.name != o.only; });
        if (specs.empty()) throw config_error("--only: no experiment named '" + o.only + "'");
    }
    for (auto& s : specs) {
        if (o.seed) s.master_seed = *o.seed;
        if (o.min_errors) s.stop.min_errors = *o.min_errors;
        if (o.max_trials) s.stop.max_trials = *o.max_trials;
        if (!o.csi.empty()) s.csi = sim::csi_from_string(o.csi);
        try {
            sim::validate(s);
        } catch (const validation_error& e) {
            throw config_error("experiment " + s.name + ": " + e.what());
        }
    }
    return specs;
}

int run(const options_t& o) {
    if (o.list) {
        for (const auto& n : sim::preset_names()) std::cout << n << "\n";
        return 0;
    }
    const auto specs = gather(o);
    if (specs.empty()) throw config_error("no experiments: give --config or --preset");

    if (!o.export_path.empty()) {
        nlohmann::json j{{"experiments", nlohmann::json::array()}};
        for (const auto& s : specs) j["experiments"].push_back(sim::to_json(s));
        std::ofstream out(o.export_path);
        if (!out) throw io_error(o.export_path + ": cannot open for writing");
        out << j.dump(2) << "\n";
        if (!out) throw io_error(o.export_path + ": write failed");
        return 0;
    }
    if (o.out.empty()) throw config_error("--out is required");

    const uint32_t workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
    std::mutex log_mu;
    for (const auto& spec : specs) {
        sim::simulator_t simulator(spec, workers);
        if (o.dump_waveform) {
            const auto w = simulator.transmit_waveform(0, 0);
            const auto stem = (std::filesystem::path(o.out) / (spec.name + "_waveform")).string();
            sim::dump_waveform(w, spec.format, spec.master_seed, stem);
        }
        const auto result = simulator.run_sweep([&](const auto& s, receiver::csi_mode_t csi, const auto& r) {
            if (o.quiet) return;
            const bool uncoded = s.measure == sim::measure_t::uncoded;
            std::lock_guard lock(log_mu);
            std::cout << "experiment=" << s.name << " csi=" << (csi == receiver::csi_mode_t::perfect ? "perfect" : "wiener")
                      << " point=" << r.snr_db << " trials=" << r.trials
                      << " errors=" << (uncoded ? r.bit_errors : r.packet_errors) << "\n"
                      << std::flush;
        });
        for (const auto& f : sim::persist_results(result, o.out)) {
            if (!o.quiet) std::cout << "wrote " << f.csv << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DECT-2020 NR link-level simulator"};
    options_t o;
    app.add_option("--config", o.config, "experiment JSON (one object or {\"experiments\": [...]})");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--workers", o.workers, "worker threads (default: hardware concurrency)");
    app.add_option("--seed", o.seed, "override master seed");
    app.add_option("--preset", o.preset, "shipped experiment preset");
    app.add_option("--csi", o.csi, "override CSI mode")->check(CLI::IsMember({"perfect", "wiener", "paired"}));
    app.add_option("--only", o.only, "run only the experiment with this name");
    app.add_option("--min-errors", o.min_errors, "override stop rule error count");
    app.add_option("--max-trials", o.max_trials, "override stop rule trial cap");
    app.add_option("--export", o.export_path, "write the resolved experiments as JSON and exit");
    app.add_flag("--dump-waveform", o.dump_waveform, "write one transmit waveform per experiment");
    app.add_flag("--list-presets", o.list, "print preset names and exit");
    app.add_flag("--quiet", o.quiet, "suppress progress lines");
    CLI11_PARSE(app, argc, argv);

    try {
        return run(o);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    }
}
