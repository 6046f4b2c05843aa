// SPDX-License-Identifier: Apache-2.0

#include "dectsim/sim/experiment.hpp"

#include <cmath>
#include <fstream>

#include "dectsim/channel/tap_profile.hpp"
#include "dectsim/common/types.hpp"

namespace dectsim::sim {

using nlohmann::json;

namespace {

constexpr channel_kind_t all_channels[] = {channel_kind_t::awgn, channel_kind_t::nlos, channel_kind_t::los,
                                           channel_kind_t::flat_rayleigh, channel_kind_t::iid_rayleigh};
constexpr csi_selection_t all_csi[] = {csi_selection_t::wiener, csi_selection_t::perfect, csi_selection_t::paired};

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    return g;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    return j[key].get<T>();
}

}  // namespace

std::string_view to_string(channel_kind_t c) {
    switch (c) {
        case channel_kind_t::awgn:
            return "awgn";
        case channel_kind_t::nlos:
            return "nlos";
        case channel_kind_t::los:
            return "los";
        case channel_kind_t::flat_rayleigh:
            return "flat_rayleigh";
        case channel_kind_t::iid_rayleigh:
            return "iid_rayleigh";
    }
    return "?";
}

channel_kind_t channel_from_string(std::string_view s) {
    for (const auto c : all_channels)
        if (s == to_string(c)) return c;
    throw validation_error("unknown channel '" + std::string(s) + "'");
}

std::string_view to_string(csi_selection_t c) {
    switch (c) {
        case csi_selection_t::wiener:
            return "wiener";
        case csi_selection_t::perfect:
            return "perfect";
        case csi_selection_t::paired:
            return "paired";
    }
    return "?";
}

csi_selection_t csi_from_string(std::string_view s) {
    for (const auto c : all_csi)
        if (s == to_string(c)) return c;
    throw validation_error("unknown CSI mode '" + std::string(s) + "'");
}

double experiment_spec_t::max_doppler_hz() const {
    if (channel == channel_kind_t::awgn || channel == channel_kind_t::iid_rayleigh) return 0.0;
    return channel::max_doppler(velocity_mps, carrier_hz);
}

receiver::wiener_design_t experiment_spec_t::wiener_design() const {
    return wiener ? *wiener : receiver::default_wiener_design(format);
}

bool experiment_spec_t::operator==(const experiment_spec_t& o) const {
    auto same_design = [](const std::optional<receiver::wiener_design_t>& a,
                          const std::optional<receiver::wiener_design_t>& b) {
        if (a.has_value() != b.has_value()) return false;
        if (!a) return true;
        return a->delay_spread_s == b->delay_spread_s && a->doppler_hz == b->doppler_hz && a->snr_db == b->snr_db &&
               a->pilots_per_symbol == b->pilots_per_symbol && a->diagonal_loading == b->diagonal_loading;
    };
    return name == o.name && format == o.format && mcs == o.mcs && channel == o.channel &&
           carrier_hz == o.carrier_hz && velocity_mps == o.velocity_mps && n_rx == o.n_rx && csi == o.csi &&
           measure == o.measure && snr_db == o.snr_db && harq_max_retx == o.harq_max_retx && stop == o.stop &&
           master_seed == o.master_seed && early_stop == o.early_stop && batch_size == o.batch_size &&
           same_design(wiener, o.wiener);
}

void validate(const experiment_spec_t& s) {
    if (s.snr_db.empty()) throw validation_error("snr_db: grid is empty");
    for (size_t i = 0; i < s.snr_db.size(); ++i) {
        if (!std::isfinite(s.snr_db[i])) throw validation_error("snr_db: non-finite entry");
        if (i > 0 && !(s.snr_db[i] > s.snr_db[i - 1])) throw validation_error("snr_db: grid must be strictly increasing");
    }
    if (s.stop.min_errors < 1) throw validation_error("stop.min_errors must be at least 1");
    if (s.stop.max_trials < 1) throw validation_error("stop.max_trials must be at least 1");
    if (s.n_rx < 1 || s.n_rx > 8) throw validation_error("n_rx must be 1..8");
    if (s.n_tx() != 1 && s.n_tx() != 2) throw validation_error("n_tx must be 1 or 2");
    if (s.batch_size < 1) throw validation_error("batch_size must be at least 1");
    if (!(s.velocity_mps >= 0.0)) throw validation_error("velocity_mps must be non-negative");
    if (!(s.carrier_hz > 0.0)) throw validation_error("carrier_hz must be positive");
    if (s.measure == measure_t::uncoded && s.harq_max_retx != 0) {
        throw validation_error("harq_max_retx must be 0 for uncoded measurements");
    }
    if (s.csi == csi_selection_t::paired && s.measure != measure_t::uncoded) {
        throw validation_error("paired CSI is only available for uncoded measurements");
    }
    if (s.harq_max_retx > 3) throw validation_error("harq_max_retx must be 0..3");
    if (s.wiener) {
        if (!(s.wiener->delay_spread_s > 0.0)) throw validation_error("wiener.delay_spread_s must be positive");
        if (!(s.wiener->doppler_hz >= 0.0)) throw validation_error("wiener.doppler_hz must be non-negative");
        if (s.wiener->pilots_per_symbol < 1) throw validation_error("wiener.pilots_per_symbol must be at least 1");
    }
    packet_layout_t layout(s.format);
    if (s.measure == measure_t::packet) (void)payload_capacity_bits(s.format);
}

json to_json(const packet_format_t& f) {
    return json{{"name", to_string(f.name)},
                {"mu", f.numerology.mu},
                {"beta", f.numerology.beta},
                {"n_symbols", f.n_symbols},
                {"tbs_bits", f.tbs_bits},
                {"modulation", to_string(f.modulation)},
                {"code_rate", json::array({f.code_rate.num, f.code_rate.den})},
                {"max_harq_retx", f.max_harq_retx},
                {"n_tx", f.n_tx_antennas}};
}

packet_format_t format_from_json(const json& j, std::optional<uint32_t>* mcs_out) {
    if (j.is_string()) return preset_format(format_from_string(j.get<std::string>()));
    if (!j.is_object()) throw config_error("format: expected a preset name or an object");
    const uint32_t n_tx = get_or<uint32_t>(j, "n_tx", 1);
    const std::string name = get_or<std::string>(j, "name", "Custom");
    packet_format_t f;
    std::optional<uint32_t> mcs;
    if (j.contains("mcs") && !j["mcs"].is_null()) {
        mcs = j["mcs"].get<uint32_t>();
        f = mcs_format(*mcs, get_or<uint32_t>(j, "mu", 1), get_or<uint32_t>(j, "beta", 1), n_tx);
    } else if (name != "Custom") {
        f = preset_format(format_from_string(name), n_tx);
    } else {
        f.numerology = derive_numerology(get_or<uint32_t>(j, "mu", 1), get_or<uint32_t>(j, "beta", 1));
        f.n_tx_antennas = n_tx;
    }
    if (name != "Custom" || !mcs) f.name = format_from_string(name);
    if (j.contains("mu") || j.contains("beta")) {
        f.numerology = derive_numerology(get_or<uint32_t>(j, "mu", f.numerology.mu),
                                         get_or<uint32_t>(j, "beta", f.numerology.beta));
    }
    f.n_symbols = get_or<uint32_t>(j, "n_symbols", f.n_symbols);
    f.tbs_bits = get_or<uint32_t>(j, "tbs_bits", f.tbs_bits);
    if (j.contains("modulation")) f.modulation = modulation_from_string(j["modulation"].get<std::string>());
    if (j.contains("code_rate")) {
        const auto& r = j["code_rate"];
        if (!r.is_array() || r.size() != 2) throw config_error("format.code_rate: expected [num, den]");
        f.code_rate = {r[0].get<uint32_t>(), r[1].get<uint32_t>()};
    }
    f.max_harq_retx = get_or<uint32_t>(j, "max_harq_retx", f.max_harq_retx);
    if (mcs_out) *mcs_out = mcs;
    return f;
}

json to_json(const experiment_spec_t& s) {
    json fj = to_json(s.format);
    if (s.mcs) fj["mcs"] = *s.mcs;
    json j{{"name", s.name},
           {"format", fj},
           {"channel", to_string(s.channel)},
           {"carrier_hz", s.carrier_hz},
           {"velocity_mps", s.velocity_mps},
           {"n_rx", s.n_rx},
           {"csi", to_string(s.csi)},
           {"measure", s.measure == measure_t::packet ? "packet" : "uncoded"},
           {"snr_db", s.snr_db},
           {"harq_max_retx", s.harq_max_retx},
           {"stop", {{"min_errors", s.stop.min_errors}, {"max_trials", s.stop.max_trials}}},
           {"master_seed", s.master_seed},
           {"early_stop", s.early_stop},
           {"batch_size", s.batch_size}};
    if (s.wiener) {
        j["wiener"] = {{"delay_spread_s", s.wiener->delay_spread_s},
                       {"doppler_hz", s.wiener->doppler_hz},
                       {"snr_db", s.wiener->snr_db},
                       {"pilots_per_symbol", s.wiener->pilots_per_symbol},
                       {"diagonal_loading", s.wiener->diagonal_loading}};
    }
    return j;
}

experiment_spec_t experiment_from_json(const json& j) {
    std::string where = "(root)";
    try {
        if (!j.is_object()) throw config_error("expected an object");
        experiment_spec_t s;
        where = "name";
        s.name = get_or<std::string>(j, "name", s.name);
        where = "format";
        if (j.contains("format")) s.format = format_from_json(j["format"], &s.mcs);
        where = "n_tx";
        if (j.contains("n_tx")) {
            s.format.n_tx_antennas = j["n_tx"].get<uint32_t>();
            if (s.mcs) {
                // TBS depends on the DRS overhead of the antenna count
                const auto f = mcs_format(*s.mcs, s.format.numerology.mu, s.format.numerology.beta,
                                          s.format.n_tx_antennas);
                s.format.tbs_bits = f.tbs_bits;
            }
        }
        where = "channel";
        if (j.contains("channel")) s.channel = channel_from_string(j["channel"].get<std::string>());
        where = "carrier_hz";
        s.carrier_hz = get_or<double>(j, "carrier_hz", s.carrier_hz);
        where = "velocity_mps";
        s.velocity_mps = get_or<double>(j, "velocity_mps", s.velocity_mps);
        if (j.contains("velocity_kmh")) s.velocity_mps = j["velocity_kmh"].get<double>() / 3.6;
        where = "n_rx";
        s.n_rx = get_or<uint32_t>(j, "n_rx", s.n_rx);
        where = "csi";
        if (j.contains("csi")) s.csi = csi_from_string(j["csi"].get<std::string>());
        where = "measure";
        if (j.contains("measure")) {
            const auto m = j["measure"].get<std::string>();
            if (m == "packet") {
                s.measure = measure_t::packet;
            } else if (m == "uncoded") {
                s.measure = measure_t::uncoded;
            } else {
                throw config_error("expected 'packet' or 'uncoded'");
            }
        }
        where = "snr_db";
        if (j.contains("snr_db")) {
            const auto& g = j["snr_db"];
            if (g.is_object()) {
                s.snr_db = grid(g.at("start").get<double>(), g.at("stop").get<double>(), g.at("step").get<double>());
            } else {
                s.snr_db = g.get<std::vector<double>>();
            }
        }
        where = "harq_max_retx";
        s.harq_max_retx = get_or<uint32_t>(j, "harq_max_retx", s.format.max_harq_retx);
        where = "stop";
        if (j.contains("stop")) {
            s.stop.min_errors = get_or<uint64_t>(j["stop"], "min_errors", s.stop.min_errors);
            s.stop.max_trials = get_or<uint64_t>(j["stop"], "max_trials", s.stop.max_trials);
        }
        where = "master_seed";
        s.master_seed = get_or<uint64_t>(j, "master_seed", s.master_seed);
        where = "early_stop";
        s.early_stop = get_or<bool>(j, "early_stop", s.early_stop);
        where = "batch_size";
        s.batch_size = get_or<uint32_t>(j, "batch_size", s.batch_size);
        where = "wiener";
        if (j.contains("wiener") && !j["wiener"].is_null()) {
            auto d = receiver::default_wiener_design(s.format);
            const auto& w = j["wiener"];
            d.delay_spread_s = get_or<double>(w, "delay_spread_s", d.delay_spread_s);
            d.doppler_hz = get_or<double>(w, "doppler_hz", d.doppler_hz);
            d.snr_db = get_or<double>(w, "snr_db", d.snr_db);
            d.pilots_per_symbol = get_or<uint32_t>(w, "pilots_per_symbol", d.pilots_per_symbol);
            d.diagonal_loading = get_or<double>(w, "diagonal_loading", d.diagonal_loading);
            s.wiener = d;
        }
        where = "(validation)";
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw config_error("experiment " + where + ": " + e.what());
    } catch (const validation_error& e) {
        throw config_error("experiment " + where + ": " + e.what());
    } catch (const config_error& e) {
        throw config_error("experiment " + where + ": " + e.what());
    }
}

std::vector<experiment_spec_t> load_experiments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    std::vector<experiment_spec_t> out;
    try {
        if (j.is_object() && j.contains("experiments")) {
            const auto& list = j.at("experiments");
            if (!list.is_array() || list.empty()) throw config_error("experiments: expected a non-empty array");
            for (size_t i = 0; i < list.size(); ++i) {
                try {
                    out.push_back(experiment_from_json(list[i]));
                } catch (const config_error& e) {
                    throw config_error("experiments[" + std::to_string(i) + "]: " + e.what());
                }
            }
        } else {
            out.push_back(experiment_from_json(j));
        }
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
    return out;
}

experiment_spec_t load_experiment(const std::string& path) {
    auto all = load_experiments(path);
    if (all.size() != 1) throw config_error(path + ": expected a single experiment");
    return all.front();
}

std::vector<std::string> preset_names() {
    return {"fig2-awgn-mcs",       "fig3-rayleigh-wiener", "fig4-format0-los",
            "fig4-format0-nlos",   "fig5-format1-simo",    "fig5-format2-simo"};
}

std::vector<experiment_spec_t> experiment_preset(const std::string& name) {
    std::vector<experiment_spec_t> out;
    if (name == "fig2-awgn-mcs") {
        // each grid opens about 3 dB below its PER 1e-2 waterfall
        const double start[10] = {-4.0, -1.5, 1.0, 4.0, 7.5, 10.5, 12.5, 14.5, 17.5, 19.5};
        for (uint32_t m = 0; m < 10; ++m) {
            experiment_spec_t s;
            s.name = name + "_mcs" + std::to_string(m);
            s.format = mcs_format(m);
            s.mcs = m;
            s.channel = channel_kind_t::awgn;
            s.csi = csi_selection_t::perfect;
            s.snr_db = grid(start[m], start[m] + 7.0, 0.5);
            out.push_back(s);
        }
    } else if (name == "fig3-rayleigh-wiener") {
        const std::pair<uint32_t, uint32_t> ant[] = {{1, 1}, {2, 2}, {1, 4}};
        for (const auto& [tx, rx] : ant) {
            experiment_spec_t s;
            s.name = name + "_" + std::to_string(tx) + "x" + std::to_string(rx);
            s.format = preset_format(format_name_t::format0, tx);
            s.channel = channel_kind_t::nlos;
            s.n_rx = rx;
            s.csi = csi_selection_t::paired;
            s.measure = measure_t::uncoded;
            s.snr_db = tx * rx == 1 ? grid(0.0, 30.0, 3.0) : grid(-3.0, 15.0, 2.0);
            s.stop = {200, 200'000};
            out.push_back(s);
        }
    } else if (name == "fig4-format0-los" || name == "fig4-format0-nlos") {
        const bool los = name == "fig4-format0-los";
        for (const uint32_t ant : {1u, 2u}) {
            for (const uint32_t retx : {0u, 2u}) {
                experiment_spec_t s;
                s.name = name + "_" + std::to_string(ant) + "x" + std::to_string(ant) + "_harq" + std::to_string(retx);
                s.format = preset_format(format_name_t::format0, ant);
                s.channel = los ? channel_kind_t::los : channel_kind_t::nlos;
                s.n_rx = ant;
                s.harq_max_retx = retx;
                s.snr_db = ant == 1 ? grid(0.0, 30.0, 2.5) : grid(-4.0, 14.0, 2.0);
                s.early_stop = true;
                out.push_back(s);
            }
        }
    } else if (name == "fig5-format1-simo" || name == "fig5-format2-simo") {
        const auto f = name == "fig5-format1-simo" ? format_name_t::format1 : format_name_t::format2;
        for (const auto ch : {channel_kind_t::los, channel_kind_t::nlos}) {
            for (const uint32_t retx : {0u, 1u}) {
                experiment_spec_t s;
                s.name = name + "_" + std::string(to_string(ch)) + "_harq" + std::to_string(retx);
                s.format = preset_format(f);
                s.channel = ch;
                s.n_rx = 4;
                s.harq_max_retx = retx;
                s.snr_db = grid(-6.0, 8.0, 1.0);
                s.early_stop = true;
                out.push_back(s);
            }
        }
    } else {
        throw config_error("unknown preset '" + name + "'");
    }
    for (const auto& s : out) validate(s);
    return out;
}

}  // namespace dectsim::sim
