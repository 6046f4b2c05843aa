// SPDX-License-Identifier: Apache-2.0

#include "dectsim/channel/tap_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "dectsim/common/types.hpp"
#include "json.hpp"

namespace dectsim::channel {

tap_profile_t::tap_profile_t(std::string name, std::vector<double> delays_s, std::vector<double> powers_db,
                             std::optional<double> k_factor_db)
    : name_(std::move(name)), k_db_(k_factor_db) {
    if (delays_s.empty() || delays_s.size() != powers_db.size()) {
        throw validation_error("tap profile '" + name_ + "' needs equally many delays and powers");
    }
    if (k_db_ && (std::isnan(*k_db_) || *k_db_ == -INFINITY)) throw validation_error("K-factor must be finite or +inf");
    std::vector<size_t> order(delays_s.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return delays_s[a] < delays_s[b]; });
    double total = 0.0;
    for (const size_t i : order) {
        if (!(delays_s[i] >= 0.0) || !std::isfinite(delays_s[i]) || !std::isfinite(powers_db[i])) {
            throw validation_error("tap profile '" + name_ + "' has a negative or non-finite entry");
        }
        delays_s_.push_back(delays_s[i]);
        powers_.push_back(std::pow(10.0, powers_db[i] / 10.0));
        total += powers_.back();
    }
    for (auto& p : powers_) p /= total;
}

std::vector<double> tap_profile_t::powers_db() const {
    std::vector<double> out;
    for (const double p : powers_) out.push_back(10.0 * std::log10(p));
    return out;
}

double tap_profile_t::rms_delay_spread() const {
    double mean = 0.0;
    for (size_t i = 0; i < n_taps(); ++i) mean += powers_[i] * delays_s_[i];
    double var = 0.0;
    for (size_t i = 0; i < n_taps(); ++i) var += powers_[i] * (delays_s_[i] - mean) * (delays_s_[i] - mean);
    return std::sqrt(var);
}

tap_profile_t scale_profile(const tap_profile_t& p, double target_rms_ds) {
    if (p.n_taps() < 2) throw validation_error("cannot scale the delay spread of a single-tap profile");
    if (!(target_rms_ds > 0.0)) throw validation_error("target RMS delay spread must be positive");
    const double ds = p.rms_delay_spread();
    if (!(ds > 0.0)) throw validation_error("profile '" + p.name() + "' has zero delay spread");
    const double f = target_rms_ds / ds;
    std::vector<double> d = p.delays_s();
    for (auto& x : d) x *= f;
    return tap_profile_t(p.name(), std::move(d), p.powers_db(), p.k_factor_db());
}

tap_profile_t flat_profile() { return tap_profile_t("flat", {0.0}, {0.0}); }

tap_profile_t unit_profile() { return tap_profile_t("unit", {0.0}, {0.0}, INFINITY); }

tap_profile_t load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open tap profile " + path);
    try {
        const auto j = nlohmann::json::parse(in);
        std::vector<double> d = j.at("delays_ns").get<std::vector<double>>();
        for (auto& x : d) x *= 1e-9;
        std::optional<double> k;
        if (j.contains("k_factor_db") && !j["k_factor_db"].is_null()) k = j["k_factor_db"].get<double>();
        tap_profile_t p(j.at("name").get<std::string>(), std::move(d), j.at("powers_db").get<std::vector<double>>(), k);
        if (j.contains("target_rms_delay_spread_ns") && !j["target_rms_delay_spread_ns"].is_null()) {
            p = scale_profile(p, j["target_rms_delay_spread_ns"].get<double>() * 1e-9);
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("tap profile " + path + ": " + e.what());
    } catch (const validation_error& e) {
        throw config_error("tap profile " + path + ": " + e.what());
    }
}

tap_profile_t builtin_profile(const std::string& name) {
    const char* env = std::getenv("DECTSIM_DATA_DIR");
    const std::string dir = env ? env : DECTSIM_DATA_DIR;
    if (name == "TDL-iii") return load_profile(dir + "/profiles/tdl_iii.json");
    if (name == "TDL-v") return load_profile(dir + "/profiles/tdl_v.json");
    throw config_error("unknown tap profile '" + name + "', expected TDL-iii or TDL-v");
}

double max_doppler(double velocity_mps, double carrier_hz) {
    if (velocity_mps < 0.0) throw validation_error("velocity must be non-negative");
    return velocity_mps * carrier_hz / speed_of_light;
}

}  // namespace dectsim::channel
