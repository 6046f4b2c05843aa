// SPDX-License-Identifier: Apache-2.0

#include "dectsim/sim/results.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dectsim/common/types.hpp"
#include "json.hpp"

namespace dectsim::sim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csi_name(receiver::csi_mode_t c) {
    return c == receiver::csi_mode_t::perfect ? "perfect" : "wiener";
}

receiver::csi_mode_t csi_mode_from(const std::string& s, const std::string& path) {
    if (s == "perfect") return receiver::csi_mode_t::perfect;
    if (s == "wiener") return receiver::csi_mode_t::wiener;
    throw config_error(path + ": unknown csi mode '" + s + "'");
}

json record_json(const point_record_t& r) {
    return json{{"snr_db", r.snr_db},
                {"trials", r.trials},
                {"packet_errors", r.packet_errors},
                {"bit_errors", r.bit_errors},
                {"bits_total", r.bits_total},
                {"lead_bit_errors", r.lead_bit_errors},
                {"lead_bits", r.lead_bits},
                {"per", r.per},
                {"per_ci_lo", r.per_ci_lo},
                {"per_ci_hi", r.per_ci_hi},
                {"ber", r.ber},
                {"harq_mean_tx", r.harq_mean_tx()},
                {"harq_histogram", r.harq_histogram}};
}

point_record_t record_from(const json& j) {
    point_record_t r;
    r.snr_db = j.at("snr_db").get<double>();
    r.trials = j.at("trials").get<uint64_t>();
    r.packet_errors = j.at("packet_errors").get<uint64_t>();
    r.bit_errors = j.at("bit_errors").get<uint64_t>();
    r.bits_total = j.at("bits_total").get<uint64_t>();
    r.lead_bit_errors = j.at("lead_bit_errors").get<uint64_t>();
    r.lead_bits = j.at("lead_bits").get<uint64_t>();
    r.per = j.at("per").get<double>();
    r.per_ci_lo = j.at("per_ci_lo").get<double>();
    r.per_ci_hi = j.at("per_ci_hi").get<double>();
    r.ber = j.at("ber").get<double>();
    r.harq_histogram = j.at("harq_histogram").get<std::vector<uint64_t>>();
    return r;
}

// Round-trip safe decimal for doubles.
std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error(dir + ": cannot create directory: " + ec.message());
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw io_error(path + ": cannot open for writing");
    return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw io_error(path + ": write failed");
}

}  // namespace

std::string series_stem(const experiment_spec_t& spec, const series_t& series, size_t n_series) {
    if (n_series <= 1) return spec.name;
    return spec.name + "_" + csi_name(series.csi);
}

std::vector<result_files_t> persist_results(const sweep_result_t& result, const std::string& dir) {
    ensure_dir(dir);
    std::vector<result_files_t> files;
    for (const auto& s : result.series) {
        const std::string stem = series_stem(result.spec, s, result.series.size());
        result_files_t f{(fs::path(dir) / (stem + ".csv")).string(), (fs::path(dir) / (stem + ".json")).string()};

        auto csv = open_out(f.csv);
        csv << csv_header << "\n";
        for (const auto& r : s.points) {
            csv << num(r.snr_db) << ',' << r.trials << ',' << r.packet_errors << ',' << num(r.per) << ','
                << num(r.per_ci_lo) << ',' << num(r.per_ci_hi) << ',' << num(r.ber) << ',' << num(r.harq_mean_tx())
                << "\n";
        }
        close_checked(csv, f.csv);

        json side;
        side["tool_version"] = tool_version;
        side["csi"] = csi_name(s.csi);
        side["csv"] = fs::path(f.csv).filename().string();
        side["spec"] = to_json(result.spec);
        side["records"] = json::array();
        for (const auto& r : s.points) side["records"].push_back(record_json(r));
        auto js = open_out(f.sidecar);
        js << side.dump(2) << "\n";
        close_checked(js, f.sidecar);
        files.push_back(std::move(f));
    }
    return files;
}

std::vector<point_record_t> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line)) throw config_error(path + ": empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    const std::vector<std::string> want = {"snr_db", "per", "trials", "packet_errors", "per_ci_lo", "per_ci_hi", "ber",
                                           "harq_mean_tx"};
    std::vector<int> idx;
    for (const auto& w : want) {
        auto it = std::find(cols.begin(), cols.end(), w);
        if (it == cols.end()) throw config_error(path + ": missing column '" + w + "'");
        idx.push_back(static_cast<int>(it - cols.begin()));
    }

    std::vector<point_record_t> out;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) f.push_back(c);
        if (f.size() != cols.size())
            throw config_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                               " fields");
        try {
            point_record_t r;
            r.snr_db = std::stod(f[idx[0]]);
            r.per = std::stod(f[idx[1]]);
            r.trials = std::stoull(f[idx[2]]);
            r.packet_errors = std::stoull(f[idx[3]]);
            r.per_ci_lo = std::stod(f[idx[4]]);
            r.per_ci_hi = std::stod(f[idx[5]]);
            r.ber = std::stod(f[idx[6]]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw config_error(path + ":" + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

loaded_series_t load_results(const std::string& sidecar_path) {
    std::ifstream in(sidecar_path);
    if (!in) throw io_error(sidecar_path + ": cannot open for reading");
    json side;
    try {
        in >> side;
    } catch (const json::exception& e) {
        throw config_error(sidecar_path + ": " + e.what());
    }

    loaded_series_t out;
    try {
        out.spec = experiment_from_json(side.at("spec"));
        out.series.csi = csi_mode_from(side.at("csi").get<std::string>(), sidecar_path);
        for (const auto& r : side.at("records")) out.series.points.push_back(record_from(r));
    } catch (const json::exception& e) {
        throw config_error(sidecar_path + ": " + e.what());
    }

    const auto csv_path = (fs::path(sidecar_path).parent_path() / side.at("csv").get<std::string>()).string();
    const auto rows = read_csv(csv_path);
    if (rows.size() != out.series.points.size())
        throw config_error(csv_path + ": row count disagrees with " + sidecar_path);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = out.series.points[i];
        if (a.snr_db != b.snr_db || a.trials != b.trials || a.packet_errors != b.packet_errors || a.per != b.per)
            throw config_error(csv_path + ": row " + std::to_string(i + 1) + " disagrees with " + sidecar_path);
    }
    return out;
}

void dump_waveform(const modem::waveform_t& w, const packet_format_t& format, uint64_t seed,
                   const std::string& path_stem) {
    const auto parent = fs::path(path_stem).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
    const std::string bin_path = path_stem + ".cf32";
    const std::string json_path = path_stem + ".json";

    auto out = open_out(bin_path, true);
    std::vector<char> buf;
    for (const auto& ant : w.antennas) {
        buf.resize(ant.size() * 8);
        for (size_t i = 0; i < ant.size(); ++i) {
            const float iq[2] = {ant[i].real(), ant[i].imag()};
            for (int k = 0; k < 2; ++k) {
                uint32_t u;
                std::memcpy(&u, &iq[k], 4);
                if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
                std::memcpy(&buf[i * 8 + k * 4], &u, 4);
            }
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    close_checked(out, bin_path);

    json side{{"tool_version", tool_version},
              {"file", fs::path(bin_path).filename().string()},
              {"sample_format", "cf32_le"},
              {"layout", "antenna_major"},
              {"sample_rate_hz", w.rate_hz},
              {"n_antennas", w.antennas.size()},
              {"n_samples", w.n_samples()},
              {"format", to_json(format)},
              {"seed", seed}};
    auto js = open_out(json_path);
    js << side.dump(2) << "\n";
    close_checked(js, json_path);
}

}  // namespace dectsim::sim
