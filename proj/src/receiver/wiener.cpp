// SPDX-License-Identifier: Apache-2.0

#include "dectsim/receiver/wiener.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace dectsim::receiver {

namespace {

// exponential PDP with RMS spread tau, delay origin at its mean
std::complex<double> freq_corr(double df, double tau) {
    const double x = 2.0 * M_PI * df * tau;
    return std::polar(1.0, x) / std::complex<double>(1.0, x);
}

double time_corr(double dt, double fd) { return std::cyl_bessel_j(0.0, 2.0 * M_PI * fd * std::abs(dt)); }

}  // namespace

wiener_design_t default_wiener_design(const packet_format_t&) { return wiener_design_t{}; }

wiener_taps_t wiener_weights(const packet_layout_t& layout, const numerology_t& n, const wiener_design_t& design,
                             uint32_t antenna, uint32_t symbol, uint32_t subcarrier) {
    if (design.delay_spread_s < 0.0 || design.doppler_hz < 0.0) {
        throw validation_error("Wiener design needs non-negative delay spread and Doppler");
    }
    if (antenna >= layout.n_tx_antennas()) throw validation_error("antenna index out of range");
    const auto& drs = layout.drs_res(antenna);
    const uint32_t Nsc = layout.n_subcarriers();

    // group pilots by symbol, keep the nearest in frequency from each
    std::vector<uint32_t> chosen;
    std::vector<uint32_t> rows;
    for (const uint32_t idx : drs) {
        const uint32_t l = idx / Nsc;
        if (std::find(rows.begin(), rows.end(), l) == rows.end()) rows.push_back(l);
    }
    for (const uint32_t l : rows) {
        std::vector<uint32_t> cand;
        for (uint32_t i = 0; i < drs.size(); ++i) {
            if (drs[i] / Nsc == l) cand.push_back(i);
        }
        auto dist = [&](uint32_t i) {
            const int64_t k = drs[i] % Nsc;
            return std::abs(k - static_cast<int64_t>(subcarrier));
        };
        std::stable_sort(cand.begin(), cand.end(), [&](uint32_t a, uint32_t b) { return dist(a) < dist(b); });
        cand.resize(std::min<size_t>(cand.size(), design.pilots_per_symbol));
        std::sort(cand.begin(), cand.end());
        chosen.insert(chosen.end(), cand.begin(), cand.end());
    }

    const double dfs = n.subcarrier_spacing_hz;
    const double dts = static_cast<double>(n.samples_per_symbol()) / n.sample_rate_hz;
    const double sigma2 = std::pow(10.0, -design.snr_db / 10.0) + design.diagonal_loading;
    const size_t P = chosen.size();
    Eigen::MatrixXcd A(P, P);
    Eigen::VectorXcd c(P);
    auto pos = [&](uint32_t i) { return std::pair<int64_t, int64_t>(drs[i] / Nsc, drs[i] % Nsc); };
    for (size_t i = 0; i < P; ++i) {
        const auto [li, ki] = pos(chosen[i]);
        for (size_t j = 0; j < P; ++j) {
            const auto [lj, kj] = pos(chosen[j]);
            A(i, j) = freq_corr((ki - kj) * dfs, design.delay_spread_s) * time_corr((li - lj) * dts, design.doppler_hz);
        }
        A(i, i) += sigma2;
        // c_i = E[H_d conj(H_pi)]
        c(i) = freq_corr((static_cast<int64_t>(subcarrier) - ki) * dfs, design.delay_spread_s) *
               time_corr((static_cast<int64_t>(symbol) - li) * dts, design.doppler_hz);
    }
    // row vector w = c^T A^-1, i.e. A^T w^T = c
    const Eigen::VectorXcd w = A.transpose().ldlt().solve(c);
    wiener_taps_t t;
    t.pilots = chosen;
    for (size_t i = 0; i < P; ++i) t.weights.emplace_back(static_cast<float>(w(i).real()), static_cast<float>(w(i).imag()));
    return t;
}

wiener_bank_t::wiener_bank_t(const packet_format_t& format, const wiener_design_t& design)
    : design_(design), layout_(format) {
    taps_.resize(layout_.n_tx_antennas());
    for (uint32_t a = 0; a < layout_.n_tx_antennas(); ++a) {
        for (const uint32_t idx : layout_.data_res()) {
            taps_[a].push_back(wiener_weights(layout_, format.numerology, design_, a, idx / layout_.n_subcarriers(),
                                              idx % layout_.n_subcarriers()));
        }
    }
}

bool wiener_bank_t::operator==(const wiener_bank_t& o) const {
    if (!(layout_ == o.layout_) || taps_.size() != o.taps_.size()) return false;
    for (size_t a = 0; a < taps_.size(); ++a) {
        for (size_t i = 0; i < taps_[a].size(); ++i) {
            if (taps_[a][i].pilots != o.taps_[a][i].pilots || taps_[a][i].weights != o.taps_[a][i].weights) return false;
        }
    }
    return true;
}

wiener_bank_t build_wiener_bank(const packet_format_t& format, double worst_ds, double worst_fd, double design_snr_db) {
    if (!(worst_ds > 0.0) || !(worst_fd >= 0.0)) {
        throw validation_error("Wiener bank needs worst_ds > 0 and worst_fd >= 0");
    }
    wiener_design_t d;
    d.delay_spread_s = worst_ds;
    d.doppler_hz = worst_fd;
    d.snr_db = design_snr_db;
    return wiener_bank_t(format, d);
}

}  // namespace dectsim::receiver
