// SPDX-License-Identifier: Apache-2.0

#include "dectsim/receiver/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dectsim/modem/constellation.hpp"
#include "dectsim/modem/ofdm.hpp"

namespace dectsim::receiver {

int64_t time_sync(std::span<const cf_t> rx_samples, int64_t first_tap_delay_samples) {
    (void)rx_samples;
    return std::max<int64_t>(first_tap_delay_samples, 0);
}

channel_estimate_t estimate_channel(std::span<const modem::resource_grid_t> rx_grids, const wiener_bank_t& bank) {
    const packet_layout_t& layout = bank.layout();
    const uint32_t n_tx = layout.n_tx_antennas();
    const uint32_t n_data = layout.n_data_res();
    channel_estimate_t est(n_tx, static_cast<uint32_t>(rx_grids.size()), n_data, csi_mode_t::wiener);
    std::vector<cf_t> ls;
    for (uint32_t r = 0; r < rx_grids.size(); ++r) {
        const auto& g = rx_grids[r];
        if (g.n_symbols != layout.n_symbols() || g.n_subcarriers != layout.n_subcarriers()) {
            throw validation_error("received grid does not match the Wiener bank layout");
        }
        for (uint32_t a = 0; a < n_tx; ++a) {
            const auto& drs = layout.drs_res(a);
            ls.resize(drs.size());
            for (size_t i = 0; i < drs.size(); ++i) {
                const uint32_t idx = drs[i];
                const cf_t x = modem::drs_symbol(idx / layout.n_subcarriers(), idx % layout.n_subcarriers());
                ls[i] = g.re[idx] * std::conj(x);  // unit-modulus pilots
            }
            for (uint32_t d = 0; d < n_data; ++d) {
                const auto& t = bank.taps(a, d);
                cf_t acc{0.0f, 0.0f};
                for (size_t j = 0; j < t.pilots.size(); ++j) acc += t.weights[j] * ls[t.pilots[j]];
                est.at(r, a, d) = acc;
            }
        }
    }
    return est;
}

perfect_csi_t::perfect_csi_t(const packet_format_t& format, const channel::channel_realization_t& shape,
                             double sim_rate_hz, int64_t sync_offset_samples, uint32_t window_advance)
    : format_(format),
      layout_(format),
      sim_rate_(sim_rate_hz),
      window_advance_(window_advance),
      n_taps_(shape.n_taps()) {
    const auto& num = format.numerology;
    const uint32_t N = num.fft_size;
    response_.assign(n_taps_ * N, cd_t{0.0, 0.0});
    for (size_t l = 0; l < n_taps_; ++l) {
        const auto& f = shape.delay_filter(l);
        for (uint32_t k = 0; k < N; ++k) {
            const double fk = (static_cast<double>(k) - N / 2.0) * num.subcarrier_spacing_hz;
            cd_t acc{0.0, 0.0};
            for (size_t i = 0; i < f.coef.size(); ++i) {
                const double ph = -2.0 * M_PI * fk *
                                  static_cast<double>(f.first + static_cast<int64_t>(i) - sync_offset_samples) /
                                  sim_rate_hz;
                acc += f.coef[i] * cd_t{std::cos(ph), std::sin(ph)};
            }
            response_[l * N + k] = acc;
        }
    }
}

channel_estimate_t perfect_csi_t::estimate(const channel::channel_realization_t& h, int64_t packet_start_samples) const {
    const auto& num = format_.numerology;
    const uint32_t N = num.fft_size;
    const uint32_t n_data = layout_.n_data_res();
    channel_estimate_t est(h.n_tx(), h.n_rx(), n_data, csi_mode_t::perfect);
    std::vector<cd_t> g(n_taps_);
    std::vector<cf_t> row_h(N);
    const auto& data = layout_.data_res();
    for (uint32_t r = 0; r < h.n_rx(); ++r) {
        for (uint32_t a = 0; a < h.n_tx(); ++a) {
            uint32_t d = 0;
            for (uint32_t l = 0; l < layout_.n_symbols() && d < n_data; ++l) {
                if (data[d] / N != l) continue;
                const double t = static_cast<double>(packet_start_samples) / sim_rate_ +
                                 (static_cast<double>(l) * num.samples_per_symbol() + num.cp_samples - window_advance_ +
                                  N / 2.0) /
                                     num.sample_rate_hz;
                h.link_gains(a, r, t, g);
                for (uint32_t k = 0; k < N; ++k) {
                    cd_t acc{0.0, 0.0};
                    for (size_t tap = 0; tap < n_taps_; ++tap) acc += g[tap] * response_[tap * N + k];
                    row_h[k] = cf_t(static_cast<float>(acc.real()), static_cast<float>(acc.imag()));
                }
                while (d < n_data && data[d] / N == l) {
                    est.at(r, a, d) = row_h[data[d] % N];
                    ++d;
                }
            }
        }
    }
    return est;
}

combined_t combine(std::span<const modem::resource_grid_t> rx_grids, const channel_estimate_t& est,
                   const packet_layout_t& layout, combining_t scheme, double noise_var) {
    const uint32_t n_rx = static_cast<uint32_t>(rx_grids.size());
    if (est.n_rx != n_rx || est.n_data != layout.n_data_res()) {
        throw validation_error("channel estimate does not match the received grids");
    }
    if ((scheme == combining_t::mrc) != (est.n_tx == 1) || est.n_tx > 2) {
        throw validation_error("MRC needs one transmit antenna and SFBC+MRC two, got " + std::to_string(est.n_tx));
    }
    const auto& data = layout.data_res();
    const uint32_t n_data = layout.n_data_res();
    const float nv = static_cast<float>(noise_var);
    combined_t out;
    out.symbols.resize(n_data);
    out.post_snr.resize(n_data);

    if (scheme == combining_t::mrc) {
        for (uint32_t d = 0; d < n_data; ++d) {
            cf_t num{0.0f, 0.0f};
            float den = 0.0f;
            for (uint32_t r = 0; r < n_rx; ++r) {
                const cf_t h = est.at(r, 0, d);
                num += std::conj(h) * rx_grids[r].re[data[d]];
                den += std::norm(h);
            }
            out.symbols[d] = den > 0.0f ? num / den : cf_t{0.0f, 0.0f};
            out.post_snr[d] = nv > 0.0f ? den / nv : std::numeric_limits<float>::max();
        }
        return out;
    }

    const float s2 = static_cast<float>(M_SQRT2);
    for (const auto& p : modem::sfbc_pairs(layout)) {
        cf_t a1{0.0f, 0.0f}, a2{0.0f, 0.0f};
        float S = 0.0f;
        for (uint32_t r = 0; r < n_rx; ++r) {
            const cf_t h1 = 0.5f * (est.at(r, 0, p[0]) + est.at(r, 0, p[1]));
            const cf_t h2 = 0.5f * (est.at(r, 1, p[0]) + est.at(r, 1, p[1]));
            const cf_t y1 = rx_grids[r].re[data[p[0]]];
            const cf_t y2 = rx_grids[r].re[data[p[1]]];
            a1 += std::conj(h1) * y1 + h2 * std::conj(y2);
            a2 += std::conj(h1) * y2 - h2 * std::conj(y1);
            S += std::norm(h1) + std::norm(h2);
        }
        const cf_t z{0.0f, 0.0f};
        out.symbols[p[0]] = S > 0.0f ? s2 * a1 / S : z;
        out.symbols[p[1]] = S > 0.0f ? s2 * a2 / S : z;
        const float snr = nv > 0.0f ? S / (2.0f * nv) : std::numeric_limits<float>::max();
        out.post_snr[p[0]] = snr;
        out.post_snr[p[1]] = snr;
    }
    return out;
}

llrs_t demap_llrs(std::span<const cf_t> symbols, std::span<const float> post_snr, modulation_t m) {
    if (symbols.size() != post_snr.size()) throw validation_error("demap: symbol and SNR counts differ");
    const auto& c = modem::constellation(m);
    const uint32_t q = c.bits_per_symbol();
    const uint32_t mb = c.axis_bits();
    const auto& lv = c.axis_levels();
    const uint32_t n_lv = static_cast<uint32_t>(lv.size());
    llrs_t out(symbols.size() * q);
    constexpr float big = std::numeric_limits<float>::max();
    // cap keeps sums of LLRs finite when the channel is noiseless
    constexpr float llr_cap = 1.0e6f;

    auto axis = [&](float x, float snr, float* llr_out, uint32_t stride) {
        float min0[5], min1[5];
        for (uint32_t b = 0; b < mb; ++b) min0[b] = min1[b] = big;
        for (uint32_t a = 0; a < n_lv; ++a) {
            const float d = (x - lv[a]) * (x - lv[a]);
            for (uint32_t b = 0; b < mb; ++b) {
                if ((a >> (mb - 1 - b)) & 1u) min1[b] = std::min(min1[b], d);
                else min0[b] = std::min(min0[b], d);
            }
        }
        for (uint32_t b = 0; b < mb; ++b) {
            llr_out[b * stride] = std::clamp((min1[b] - min0[b]) * snr, -llr_cap, llr_cap);
        }
    };

    for (size_t s = 0; s < symbols.size(); ++s) {
        float* o = out.data() + s * q;
        const float snr = post_snr[s];
        if (m == modulation_t::bpsk) {
            axis(symbols[s].real(), snr, o, 1);
        } else {
            axis(symbols[s].real(), snr, o, 2);
            axis(symbols[s].imag(), snr, o + 1, 2);
        }
    }
    return out;
}

packet_receiver_t::packet_receiver_t(const packet_format_t& format, uint32_t n_rx, receiver_config_t config,
                                     std::shared_ptr<const wiener_bank_t> bank,
                                     const channel::channel_realization_t& shape, double sim_rate_hz)
    : format_(format),
      layout_(format),
      n_rx_(n_rx),
      cfg_(config),
      advance_(config.window_advance < 0 ? format.numerology.cp_samples / 4
                                         : static_cast<uint32_t>(config.window_advance)),
      L_(modem::resampling_factor(format.numerology.sample_rate_hz, sim_rate_hz)),
      bank_(std::move(bank)) {
    if (advance_ > format.numerology.cp_samples) throw validation_error("window advance exceeds the cyclic prefix");
    if (cfg_.csi == csi_mode_t::wiener && !bank_) throw validation_error("Wiener receiver needs a filter bank");
    perfect_ = std::make_shared<perfect_csi_t>(format, shape, sim_rate_hz,
                                               time_sync({}, shape.first_tap_delay_samples()), advance_);
    const uint32_t N = format.numerology.fft_size;
    derotation_.resize(N);
    for (uint32_t k = 0; k < N; ++k) {
        const double ph = 2.0 * M_PI * (static_cast<double>(k) - N / 2.0) * advance_ / N;
        derotation_[k] = cf_t(static_cast<float>(std::cos(ph)), static_cast<float>(std::sin(ph)));
    }
}

std::vector<modem::resource_grid_t> packet_receiver_t::demodulate(const std::vector<std::vector<cf_t>>& rx,
                                                                  int64_t start_index) const {
    if (rx.size() != n_rx_) throw validation_error("receiver expects " + std::to_string(n_rx_) + " antennas");
    const auto& num = format_.numerology;
    const size_t needed = static_cast<size_t>(start_index) + size_t{format_.n_symbols} * num.samples_per_symbol() * L_;
    std::vector<modem::resource_grid_t> grids;
    grids.reserve(n_rx_);
    for (const auto& stream : rx) {
        std::vector<cf_t> padded;
        std::span<const cf_t> s(stream);
        if (s.size() < needed) {
            padded.assign(stream.begin(), stream.end());
            padded.resize(needed);
            s = padded;
        }
        auto g = modem::ofdm_demodulate(s, num, static_cast<size_t>(start_index), format_.n_symbols, advance_, L_);
        for (uint32_t l = 0; l < g.n_symbols; ++l) {
            auto row = g.row(l);
            for (uint32_t k = 0; k < g.n_subcarriers; ++k) row[k] *= derotation_[k];
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

channel_estimate_t packet_receiver_t::estimate(std::span<const modem::resource_grid_t> grids, csi_mode_t mode,
                                               const channel::channel_realization_t& h,
                                               int64_t packet_start_samples) const {
    if (mode == csi_mode_t::perfect) return perfect_->estimate(h, packet_start_samples);
    if (!bank_) throw validation_error("Wiener estimation needs a filter bank");
    return estimate_channel(grids, *bank_);
}

reception_t packet_receiver_t::receive(const std::vector<std::vector<cf_t>>& rx,
                                       const channel::channel_realization_t& h, int64_t packet_start_samples,
                                       double noise_var) const {
    const int64_t start = time_sync({}, h.first_tap_delay_samples());
    const auto grids = demodulate(rx, start);
    const auto est = estimate(grids, cfg_.csi, h, packet_start_samples);
    reception_t out;
    out.combined = combine(grids, est, layout_, layout_.n_tx_antennas() == 2 ? combining_t::sfbc_mrc : combining_t::mrc,
                           noise_var);
    out.llrs = demap_llrs(out.combined.symbols, out.combined.post_snr, format_.modulation);
    return out;
}

}  // namespace dectsim::receiver
