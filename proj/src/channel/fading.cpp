// SPDX-License-Identifier: Apache-2.0

#include "dectsim/channel/fading.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>

namespace dectsim::channel {

namespace {

constexpr int64_t gain_grid_step = 64;
constexpr double sinc_kaiser_beta = 5.65;

double jakes_cdf(double f, double fd) {
    const double x = std::clamp(f / fd, -1.0, 1.0);
    return std::asin(x) / M_PI + 0.5;
}

channel_realization_t::delay_filter_t design_delay_filter(double delay_samples) {
    channel_realization_t::delay_filter_t f;
    const double c = std::round(delay_samples);
    if (std::abs(delay_samples - c) < 1e-9) {
        f.first = static_cast<int64_t>(c);
        f.coef = {1.0};
        return f;
    }
    const int64_t half = channel_realization_t::fractional_delay_taps / 2;
    f.first = static_cast<int64_t>(c) - half;
    const double i0b = std::cyl_bessel_i(0.0, sinc_kaiser_beta);
    double sum = 0.0;
    for (uint32_t i = 0; i < channel_realization_t::fractional_delay_taps; ++i) {
        const double m = static_cast<double>(f.first + i) - delay_samples;
        const double r = m / (half + 1.0);
        const double w = std::cyl_bessel_i(0.0, sinc_kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        const double s = std::sin(M_PI * m) / (M_PI * m);
        f.coef.push_back(s * w);
        sum += s * w;
    }
    for (auto& v : f.coef) v /= sum;
    return f;
}

// Every trial of a sweep rebuilds the same handful of filters.
channel_realization_t::delay_filter_t make_delay_filter(double delay_samples) {
    static std::mutex mu;
    static std::map<double, channel_realization_t::delay_filter_t> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(delay_samples);
    if (it == cache.end()) {
        if (cache.size() > 4096) cache.clear();
        it = cache.emplace(delay_samples, design_delay_filter(delay_samples)).first;
    }
    return it->second;
}

template <typename T>
std::vector<std::vector<std::complex<T>>> apply_impl(const std::vector<std::vector<std::complex<T>>>& tx,
                                                     double rate_hz, const channel_realization_t& h,
                                                     int64_t t0) {
    if (tx.size() != h.n_tx()) {
        throw validation_error("channel has " + std::to_string(h.n_tx()) + " transmit antennas, waveform has " +
                               std::to_string(tx.size()));
    }
    if (std::abs(rate_hz - h.sample_rate_hz()) > 1e-6 * rate_hz) {
        throw validation_error("waveform rate " + std::to_string(rate_hz) + " Hz differs from the channel rate " +
                               std::to_string(h.sample_rate_hz()) + " Hz");
    }
    const int64_t n_in = tx.empty() ? 0 : static_cast<int64_t>(tx[0].size());
    for (const auto& a : tx) {
        if (static_cast<int64_t>(a.size()) != n_in) throw validation_error("antenna streams differ in length");
    }

    const size_t n_taps = h.n_taps();
    int64_t m_min = INT64_MAX, m_max = INT64_MIN;
    for (size_t l = 0; l < n_taps; ++l) {
        const auto& f = h.delay_filter(l);
        m_min = std::min(m_min, f.first);
        m_max = std::max(m_max, f.first + static_cast<int64_t>(f.coef.size()) - 1);
    }
    const int64_t M = m_max - m_min + 1;
    const int64_t n_out = n_in + std::max<int64_t>(m_max, 0);
    const int64_t n_seg = (n_out + gain_grid_step - 1) / gain_grid_step;
    const int64_t G = gain_grid_step;

    // x padded so that x_pad[p] = x[p - m_max]; reading x[n - m] becomes x_pad[n - m + m_max]
    const int64_t pad_len = n_seg * G + m_max - m_min + 1;

    std::vector<std::vector<std::complex<T>>> out(h.n_rx(), std::vector<std::complex<T>>(n_out));
    // inner products run in the waveform's precision
    std::vector<T> xr(pad_len), xi(pad_len);
    std::vector<T> ar(G), ai(G), br(G), bi(G);
    std::vector<cd_t> g1(n_taps);
    std::vector<double> h0r(M), h0i(M), h1r(M), h1i(M);
    std::vector<double> yr(n_out), yi(n_out);

    auto combined = [&](const std::vector<cd_t>& g, std::vector<double>& re, std::vector<double>& im) {
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
        for (size_t l = 0; l < n_taps; ++l) {
            const auto& f = h.delay_filter(l);
            const int64_t o = f.first - m_min;
            for (size_t i = 0; i < f.coef.size(); ++i) {
                re[o + i] += g[l].real() * f.coef[i];
                im[o + i] += g[l].imag() * f.coef[i];
            }
        }
    };

    for (uint32_t r = 0; r < h.n_rx(); ++r) {
        std::fill(yr.begin(), yr.end(), 0.0);
        std::fill(yi.begin(), yi.end(), 0.0);
        for (uint32_t t = 0; t < h.n_tx(); ++t) {
            std::fill(xr.begin(), xr.end(), 0.0);
            std::fill(xi.begin(), xi.end(), 0.0);
            for (int64_t n = 0; n < n_in; ++n) {
                const int64_t p = n + m_max;
                if (p >= 0 && p < pad_len) {
                    xr[p] = tx[t][n].real();
                    xi[p] = tx[t][n].imag();
                }
            }
            // p indexes beyond n_in + m_max stay 0; negative p (m_max < 0) cannot occur for causal profiles
            h.link_gains(t, r, static_cast<double>(t0) / h.sample_rate_hz(), g1);
            combined(g1, h1r, h1i);
            for (int64_t s = 0; s < n_seg; ++s) {
                h0r.swap(h1r);
                h0i.swap(h1i);
                h.link_gains(t, r, static_cast<double>(t0 + (s + 1) * G) / h.sample_rate_hz(), g1);
                combined(g1, h1r, h1i);
                std::fill(ar.begin(), ar.end(), T{0});
                std::fill(ai.begin(), ai.end(), T{0});
                std::fill(br.begin(), br.end(), T{0});
                std::fill(bi.begin(), bi.end(), T{0});
                for (int64_t m = 0; m < M; ++m) {
                    // output n = sG + i reads x[n - (m + m_min)] = x_pad[sG + i - m - m_min + m_max]
                    const int64_t base = s * G - m - m_min + m_max;
                    const T* pr = xr.data() + base;
                    const T* pi = xi.data() + base;
                    const T cr = static_cast<T>(h0r[m]), ci = static_cast<T>(h0i[m]);
                    const T er = static_cast<T>(h1r[m] - h0r[m]), ei = static_cast<T>(h1i[m] - h0i[m]);
                    for (int64_t i = 0; i < G; ++i) {
                        ar[i] += cr * pr[i] - ci * pi[i];
                        ai[i] += cr * pi[i] + ci * pr[i];
                        br[i] += er * pr[i] - ei * pi[i];
                        bi[i] += er * pi[i] + ei * pr[i];
                    }
                }
                const int64_t lim = std::min(G, n_out - s * G);
                for (int64_t i = 0; i < lim; ++i) {
                    const double alpha = static_cast<double>(i) / G;
                    yr[s * G + i] += ar[i] + alpha * br[i];
                    yi[s * G + i] += ai[i] + alpha * bi[i];
                }
            }
        }
        for (int64_t n = 0; n < n_out; ++n) out[r][n] = {static_cast<T>(yr[n]), static_cast<T>(yi[n])};
    }
    return out;
}

}  // namespace

channel_realization_t::channel_realization_t(const tap_profile_t& profile, doppler_spec_t doppler, uint32_t n_tx,
                                             uint32_t n_rx, uint64_t duration_samples, uint64_t seed,
                                             double sample_rate_hz)
    : profile_(profile),
      doppler_(doppler),
      n_tx_(n_tx),
      n_rx_(n_rx),
      duration_(duration_samples),
      seed_(seed),
      fs_(sample_rate_hz) {
    if (n_tx == 0 || n_rx == 0) throw validation_error("channel needs at least one antenna per side");
    if (!(doppler.max_doppler_hz >= 0.0)) throw validation_error("maximum Doppler must be non-negative");
    if (!(sample_rate_hz > 0.0)) throw validation_error("sample rate must be positive");

    const double fd = doppler.max_doppler_hz;
    std::vector<double> line_power;
    if (fd == 0.0) {
        freqs_ = {0.0};
        line_power = {1.0};
    } else {
        const double df = fd / n_lines_half;
        for (int k = -static_cast<int>(n_lines_half); k <= static_cast<int>(n_lines_half); ++k) {
            const double f = k * df;
            freqs_.push_back(f);
            line_power.push_back(jakes_cdf(f + df / 2, fd) - jakes_cdf(f - df / 2, fd));
        }
    }

    const size_t n_taps = profile_.n_taps();
    const size_t n_lines = freqs_.size();
    std::vector<double> diffuse = profile_.powers();
    if (profile_.k_factor_db()) {
        if (std::isinf(*profile_.k_factor_db())) {
            los_amp_ = std::sqrt(diffuse[0]);
            diffuse[0] = 0.0;
        } else {
            const double K = std::pow(10.0, *profile_.k_factor_db() / 10.0);
            los_amp_ = std::sqrt(diffuse[0] * K / (K + 1.0));
            diffuse[0] /= (K + 1.0);
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    amp_.resize(size_t{n_tx} * n_rx * n_taps * n_lines);
    size_t i = 0;
    for (size_t link = 0; link < size_t{n_tx} * n_rx; ++link) {
        for (size_t l = 0; l < n_taps; ++l) {
            for (size_t k = 0; k < n_lines; ++k) {
                const double s = std::sqrt(diffuse[l] * line_power[k] / 2.0);
                const double re = normal(rng);
                const double im = normal(rng);
                amp_[i++] = {s * re, s * im};
            }
        }
    }

    for (size_t l = 0; l < n_taps; ++l) filters_.push_back(make_delay_filter(profile_.delays_s()[l] * fs_));
}

int64_t channel_realization_t::first_tap_delay_samples() const {
    return static_cast<int64_t>(std::llround(profile_.delays_s().front() * fs_));
}

void channel_realization_t::link_gains(uint32_t tx, uint32_t rx, double t, std::span<cd_t> out) const {
    const size_t n_taps = profile_.n_taps();
    const size_t n_lines = freqs_.size();
    thread_local std::vector<cd_t> phasor;
    phasor.resize(n_lines);
    for (size_t k = 0; k < n_lines; ++k) {
        const double ph = 2.0 * M_PI * freqs_[k] * t;
        phasor[k] = {std::cos(ph), std::sin(ph)};
    }
    const cd_t* a = amp_.data() + link_index(tx, rx) * n_taps * n_lines;
    for (size_t l = 0; l < n_taps; ++l) {
        double re = 0.0, im = 0.0;
        for (size_t k = 0; k < n_lines; ++k) {
            const cd_t v = a[l * n_lines + k];
            re += v.real() * phasor[k].real() - v.imag() * phasor[k].imag();
            im += v.real() * phasor[k].imag() + v.imag() * phasor[k].real();
        }
        out[l] = {re, im};
    }
    out[0] += los_amp_;
}

cd_t channel_realization_t::gain(uint32_t tx, uint32_t rx, size_t tap, double t) const {
    std::vector<cd_t> g(profile_.n_taps());
    link_gains(tx, rx, t, g);
    return g[tap];
}

channel_realization_t generate_channel(const tap_profile_t& profile, doppler_spec_t doppler, uint32_t n_tx,
                                       uint32_t n_rx, uint64_t duration_samples, uint64_t seed,
                                       double sample_rate_hz) {
    return channel_realization_t(profile, doppler, n_tx, n_rx, duration_samples, seed, sample_rate_hz);
}

int64_t channel_tail_samples(const channel_realization_t& h) {
    int64_t m_max = 0;
    for (size_t l = 0; l < h.n_taps(); ++l) {
        const auto& f = h.delay_filter(l);
        m_max = std::max(m_max, f.first + static_cast<int64_t>(f.coef.size()) - 1);
    }
    return m_max;
}

std::vector<std::vector<cf_t>> apply_channel(const std::vector<std::vector<cf_t>>& tx, double rate_hz,
                                             const channel_realization_t& h, int64_t t0_samples) {
    return apply_impl<float>(tx, rate_hz, h, t0_samples);
}

std::vector<std::vector<cd_t>> apply_channel(const std::vector<std::vector<cd_t>>& tx, double rate_hz,
                                             const channel_realization_t& h, int64_t t0_samples) {
    return apply_impl<double>(tx, rate_hz, h, t0_samples);
}

}  // namespace dectsim::channel
