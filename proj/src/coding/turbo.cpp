// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dectsim/coding/segmentation.hpp"
#include "dectsim/coding/turbo.hpp"

namespace dectsim::coding {

namespace {

struct qpp_coefficients_t {
        uint16_t K;
        uint16_t f1;
        uint16_t f2;
};

// 36.212 table 5.1.3-3
constexpr qpp_coefficients_t qpp_table[188] = {
    {40, 3, 10}, {48, 7, 12}, {56, 19, 42}, {64, 7, 16},
    {72, 7, 18}, {80, 11, 20}, {88, 5, 22}, {96, 11, 24},
    {104, 7, 26}, {112, 41, 84}, {120, 103, 90}, {128, 15, 32},
    {136, 9, 34}, {144, 17, 108}, {152, 9, 38}, {160, 21, 120},
    {168, 101, 84}, {176, 21, 44}, {184, 57, 46}, {192, 23, 48},
    {200, 13, 50}, {208, 27, 52}, {216, 11, 36}, {224, 27, 56},
    {232, 85, 58}, {240, 29, 60}, {248, 33, 62}, {256, 15, 32},
    {264, 17, 198}, {272, 33, 68}, {280, 103, 210}, {288, 19, 36},
    {296, 19, 74}, {304, 37, 76}, {312, 19, 78}, {320, 21, 120},
    {328, 21, 82}, {336, 115, 84}, {344, 193, 86}, {352, 21, 44},
    {360, 133, 90}, {368, 81, 46}, {376, 45, 94}, {384, 23, 48},
    {392, 243, 98}, {400, 151, 40}, {408, 155, 102}, {416, 25, 52},
    {424, 51, 106}, {432, 47, 72}, {440, 91, 110}, {448, 29, 168},
    {456, 29, 114}, {464, 247, 58}, {472, 29, 118}, {480, 89, 180},
    {488, 91, 122}, {496, 157, 62}, {504, 55, 84}, {512, 31, 64},
    {528, 17, 66}, {544, 35, 68}, {560, 227, 420}, {576, 65, 96},
    {592, 19, 74}, {608, 37, 76}, {624, 41, 234}, {640, 39, 80},
    {656, 185, 82}, {672, 43, 252}, {688, 21, 86}, {704, 155, 44},
    {720, 79, 120}, {736, 139, 92}, {752, 23, 94}, {768, 217, 48},
    {784, 25, 98}, {800, 17, 80}, {816, 127, 102}, {832, 25, 52},
    {848, 239, 106}, {864, 17, 48}, {880, 137, 110}, {896, 215, 112},
    {912, 29, 114}, {928, 15, 58}, {944, 147, 118}, {960, 29, 60},
    {976, 59, 122}, {992, 65, 124}, {1008, 55, 84}, {1024, 31, 64},
    {1056, 17, 66}, {1088, 171, 204}, {1120, 67, 140}, {1152, 35, 72},
    {1184, 19, 74}, {1216, 39, 76}, {1248, 19, 78}, {1280, 199, 240},
    {1312, 21, 82}, {1344, 211, 252}, {1376, 21, 86}, {1408, 43, 88},
    {1440, 149, 60}, {1472, 45, 92}, {1504, 49, 846}, {1536, 71, 48},
    {1568, 13, 28}, {1600, 17, 80}, {1632, 25, 102}, {1664, 183, 104},
    {1696, 55, 954}, {1728, 127, 96}, {1760, 27, 110}, {1792, 29, 112},
    {1824, 29, 114}, {1856, 57, 116}, {1888, 45, 354}, {1920, 31, 120},
    {1952, 59, 610}, {1984, 185, 124}, {2016, 113, 420}, {2048, 31, 64},
    {2112, 17, 66}, {2176, 171, 136}, {2240, 209, 420}, {2304, 253, 216},
    {2368, 367, 444}, {2432, 265, 456}, {2496, 181, 468}, {2560, 39, 80},
    {2624, 27, 164}, {2688, 127, 504}, {2752, 143, 172}, {2816, 43, 88},
    {2880, 29, 300}, {2944, 45, 92}, {3008, 157, 188}, {3072, 47, 96},
    {3136, 13, 28}, {3200, 111, 240}, {3264, 443, 204}, {3328, 51, 104},
    {3392, 51, 212}, {3456, 451, 192}, {3520, 257, 220}, {3584, 57, 336},
    {3648, 313, 228}, {3712, 271, 232}, {3776, 179, 236}, {3840, 331, 120},
    {3904, 363, 244}, {3968, 375, 248}, {4032, 127, 168}, {4096, 31, 64},
    {4160, 33, 130}, {4224, 43, 264}, {4288, 33, 134}, {4352, 477, 408},
    {4416, 35, 138}, {4480, 233, 280}, {4544, 357, 142}, {4608, 337, 480},
    {4672, 37, 146}, {4736, 71, 444}, {4800, 71, 120}, {4864, 37, 152},
    {4928, 39, 462}, {4992, 127, 234}, {5056, 39, 158}, {5120, 39, 80},
    {5184, 31, 96}, {5248, 113, 902}, {5312, 41, 166}, {5376, 251, 336},
    {5440, 43, 170}, {5504, 21, 86}, {5568, 43, 174}, {5632, 45, 176},
    {5696, 45, 178}, {5760, 161, 120}, {5824, 89, 182}, {5888, 323, 184},
    {5952, 47, 186}, {6016, 23, 94}, {6080, 47, 190}, {6144, 263, 480},
};

// 8-state RSC trellis, state = (D, D^2, D^3) packed MSB first
struct trellis_t {
        std::array<std::array<uint8_t, 2>, 8> next{};
        std::array<std::array<uint8_t, 2>, 8> parity{};
        std::array<uint8_t, 8> tail_input{};
};

constexpr trellis_t make_trellis() {
    trellis_t t{};
    for (uint32_t s = 0; s < 8; ++s) {
        const uint32_t r0 = (s >> 2) & 1u, r1 = (s >> 1) & 1u, r2 = s & 1u;
        for (uint32_t u = 0; u < 2; ++u) {
            const uint32_t a = u ^ r1 ^ r2;
            t.parity[s][u] = static_cast<uint8_t>(a ^ r0 ^ r2);
            t.next[s][u] = static_cast<uint8_t>((a << 2) | (r0 << 1) | r1);
        }
        t.tail_input[s] = static_cast<uint8_t>(r1 ^ r2);
    }
    return t;
}

constexpr trellis_t trellis = make_trellis();

constexpr float neg_inf = -1.0e30f;

struct max_op {
        static float combine(float a, float b) { return std::max(a, b); }
};

struct max_star_op {
        static float combine(float a, float b) {
            const float m = std::max(a, b);
            const float d = std::fabs(a - b);
            return d > 20.0f ? m : m + std::log1p(std::exp(-d));
        }
};

// one constituent encoder, returns parity bits and the 3 tail (systematic, parity) pairs
void rsc_encode(std::span<const uint8_t> u, std::span<uint8_t> parity, std::array<uint8_t, 3>& tail_x,
                std::array<uint8_t, 3>& tail_z) {
    uint32_t s = 0;
    for (size_t k = 0; k < u.size(); ++k) {
        const uint32_t bit = u[k] & 1u;
        parity[k] = trellis.parity[s][bit];
        s = trellis.next[s][bit];
    }
    for (uint32_t j = 0; j < 3; ++j) {
        const uint32_t bit = trellis.tail_input[s];
        tail_x[j] = static_cast<uint8_t>(bit);
        tail_z[j] = trellis.parity[s][bit];
        s = trellis.next[s][bit];
    }
}

template <typename OP>
void siso_impl(uint32_t K, std::span<const float> sys, std::span<const float> par, std::span<const float> apriori,
               std::span<const float> tail_sys, std::span<const float> tail_par, std::span<float> extrinsic,
               std::vector<float>& alpha) {
    // alpha[k*8 + s], k = 0..K
    alpha.resize(size_t{K + 1} * 8);
    float* a = alpha.data();
    a[0] = 0.0f;
    for (uint32_t s = 1; s < 8; ++s) a[s] = neg_inf;

    for (uint32_t k = 0; k < K; ++k) {
        const float gu = 0.5f * (sys[k] + apriori[k]);
        const float gp = 0.5f * par[k];
        const float* ak = a + size_t{k} * 8;
        float* an = a + size_t{k + 1} * 8;
        for (uint32_t s = 0; s < 8; ++s) an[s] = neg_inf;
        for (uint32_t s = 0; s < 8; ++s) {
            for (uint32_t u = 0; u < 2; ++u) {
                const float g = (u ? -gu : gu) + (trellis.parity[s][u] ? -gp : gp);
                const uint32_t n = trellis.next[s][u];
                an[n] = OP::combine(an[n], ak[s] + g);
            }
        }
        const float norm = an[0];
        for (uint32_t s = 0; s < 8; ++s) an[s] -= norm;
    }

    // backward through the termination
    std::array<float, 8> beta{};
    beta.fill(neg_inf);
    beta[0] = 0.0f;
    for (int j = 2; j >= 0; --j) {
        std::array<float, 8> prev{};
        const float gu = 0.5f * tail_sys[j];
        const float gp = 0.5f * tail_par[j];
        for (uint32_t s = 0; s < 8; ++s) {
            const uint32_t u = trellis.tail_input[s];
            const float g = (u ? -gu : gu) + (trellis.parity[s][u] ? -gp : gp);
            prev[s] = beta[trellis.next[s][u]] + g;
        }
        beta = prev;
    }

    for (int k = static_cast<int>(K) - 1; k >= 0; --k) {
        const float gu = 0.5f * (sys[k] + apriori[k]);
        const float gp = 0.5f * par[k];
        const float* ak = a + size_t(k) * 8;
        float m0 = neg_inf, m1 = neg_inf;
        std::array<float, 8> prev{};
        for (uint32_t s = 0; s < 8; ++s) {
            const uint32_t n0 = trellis.next[s][0], n1 = trellis.next[s][1];
            const float p0 = trellis.parity[s][0] ? -gp : gp;
            const float p1 = trellis.parity[s][1] ? -gp : gp;
            m0 = OP::combine(m0, ak[s] + p0 + beta[n0]);
            m1 = OP::combine(m1, ak[s] + p1 + beta[n1]);
            prev[s] = OP::combine(beta[n0] + gu + p0, beta[n1] - gu + p1);
        }
        extrinsic[k] = m0 - m1;
        const float norm = prev[0];
        for (uint32_t s = 0; s < 8; ++s) beta[s] = prev[s] - norm;
    }
}

}  // namespace

qpp_interleaver_t::qpp_interleaver_t(uint32_t K) {
    const auto it = std::lower_bound(std::begin(qpp_table), std::end(qpp_table), K,
                                     [](const qpp_coefficients_t& c, uint32_t k) { return c.K < k; });
    if (it == std::end(qpp_table) || it->K != K) {
        std::string msg = "illegal turbo interleaver size K=" + std::to_string(K) + ";";
        if (it != std::begin(qpp_table)) msg += " nearest smaller " + std::to_string((it - 1)->K);
        if (it != std::end(qpp_table)) msg += " nearest larger " + std::to_string(it->K);
        throw validation_error(msg);
    }
    f1_ = it->f1;
    f2_ = it->f2;
    perm_.resize(K);
    for (uint64_t i = 0; i < K; ++i) {
        perm_[i] = static_cast<uint32_t>((f1_ * i + f2_ * ((i * i) % K)) % K);
    }
}

bits_t turbo_encode(std::span<const uint8_t> block, const qpp_interleaver_t& interleaver) {
    const uint32_t K = static_cast<uint32_t>(block.size());
    if (interleaver.size() != K) {
        throw validation_error("turbo_encode: interleaver size does not match the block");
    }
    const uint32_t D = K + 4;
    bits_t out(3 * size_t{D}, 0);
    std::span<uint8_t> d0(out.data(), D), d1(out.data() + D, D), d2(out.data() + 2 * D, D);

    bits_t interleaved(K);
    for (uint32_t i = 0; i < K; ++i) interleaved[i] = block[interleaver[i]];

    std::array<uint8_t, 3> x1{}, z1{}, x2{}, z2{};
    rsc_encode(block, d1.first(K), x1, z1);
    rsc_encode(interleaved, d2.first(K), x2, z2);
    std::copy(block.begin(), block.end(), d0.begin());

    d0[K] = x1[0], d0[K + 1] = z1[1], d0[K + 2] = x2[0], d0[K + 3] = z2[1];
    d1[K] = z1[0], d1[K + 1] = x1[2], d1[K + 2] = z2[0], d1[K + 3] = x2[2];
    d2[K] = x1[1], d2[K + 1] = z1[2], d2[K + 2] = x2[1], d2[K + 3] = z2[2];
    return out;
}

bits_t turbo_encode(std::span<const uint8_t> block) {
    return turbo_encode(block, qpp_interleaver_t(static_cast<uint32_t>(block.size())));
}

turbo_decoder_t::turbo_decoder_t(uint32_t K, turbo_decoder_config_t config)
    : K_(K),
      cfg_(config),
      interleaver_(K),
      sys1_(K),
      par1_(K),
      sys2_(K),
      par2_(K),
      le1_(K),
      le2_(K),
      la_(K),
      app_(K),
      hard_(K) {
    if (cfg_.max_iterations < 1) {
        throw validation_error("turbo decoder needs at least one iteration");
    }
}

void turbo_decoder_t::siso(std::span<const float> sys, std::span<const float> par, std::span<const float> apriori,
                           std::span<const float> tail_sys, std::span<const float> tail_par,
                           std::span<float> extrinsic) {
    if (cfg_.metric == turbo_metric_t::max_log) {
        siso_impl<max_op>(K_, sys, par, apriori, tail_sys, tail_par, extrinsic, alpha_);
    } else {
        siso_impl<max_star_op>(K_, sys, par, apriori, tail_sys, tail_par, extrinsic, alpha_);
    }
}

turbo_decode_result_t turbo_decoder_t::decode(std::span<const float> mother, crc_kind_t crc) {
    const uint32_t K = K_;
    const uint32_t D = K + 4;
    if (mother.size() != 3 * size_t{D}) {
        throw validation_error("turbo_decode: expected " + std::to_string(3 * D) + " LLRs");
    }
    const float* d0 = mother.data();
    const float* d1 = mother.data() + D;
    const float* d2 = mother.data() + 2 * D;

    const std::array<float, 3> tx1 = {d0[K], d2[K], d1[K + 1]};
    const std::array<float, 3> tz1 = {d1[K], d0[K + 1], d2[K + 1]};
    const std::array<float, 3> tx2 = {d0[K + 2], d2[K + 2], d1[K + 3]};
    const std::array<float, 3> tz2 = {d1[K + 2], d0[K + 3], d2[K + 3]};

    const auto& pi = interleaver_.permutation();
    for (uint32_t i = 0; i < K; ++i) {
        sys1_[i] = d0[i];
        par1_[i] = d1[i];
        sys2_[i] = d0[pi[i]];
        par2_[i] = d2[i];
    }
    std::fill(la_.begin(), la_.end(), 0.0f);

    const float scale = cfg_.metric == turbo_metric_t::max_log ? cfg_.extrinsic_scale : 1.0f;
    std::vector<float>& la2 = gamma_;
    la2.resize(K);

    turbo_decode_result_t result;
    for (uint32_t it = 1; it <= cfg_.max_iterations; ++it) {
        siso(sys1_, par1_, la_, tx1, tz1, le1_);
        for (uint32_t i = 0; i < K; ++i) la2[i] = scale * le1_[pi[i]];
        siso(sys2_, par2_, la2, tx2, tz2, le2_);
        for (uint32_t i = 0; i < K; ++i) {
            app_[pi[i]] = sys2_[i] + la2[i] + le2_[i];
            la_[pi[i]] = scale * le2_[i];
        }
        for (uint32_t i = 0; i < K; ++i) hard_[i] = app_[i] < 0.0f ? 1 : 0;
        result.iterations = it;
        if (crc_check(hard_, crc)) {
            result.crc_pass = true;
            break;
        }
    }
    result.bits = hard_;
    return result;
}

}  // namespace dectsim::coding
