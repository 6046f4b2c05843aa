// SPDX-License-Identifier: Apache-2.0

#include "dectsim/coding/rate_matching.hpp"

#include <string>

namespace dectsim::coding {

namespace {

constexpr uint32_t n_columns = 32;
constexpr std::array<uint32_t, n_columns> column_permutation = {
    0, 16, 8, 24, 4, 20, 12, 28, 2, 18, 10, 26, 6, 22, 14, 30,
    1, 17, 9, 25, 5, 21, 13, 29, 3, 19, 11, 27, 7, 23, 15, 31};

}  // namespace

rate_matcher_t::rate_matcher_t(uint32_t K, uint32_t n_filler) : K_(K), F_(n_filler) {
    if (K == 0 || n_filler >= K) {
        throw validation_error("rate matcher: need K > 0 and fewer fillers than K");
    }
    const uint32_t D = K + 4;
    rows_ = (D + n_columns - 1) / n_columns;
    const uint32_t k_pi = rows_ * n_columns;
    const uint32_t n_dummy = k_pi - D;

    // y[i] of stream s maps to mother index s*D + (i - n_dummy), or null for dummies / fillers
    auto source = [&](uint32_t stream, uint32_t y_index) -> int32_t {
        if (y_index < n_dummy) return null_index;
        const uint32_t k = y_index - n_dummy;
        if (stream < 2 && k < F_) return null_index;
        return static_cast<int32_t>(stream * D + k);
    };

    std::vector<int32_t> v0(k_pi), v1(k_pi), v2(k_pi);
    uint32_t out = 0;
    for (const uint32_t col : column_permutation) {
        for (uint32_t row = 0; row < rows_; ++row, ++out) {
            v0[out] = source(0, row * n_columns + col);
            v1[out] = source(1, row * n_columns + col);
        }
    }
    for (uint32_t k = 0; k < k_pi; ++k) {
        const uint32_t pi = (column_permutation[k / rows_] + n_columns * (k % rows_) + 1) % k_pi;
        v2[k] = source(2, pi);
    }

    buffer_.resize(3 * size_t{k_pi});
    for (uint32_t k = 0; k < k_pi; ++k) {
        buffer_[k] = v0[k];
        buffer_[k_pi + 2 * k] = v1[k];
        buffer_[k_pi + 2 * k + 1] = v2[k];
    }
}

uint32_t rate_matcher_t::start_offset(uint32_t rv) const {
    const uint32_t ncb = buffer_length();
    const uint32_t blocks = (ncb + 8 * rows_ - 1) / (8 * rows_);
    return rows_ * (2 * blocks * rv + 2);
}

std::vector<uint32_t> rate_matcher_t::selection(uint32_t E, uint32_t rv) const {
    if (E == 0) throw validation_error("rate matching: E must be positive");
    if (rv > 3) throw validation_error("rate matching: rv must be 0..3, got " + std::to_string(rv));
    const uint32_t ncb = buffer_length();
    std::vector<uint32_t> idx;
    idx.reserve(E);
    uint32_t j = start_offset(rv) % ncb;
    while (idx.size() < E) {
        const int32_t m = buffer_[j];
        if (m != null_index) idx.push_back(static_cast<uint32_t>(m));
        if (++j == ncb) j = 0;
    }
    return idx;
}

bits_t rate_matcher_t::rate_match(std::span<const uint8_t> mother, uint32_t E, uint32_t rv) const {
    if (mother.size() != mother_length()) {
        throw validation_error("rate matching: mother codeword must have " + std::to_string(mother_length()) +
                               " bits");
    }
    bits_t e(E);
    const auto idx = selection(E, rv);
    for (uint32_t i = 0; i < E; ++i) e[i] = mother[idx[i]];
    return e;
}

void rate_matcher_t::derate_match(std::span<const float> llrs, uint32_t rv, std::span<float> mother_llrs) const {
    if (mother_llrs.size() != mother_length()) {
        throw validation_error("derate matching: soft buffer must have " + std::to_string(mother_length()) +
                               " entries");
    }
    const auto idx = selection(static_cast<uint32_t>(llrs.size()), rv);
    for (size_t i = 0; i < llrs.size(); ++i) mother_llrs[idx[i]] += llrs[i];
}

bits_t rate_match(std::span<const uint8_t> mother, uint32_t E, uint32_t rv) {
    if (mother.size() < 3 * 44 || (mother.size() - 12) % 3 != 0) {
        throw validation_error("rate matching: mother codeword length must be 3K + 12");
    }
    return rate_matcher_t(static_cast<uint32_t>((mother.size() - 12) / 3)).rate_match(mother, E, rv);
}

}  // namespace dectsim::coding
