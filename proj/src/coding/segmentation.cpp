// SPDX-License-Identifier: Apache-2.0

#include "dectsim/coding/segmentation.hpp"

#include <algorithm>
#include <array>

#include "dectsim/coding/crc.hpp"

namespace dectsim::coding {

namespace {

constexpr std::array<uint32_t, 188> make_legal_sizes() {
    std::array<uint32_t, 188> k{};
    uint32_t i = 0;
    for (uint32_t v = 40; v <= 512; v += 8) k[i++] = v;
    for (uint32_t v = 528; v <= 1024; v += 16) k[i++] = v;
    for (uint32_t v = 1056; v <= 2048; v += 32) k[i++] = v;
    for (uint32_t v = 2112; v <= 6144; v += 64) k[i++] = v;
    return k;
}

constexpr auto legal_sizes = make_legal_sizes();

}  // namespace

std::span<const uint32_t> legal_block_sizes() { return legal_sizes; }

bool is_legal_block_size(uint32_t K) {
    return std::binary_search(legal_sizes.begin(), legal_sizes.end(), K);
}

segmentation_t plan_segmentation(uint32_t B, uint32_t max_block) {
    if (max_block != max_code_block_small && max_block != max_code_block_large) {
        throw validation_error("maximum code block size must be 2048 or 6144, got " + std::to_string(max_block));
    }
    if (B == 0) {
        throw validation_error("cannot segment an empty transport block");
    }

    segmentation_t s;
    s.B = B;
    uint32_t B_prime = B;
    if (B > max_block) {
        s.L = 24;
        s.C = (B + (max_block - s.L) - 1) / (max_block - s.L);
        B_prime = B + s.C * s.L;
    }

    const auto k_plus = std::find_if(legal_sizes.begin(), legal_sizes.end(),
                                     [&](uint32_t k) { return uint64_t{s.C} * k >= B_prime; });
    if (k_plus == legal_sizes.end()) {
        throw validation_error("transport block of " + std::to_string(B) + " bits does not fit the block table");
    }
    s.K_plus = *k_plus;

    if (s.C == 1) {
        s.C_plus = 1;
        s.C_minus = 0;
        s.K_minus = 0;
    } else {
        s.K_minus = *(k_plus - 1);
        const uint32_t dK = s.K_plus - s.K_minus;
        s.C_minus = (s.C * s.K_plus - B_prime) / dK;
        s.C_plus = s.C - s.C_minus;
    }
    s.F = s.C_plus * s.K_plus + s.C_minus * s.K_minus - B_prime;
    return s;
}

std::vector<bits_t> segment_code_blocks(std::span<const uint8_t> tb_with_crc, uint32_t max_block) {
    const segmentation_t plan = plan_segmentation(static_cast<uint32_t>(tb_with_crc.size()), max_block);
    std::vector<bits_t> blocks(plan.C);
    size_t pos = 0;
    for (uint32_t r = 0; r < plan.C; ++r) {
        const uint32_t K = plan.block_size(r);
        const uint32_t F = plan.filler(r);
        const uint32_t n_payload = K - F - plan.L;
        bits_t& blk = blocks[r];
        blk.assign(F, 0);
        blk.insert(blk.end(), tb_with_crc.begin() + pos, tb_with_crc.begin() + pos + n_payload);
        pos += n_payload;
        if (plan.L > 0) {
            blk = crc_attach(blk, crc_kind_t::crc24b);
        }
    }
    return blocks;
}

bits_t desegment_code_blocks(const std::vector<bits_t>& blocks, const segmentation_t& plan) {
    if (blocks.size() != plan.C) {
        throw validation_error("desegment: block count does not match the plan");
    }
    bits_t out;
    out.reserve(plan.B);
    for (uint32_t r = 0; r < plan.C; ++r) {
        const uint32_t K = plan.block_size(r);
        if (blocks[r].size() != K) {
            throw validation_error("desegment: block " + std::to_string(r) + " has the wrong size");
        }
        out.insert(out.end(), blocks[r].begin() + plan.filler(r), blocks[r].end() - plan.L);
    }
    return out;
}

}  // namespace dectsim::coding
