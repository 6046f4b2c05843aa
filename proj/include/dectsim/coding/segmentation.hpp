// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/common/types.hpp"

namespace dectsim::coding {

/// Maximum code block sizes selectable per configuration; LTE only has the larger one.
inline constexpr uint32_t max_code_block_small = 2048;
inline constexpr uint32_t max_code_block_large = 6144;

/**
 * LTE-style segmentation plan for B = TBS + 24 bits.
 *
 * Blocks 0 .. C_minus-1 have K_minus bits, the rest K_plus. F filler bits (value 0) are prepended
 * to block 0. With C > 1 each block ends in a CRC24B over its content.
 */
struct segmentation_t {
        uint32_t B{0};
        uint32_t C{1};
        uint32_t L{0};
        uint32_t K_plus{0};
        uint32_t K_minus{0};
        uint32_t C_plus{1};
        uint32_t C_minus{0};
        uint32_t F{0};

        uint32_t block_size(uint32_t r) const { return r < C_minus ? K_minus : K_plus; }
        uint32_t filler(uint32_t r) const { return r == 0 ? F : 0; }

        bool operator==(const segmentation_t&) const = default;
};

/// Legal turbo interleaver sizes, 40 to 6144.
std::span<const uint32_t> legal_block_sizes();
bool is_legal_block_size(uint32_t K);

/// Throws validation_error when max_block is not one of the two configured maxima or B is 0.
segmentation_t plan_segmentation(uint32_t B, uint32_t max_block = max_code_block_large);

std::vector<bits_t> segment_code_blocks(std::span<const uint8_t> tb_with_crc,
                                        uint32_t max_block = max_code_block_large);

/// Inverse of segment_code_blocks(); drops fillers and block CRCs.
bits_t desegment_code_blocks(const std::vector<bits_t>& blocks, const segmentation_t& plan);

}  // namespace dectsim::coding
