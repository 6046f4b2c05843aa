// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/common/types.hpp"

namespace dectsim::coding {

/// Redundancy version used by transmission i (0-based) of one HARQ process.
inline constexpr std::array<uint32_t, 4> rv_sequence = {0, 2, 3, 1};
inline uint32_t rv_for_transmission(uint32_t i) { return rv_sequence[i % rv_sequence.size()]; }

/**
 * Circular-buffer rate matcher for one turbo code block of K bits.
 *
 * The mother codeword is d0 | d1 | d2 (3K + 12 bits). Each stream passes a 32-column sub-block
 * interleaver; the buffer is v0 followed by v1 and v2 interleaved bit by bit. Dummy positions and
 * the first `n_filler` systematic and parity-1 positions are skipped during bit selection.
 */
class rate_matcher_t {
    public:
        static constexpr int32_t null_index = -1;

        explicit rate_matcher_t(uint32_t K, uint32_t n_filler = 0);

        uint32_t block_size() const { return K_; }
        uint32_t n_filler() const { return F_; }
        uint32_t mother_length() const { return 3 * (K_ + 4); }
        /// Ncb = 3 * R * 32, including dummy positions.
        uint32_t buffer_length() const { return static_cast<uint32_t>(buffer_.size()); }
        uint32_t n_rows() const { return rows_; }
        /// Buffer position where selection for `rv` starts.
        uint32_t start_offset(uint32_t rv) const;

        /// Mother-codeword index of each buffer position, null_index for skipped positions.
        const std::vector<int32_t>& circular_buffer() const { return buffer_; }

        /// Mother-codeword index of each of the E selected bits. Throws validation_error if E == 0 or rv > 3.
        std::vector<uint32_t> selection(uint32_t E, uint32_t rv) const;

        bits_t rate_match(std::span<const uint8_t> mother, uint32_t E, uint32_t rv) const;

        /// Adds each received LLR into `mother_llrs` at its mother-codeword index.
        void derate_match(std::span<const float> llrs, uint32_t rv, std::span<float> mother_llrs) const;

    private:
        uint32_t K_;
        uint32_t F_;
        uint32_t rows_;
        std::vector<int32_t> buffer_;
};

/// Convenience form without fillers; K is inferred as (size - 12) / 3.
bits_t rate_match(std::span<const uint8_t> mother, uint32_t E, uint32_t rv);

}  // namespace dectsim::coding
