// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/coding/crc.hpp"
#include "dectsim/coding/rate_matching.hpp"
#include "dectsim/coding/segmentation.hpp"
#include "dectsim/coding/turbo.hpp"
#include "dectsim/common/types.hpp"

namespace dectsim::coding {

struct transport_config_t {
        uint32_t tbs_bits{0};
        /// G, rate-matched bits per transmission (payload capacity of the packet).
        uint32_t coded_bits{0};
        /// Modulation order, keeps per-block lengths on symbol boundaries.
        uint32_t bits_per_symbol{1};
        uint32_t max_code_block{max_code_block_large};
        crc_kind_t tb_crc{crc_kind_t::crc24a};
        turbo_decoder_config_t decoder{};
};

/// Accumulated LLRs of every code block, in mother-codeword order (3K + 12 per block).
struct soft_buffer_t {
        std::vector<llrs_t> blocks;
        uint32_t n_transmissions{0};
};

struct transport_decode_result_t {
        bits_t payload;
        bool crc_pass{false};
        /// Largest iteration count over the code blocks.
        uint32_t iterations{0};
};

/**
 * Transport block chain: CRC attachment, segmentation, turbo coding, rate matching, HARQ soft
 * combining and decoding. Holds decoder workspace, so each worker needs its own instance.
 */
class transport_codec_t {
    public:
        /// Throws validation_error if G is not a positive multiple of bits_per_symbol or TBS is 0.
        explicit transport_codec_t(const transport_config_t& config);

        const transport_config_t& config() const { return cfg_; }
        const segmentation_t& segmentation() const { return plan_; }
        /// E_r of code block r.
        uint32_t block_e(uint32_t r) const { return e_[r]; }

        /// Turbo codewords of every code block; use with rate_match() to build each transmission.
        std::vector<bits_t> encode_blocks(std::span<const uint8_t> payload) const;
        bits_t rate_match(const std::vector<bits_t>& codewords, uint32_t rv) const;
        /// encode_blocks() followed by rate_match().
        bits_t encode(std::span<const uint8_t> payload, uint32_t rv) const;

        soft_buffer_t make_soft_buffer() const;
        /// Throws validation_error when llrs.size() != G.
        void harq_accumulate(soft_buffer_t& buffer, std::span<const float> llrs, uint32_t rv) const;

        transport_decode_result_t decode(const soft_buffer_t& buffer);

    private:
        transport_config_t cfg_;
        segmentation_t plan_;
        std::vector<uint32_t> e_;
        std::vector<rate_matcher_t> matchers_;
        std::vector<turbo_decoder_t> decoders_;
        std::vector<std::vector<std::vector<uint32_t>>> selection_;  // [rv][block]
        llrs_t work_;
        std::vector<bits_t> decoded_;
};

}  // namespace dectsim::coding
