// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dectsim/coding/crc.hpp"
#include "dectsim/common/types.hpp"

namespace dectsim::coding {

/// Quadratic permutation polynomial interleaver, pi(i) = (f1 i + f2 i^2) mod K.
class qpp_interleaver_t {
    public:
        /// Throws validation_error naming the nearest legal sizes when K is not in the table.
        explicit qpp_interleaver_t(uint32_t K);

        uint32_t size() const { return static_cast<uint32_t>(perm_.size()); }
        uint32_t f1() const { return f1_; }
        uint32_t f2() const { return f2_; }

        /// Interleaved position i reads input position operator[](i).
        uint32_t operator[](uint32_t i) const { return perm_[i]; }
        const std::vector<uint32_t>& permutation() const { return perm_; }

    private:
        uint32_t f1_;
        uint32_t f2_;
        std::vector<uint32_t> perm_;
};

/**
 * Rate 1/3 parallel concatenated code of two 8-state RSC encoders, g0 = 13, g1 = 15 (octal).
 *
 * Output is d0 | d1 | d2, each stream K + 4 bits long: systematic, parity 1, parity 2 for the
 * first K positions, followed by the 12 trellis-termination bits in the LTE arrangement.
 */
bits_t turbo_encode(std::span<const uint8_t> block, const qpp_interleaver_t& interleaver);
bits_t turbo_encode(std::span<const uint8_t> block);

enum class turbo_metric_t : uint8_t { max_log, log_map };

struct turbo_decoder_config_t {
        uint32_t max_iterations{8};
        turbo_metric_t metric{turbo_metric_t::max_log};
        /// Extrinsic scaling, only applied by the max-log metric.
        float extrinsic_scale{0.75f};
};

struct turbo_decode_result_t {
        bits_t bits;
        bool crc_pass{false};
        uint32_t iterations{0};
};

/**
 * Iterative soft-in/soft-out decoder for one code block. Not thread-safe (holds workspace);
 * clone per worker.
 */
class turbo_decoder_t {
    public:
        turbo_decoder_t(uint32_t K, turbo_decoder_config_t config = {});

        /**
         * `mother` holds 3K+12 LLRs in d0 | d1 | d2 order. Stops early once `crc` passes on the
         * hard decisions of the K decoded bits.
         */
        turbo_decode_result_t decode(std::span<const float> mother, crc_kind_t crc);

        uint32_t block_size() const { return K_; }

    private:
        void siso(std::span<const float> sys, std::span<const float> par, std::span<const float> apriori,
                  std::span<const float> tail_sys, std::span<const float> tail_par, std::span<float> extrinsic);

        uint32_t K_;
        turbo_decoder_config_t cfg_;
        qpp_interleaver_t interleaver_;
        std::vector<float> alpha_;
        std::vector<float> gamma_;
        std::vector<float> sys1_, par1_, sys2_, par2_;
        std::vector<float> le1_, le2_, la_;
        std::vector<float> app_;
        bits_t hard_;
};

}  // namespace dectsim::coding
