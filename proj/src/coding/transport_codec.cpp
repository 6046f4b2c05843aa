// SPDX-License-Identifier: Apache-2.0

#include "dectsim/coding/transport_codec.hpp"

#include <algorithm>
#include <string>

namespace dectsim::coding {

namespace {

// LLR given to filler positions, known to be 0
constexpr float filler_llr = 1.0e4f;

}  // namespace

transport_codec_t::transport_codec_t(const transport_config_t& config) : cfg_(config) {
    if (cfg_.tbs_bits == 0) throw validation_error("transport block size must be positive");
    if (cfg_.bits_per_symbol == 0 || cfg_.coded_bits == 0 || cfg_.coded_bits % cfg_.bits_per_symbol != 0) {
        throw validation_error("coded bit count " + std::to_string(cfg_.coded_bits) +
                               " is not a positive multiple of the modulation order");
    }
    plan_ = plan_segmentation(cfg_.tbs_bits + crc_length(cfg_.tb_crc), cfg_.max_code_block);

    const uint32_t C = plan_.C;
    const uint32_t Qm = cfg_.bits_per_symbol;
    const uint32_t G_sym = cfg_.coded_bits / Qm;
    const uint32_t gamma = G_sym % C;
    for (uint32_t r = 0; r < C; ++r) {
        const uint32_t n = r < C - gamma ? G_sym / C : (G_sym + C - 1) / C;
        if (n == 0) throw validation_error("coded bit count too small for the number of code blocks");
        e_.push_back(n * Qm);
        matchers_.emplace_back(plan_.block_size(r), plan_.filler(r));
        decoders_.emplace_back(plan_.block_size(r), cfg_.decoder);
    }
    selection_.resize(4);
    for (uint32_t rv = 0; rv < 4; ++rv) {
        for (uint32_t r = 0; r < C; ++r) selection_[rv].push_back(matchers_[r].selection(e_[r], rv));
    }
    decoded_.resize(C);
}

std::vector<bits_t> transport_codec_t::encode_blocks(std::span<const uint8_t> payload) const {
    if (payload.size() != cfg_.tbs_bits) {
        throw validation_error("payload has " + std::to_string(payload.size()) + " bits, expected " +
                               std::to_string(cfg_.tbs_bits));
    }
    const bits_t tb = crc_attach(payload, cfg_.tb_crc);
    std::vector<bits_t> blocks = segment_code_blocks(tb, cfg_.max_code_block);
    std::vector<bits_t> codewords;
    codewords.reserve(blocks.size());
    for (const auto& b : blocks) codewords.push_back(turbo_encode(b));
    return codewords;
}

bits_t transport_codec_t::rate_match(const std::vector<bits_t>& codewords, uint32_t rv) const {
    if (rv > 3) throw validation_error("rv must be 0..3");
    if (codewords.size() != plan_.C) throw validation_error("codeword count does not match segmentation");
    bits_t out;
    out.reserve(cfg_.coded_bits);
    for (uint32_t r = 0; r < plan_.C; ++r) {
        for (const uint32_t i : selection_[rv][r]) out.push_back(codewords[r][i]);
    }
    return out;
}

bits_t transport_codec_t::encode(std::span<const uint8_t> payload, uint32_t rv) const {
    return rate_match(encode_blocks(payload), rv);
}

soft_buffer_t transport_codec_t::make_soft_buffer() const {
    soft_buffer_t b;
    for (uint32_t r = 0; r < plan_.C; ++r) b.blocks.emplace_back(matchers_[r].mother_length(), 0.0f);
    return b;
}

void transport_codec_t::harq_accumulate(soft_buffer_t& buffer, std::span<const float> llrs, uint32_t rv) const {
    if (llrs.size() != cfg_.coded_bits) {
        throw validation_error("received " + std::to_string(llrs.size()) + " LLRs, expected " +
                               std::to_string(cfg_.coded_bits));
    }
    if (rv > 3) throw validation_error("rv must be 0..3");
    if (buffer.blocks.size() != plan_.C) throw validation_error("soft buffer does not match segmentation");
    size_t pos = 0;
    for (uint32_t r = 0; r < plan_.C; ++r) {
        auto& acc = buffer.blocks[r];
        if (acc.size() != matchers_[r].mother_length()) throw validation_error("soft buffer block size mismatch");
        for (const uint32_t i : selection_[rv][r]) acc[i] += llrs[pos++];
    }
    ++buffer.n_transmissions;
}

transport_decode_result_t transport_codec_t::decode(const soft_buffer_t& buffer) {
    if (buffer.blocks.size() != plan_.C) throw validation_error("soft buffer does not match segmentation");
    transport_decode_result_t res;
    const crc_kind_t block_crc = plan_.C > 1 ? crc_kind_t::crc24b : cfg_.tb_crc;
    bool all_blocks = true;
    for (uint32_t r = 0; r < plan_.C; ++r) {
        const uint32_t K = plan_.block_size(r);
        const uint32_t D = K + 4;
        work_.assign(buffer.blocks[r].begin(), buffer.blocks[r].end());
        for (uint32_t k = 0; k < plan_.filler(r); ++k) {
            work_[k] = filler_llr;
            work_[D + k] = filler_llr;
        }
        auto d = decoders_[r].decode(work_, block_crc);
        res.iterations = std::max(res.iterations, d.iterations);
        all_blocks = all_blocks && d.crc_pass;
        decoded_[r] = std::move(d.bits);
    }
    bits_t tb = desegment_code_blocks(decoded_, plan_);
    res.crc_pass = all_blocks && (plan_.C == 1 || crc_check(tb, cfg_.tb_crc));
    tb.resize(cfg_.tbs_bits);
    res.payload = std::move(tb);
    return res;
}

}  // namespace dectsim::coding
