// SPDX-License-Identifier: Apache-2.0

#include "dectsim/coding/crc.hpp"

namespace dectsim::coding {

namespace {

struct generator_t {
        uint32_t length;
        uint32_t poly;  // without the leading D^L term
};

constexpr generator_t generator(crc_kind_t kind) {
    switch (kind) {
        case crc_kind_t::crc16:
            return {16, 0x1021};
        case crc_kind_t::crc24a:
            return {24, 0x864cfb};
        case crc_kind_t::crc24b:
            return {24, 0x800063};
    }
    return {0, 0};
}

}  // namespace

uint32_t crc_length(crc_kind_t kind) { return generator(kind).length; }

uint32_t crc_remainder(std::span<const uint8_t> bits, crc_kind_t kind) {
    const generator_t g = generator(kind);
    const uint32_t mask = (1u << g.length) - 1;
    const uint32_t top = g.length - 1;
    uint32_t reg = 0;
    for (const uint8_t b : bits) {
        const uint32_t feedback = ((reg >> top) ^ b) & 1u;
        reg = (reg << 1) & mask;
        if (feedback) {
            reg ^= g.poly;
        }
    }
    return reg;
}

bits_t crc_attach(std::span<const uint8_t> bits, crc_kind_t kind) {
    if (bits.empty()) {
        throw validation_error("crc_attach: empty input");
    }
    const uint32_t L = crc_length(kind);
    const uint32_t r = crc_remainder(bits, kind);
    bits_t out(bits.begin(), bits.end());
    out.reserve(bits.size() + L);
    for (uint32_t i = 0; i < L; ++i) {
        out.push_back(static_cast<uint8_t>((r >> (L - 1 - i)) & 1u));
    }
    return out;
}

bool crc_check(std::span<const uint8_t> bits_with_crc, crc_kind_t kind) {
    const uint32_t L = crc_length(kind);
    if (bits_with_crc.size() <= L) {
        return false;
    }
    // remainder of the whole codeword is zero iff the parity matches
    return crc_remainder(bits_with_crc, kind) == 0;
}

}  // namespace dectsim::coding
