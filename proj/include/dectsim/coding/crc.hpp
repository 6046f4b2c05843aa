// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "dectsim/common/types.hpp"

namespace dectsim::coding {

/// Cyclic generator polynomials of the LTE transport chain. Zero-initialized register, no final XOR.
enum class crc_kind_t : uint8_t {
    crc16,   ///< D^16 + D^12 + D^5 + 1
    crc24a,  ///< transport block CRC
    crc24b,  ///< code block CRC, D^24 + D^23 + D^6 + D^5 + D + 1
};

uint32_t crc_length(crc_kind_t kind);

/// Remainder of bits(D) * D^L modulo the generator, bit 0 of the result is the last parity bit.
uint32_t crc_remainder(std::span<const uint8_t> bits, crc_kind_t kind);

/// Appends the parity bits MSB first. Throws validation_error on empty input.
bits_t crc_attach(std::span<const uint8_t> bits, crc_kind_t kind);

/// True if the trailing parity bits match the leading payload.
bool crc_check(std::span<const uint8_t> bits_with_crc, crc_kind_t kind);

}  // namespace dectsim::coding
