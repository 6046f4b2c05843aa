// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>

namespace dectsim {

/// splitmix64 finalizer, a bijective 64-bit mixer.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based seed derivation. Every (master, counters...) tuple maps to its own stream seed,
 * so a trial's randomness does not depend on which worker runs it or in which order.
 */
constexpr uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> counters) {
    uint64_t s = mix64(master);
    for (const uint64_t c : counters) {
        s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return s;
}

// stream tags used with derive_seed()
namespace seed_tag {
inline constexpr uint64_t payload = 1;
inline constexpr uint64_t channel = 2;
inline constexpr uint64_t noise = 3;
inline constexpr uint64_t placeholder = 4;
}  // namespace seed_tag

}  // namespace dectsim
