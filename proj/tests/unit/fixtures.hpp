// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dectsim/common/types.hpp"

namespace dectsim::test {

struct turbo_vector_t {
        uint32_t K{0};
        uint32_t E{0};
        uint32_t rv{0};
        bits_t input;
        bits_t codeword;
        bits_t rate_matched;
};

/// MSB-first hex string to the first n bits.
inline bits_t hex_to_bits(const std::string& hex, size_t n) {
    bits_t out;
    for (const char c : hex) {
        const int v = std::stoi(std::string(1, c), nullptr, 16);
        for (int b = 3; b >= 0; --b) out.push_back(static_cast<uint8_t>((v >> b) & 1));
    }
    if (out.size() < n) throw std::runtime_error("hex string too short");
    out.resize(n);
    return out;
}

inline std::vector<turbo_vector_t> load_turbo_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<turbo_vector_t> out;
    std::string line;
    std::string input, codeword, matched;
    turbo_vector_t cur;
    auto flush = [&] {
        if (cur.K == 0) return;
        cur.input = hex_to_bits(input, cur.K);
        cur.codeword = hex_to_bits(codeword, 3 * cur.K + 12);
        cur.rate_matched = hex_to_bits(matched, cur.E);
        out.push_back(cur);
        cur = {};
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            if (line.empty()) flush();
            continue;
        }
        std::istringstream ls(line);
        std::string key, value;
        ls >> key >> value;
        if (key == "K") cur.K = std::stoul(value);
        else if (key == "E") cur.E = std::stoul(value);
        else if (key == "rv") cur.rv = std::stoul(value);
        else if (key == "input") input = value;
        else if (key == "codeword") codeword = value;
        else if (key == "rate_matched") matched = value;
    }
    flush();
    return out;
}

}  // namespace dectsim::test
