// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dectsim {

using cf_t = std::complex<float>;
using cd_t = std::complex<double>;

/// One bit per element, values 0 or 1.
using bits_t = std::vector<uint8_t>;

/// Log-likelihood ratios, positive means bit 0 is more likely.
using llrs_t = std::vector<float>;

/// Raised when caller-supplied values violate an operation's preconditions.
class validation_error : public std::invalid_argument {
    public:
        using std::invalid_argument::invalid_argument;
};

/// Raised when an experiment or packet configuration is internally inconsistent.
class config_error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
};

/// Raised when a result or dump file cannot be read or written; the message starts with the path.
class io_error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
};

}  // namespace dectsim
