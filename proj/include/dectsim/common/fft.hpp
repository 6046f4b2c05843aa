// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "dectsim/common/types.hpp"

namespace dectsim::dft {

/// Unnormalized forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N). Any N.
void forward(std::span<const cf_t> in, std::span<cf_t> out);

/// Unnormalized inverse DFT, x[n] = sum_k X[k] exp(+j 2 pi k n / N).
void inverse(std::span<const cf_t> in, std::span<cf_t> out);

}  // namespace dectsim::dft
