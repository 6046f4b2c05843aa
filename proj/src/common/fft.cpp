// SPDX-License-Identifier: Apache-2.0

#include "dectsim/common/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace dectsim::dft {

namespace {

// Eigen::FFT caches twiddles per instance and is not safe to share between threads.
Eigen::FFT<float>& engine() {
    thread_local Eigen::FFT<float> fft = [] {
        Eigen::FFT<float> f;
        f.SetFlag(Eigen::FFT<float>::Unscaled);
        return f;
    }();
    return fft;
}

}  // namespace

void forward(std::span<const cf_t> in, std::span<cf_t> out) {
    if (in.size() != out.size()) {
        throw validation_error("dft::forward: input and output sizes differ");
    }
    engine().fwd(out.data(), in.data(), static_cast<int>(in.size()));
}

void inverse(std::span<const cf_t> in, std::span<cf_t> out) {
    if (in.size() != out.size()) {
        throw validation_error("dft::inverse: input and output sizes differ");
    }
    engine().inv(out.data(), in.data(), static_cast<int>(in.size()));
}

}  // namespace dectsim::dft
