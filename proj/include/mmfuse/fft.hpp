#pragma once

#include <span>

#include "mmfuse/core_types.hpp"

namespace mmfuse::fft {

/// Unnormalized forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N), N = out.size().
/// `in` is zero-padded to N; in.size() must not exceed N. Safe to call
/// concurrently; plans are created once per size and shared.
void forward(std::span<const cplx> in, std::span<cplx> out);

/// Swaps halves so that bin N/2 of the result holds the zero frequency.
void shift(std::span<cplx> data);

}  // namespace mmfuse::fft
