// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>

namespace minmod::fft {

/// In-place unnormalized backward transform:
///   data[k] <- sum_m data[m] * exp(+2*pi*i*m*k/N).
/// Safe to call concurrently; plans are created once per length and shared.
void backward_inplace(std::span<std::complex<double>> data);

}  // namespace minmod::fft
