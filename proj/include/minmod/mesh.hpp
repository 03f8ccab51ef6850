// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace minmod {

/// Uniform mesh x_alpha = 2*pi*alpha/N, alpha = 1..N, over the circle.
///
/// `n_nominal` is floor(n^2 / (ln n)^K0). With K0 = 5 it stays below 64n until
/// n is about 1.5*10^8, so evaluation uses `n_effective = max(n_nominal, beta*n, 2n+1)`.
struct MeshConfig {
    int n = 0;
    double k0 = 5.0;
    double c0 = 2.0;
    int beta = 64;
    long long n_nominal = 0;
    std::size_t n_effective = 0;

    double x(std::size_t alpha) const { return 2.0 * std::numbers::pi * static_cast<double>(alpha) / N(); }
    double half_width() const { return std::numbers::pi / N(); }
    double N() const { return static_cast<double>(n_effective); }
};

/// Refuses n <= 2, K0 <= 4, C0 <= 0, beta < 8.
MeshConfig build_mesh(int n, double k0 = 5.0, double c0 = 2.0, int beta = 64);

}  // namespace minmod
