// SPDX-License-Identifier: Apache-2.0
//
// Empirical-distribution statistics for the ensemble harness.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace minmod {

/// Limiting rate of n * m_n, 2 sqrt(pi/3).
inline const double kExponentialRate = 2.0 * std::sqrt(std::numbers::pi / 3.0);

/// Two-sample sup distance between empirical CDFs. Refuses empty input.
double ks_distance(std::span<const double> a, std::span<const double> b);
/// One-sample sup distance against a continuous CDF.
double ks_distance(std::span<const double> a, const std::function<double(double)>& cdf);

/// Limiting Kolmogorov distribution P(sqrt(M) D <= x).
double kolmogorov_cdf(double x);
/// Inverse of kolmogorov_cdf.
double kolmogorov_quantile(double p);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitReport {
    std::size_t count = 0;
    double lambda_mle = 0.0;     ///< 1 / mean
    double lambda_tail = 0.0;    ///< slope of -ln(survival) against tau
    std::size_t tail_points = 0; ///< grid points used by the tail regression
    double ks_vs_fit = 0.0;      ///< against Exp(lambda_mle)
    double ks_vs_target = 0.0;   ///< against Exp(2 sqrt(pi/3))
    Interval ci_mle;             ///< bootstrap 95%
    Interval ci_tail;            ///< bootstrap 95%
};

struct FitOptions {
    std::size_t bootstrap = 200;
    std::uint64_t seed = 7;
};

/// Exponential fit. The tail regression uses least squares with intercept over
/// the grid points where the empirical survival is at least 0.05; an empty
/// grid means 20 equally spaced points on [0, 95% quantile]. Refuses fewer
/// than 100 samples or all-equal samples.
FitReport fit_exponential(std::span<const double> samples, std::span<const double> tau_grid = {},
                          const FitOptions& opts = {});

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
    double density = 0.0;  ///< count / (total samples * width)
};

/// Equal-width bins on [lo, hi]; the last bin is closed. Refuses bins < 1 or hi <= lo.
std::vector<HistogramBin> histogram(std::span<const double> samples, int bins, double lo, double hi);
void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins);

}  // namespace minmod
