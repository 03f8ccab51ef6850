// SPDX-License-Identifier: Apache-2.0
#include "minmod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "minmod/error.hpp"
#include "minmod/rng.hpp"

namespace minmod {

double ks_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw Refusal("KS distance needs nonempty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v)
            ++i;
        while (j < y.size() && y[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_distance(std::span<const double> a, const std::function<double(double)>& cdf)
{
    if (a.empty())
        throw Refusal("KS distance needs a nonempty sample");
    std::vector<double> x(a.begin(), a.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double kolmogorov_cdf(double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x < 1.0) {
        // Small-x form converges faster.
        const double c = std::sqrt(2.0 * std::numbers::pi) / x;
        double s = 0.0;
        for (int k = 1; k < 50; ++k) {
            const double t = (2.0 * k - 1.0) * std::numbers::pi / x;
            s += std::exp(-t * t / 8.0);
        }
        return c * s;
    }
    double s = 0.0;
    for (int k = 1; k < 100; ++k)
        s += ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    return 1.0 - 2.0 * s;
}

double kolmogorov_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw Refusal("Kolmogorov quantile needs p in (0, 1)");
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double mean_of(std::span<const double> s)
{
    double m = 0.0;
    for (double v : s)
        m += v;
    return m / static_cast<double>(s.size());
}

// Survival at each tau from sorted samples.
double tail_slope(const std::vector<double>& sorted, std::span<const double> grid, std::size_t* used)
{
    const double n = static_cast<double>(sorted.size());
    std::vector<double> tx, ty;
    for (double tau : grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), tau);
        const double surv = static_cast<double>(above) / n;
        if (surv >= 0.05) {
            tx.push_back(tau);
            ty.push_back(-std::log(surv));
        }
    }
    if (used)
        *used = tx.size();
    if (tx.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double mx = mean_of(tx), my = mean_of(ty);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        sxy += (tx[i] - mx) * (ty[i] - my);
        sxx += (tx[i] - mx) * (tx[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

Interval percentile_interval(std::vector<double> v)
{
    std::erase_if(v, [](double x) { return !std::isfinite(x); });
    if (v.empty())
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1.0 - f) + v[i + 1] * f : v[i];
    };
    return {at(0.025), at(0.975)};
}

}  // namespace

FitReport fit_exponential(std::span<const double> samples, std::span<const double> tau_grid, const FitOptions& opts)
{
    if (samples.size() < 100)
        throw Refusal("exponential fit needs at least 100 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw Refusal("exponential fit refuses all-equal samples");

    std::vector<double> grid(tau_grid.begin(), tau_grid.end());
    if (grid.empty()) {
        const double q95 = sorted[static_cast<std::size_t>(0.95 * static_cast<double>(sorted.size() - 1))];
        for (int i = 0; i < 20; ++i)
            grid.push_back(q95 * i / 19.0);
    }

    FitReport r;
    r.count = sorted.size();
    r.lambda_mle = 1.0 / mean_of(sorted);
    r.lambda_tail = tail_slope(sorted, grid, &r.tail_points);
    const double lm = r.lambda_mle;
    r.ks_vs_fit = ks_distance(sorted, [lm](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-lm * x); });
    r.ks_vs_target =
        ks_distance(sorted, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-kExponentialRate * x); });

    Engine rng = make_engine(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, sorted.size() - 1);
    std::vector<double> mle, tail, resample(sorted.size());
    for (std::size_t b = 0; b < opts.bootstrap; ++b) {
        for (auto& v : resample)
            v = sorted[pick(rng)];
        std::sort(resample.begin(), resample.end());
        mle.push_back(1.0 / mean_of(resample));
        tail.push_back(tail_slope(resample, grid, nullptr));
    }
    r.ci_mle = percentile_interval(std::move(mle));
    r.ci_tail = percentile_interval(std::move(tail));
    return r;
}

std::vector<HistogramBin> histogram(std::span<const double> samples, int bins, double lo, double hi)
{
    if (bins < 1)
        throw Refusal("histogram needs at least one bin");
    if (!(hi > lo))
        throw Refusal("histogram range must have hi > lo");
    const double width = (hi - lo) / bins;
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        out[static_cast<std::size_t>(b)].left = lo + b * width;
        out[static_cast<std::size_t>(b)].right = b + 1 == bins ? hi : lo + (b + 1) * width;
    }
    for (double v : samples) {
        if (!(v >= lo && v <= hi))
            continue;
        auto b = static_cast<std::size_t>((v - lo) / width);
        b = std::min(b, out.size() - 1);
        ++out[b].count;
    }
    const double total = static_cast<double>(samples.size());
    for (auto& bin : out)
        bin.density = total > 0 ? static_cast<double>(bin.count) / (total * width) : 0.0;
    return out;
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins)
{
    os << "bin_left,bin_right,count,density\n";
    for (const auto& b : bins)
        os << b.left << ',' << b.right << ',' << b.count << ',' << b.density << '\n';
}

}  // namespace minmod
