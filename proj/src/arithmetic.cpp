// SPDX-License-Identifier: Apache-2.0
#include "minmod/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "minmod/error.hpp"

namespace minmod {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

// || p * u || with u reduced mod 1 first.
double multiple_dist(long long p, double u) { return torus_dist(static_cast<double>(p) * frac(u)); }

}  // namespace

double torus_dist(double x)
{
    const double r = frac(x);
    return std::min(r, 1.0 - r);
}

PhaseTuple::PhaseTuple(std::vector<double> angles, int scale) : t(std::move(angles)), n(scale)
{
    if (t.empty())
        throw Refusal("phase tuple must have m >= 1 entries");
    for (double v : t)
        if (!std::isfinite(v))
            throw Refusal("phase tuple entries must be finite");
    if (n < 1)
        throw Refusal("phase tuple scale n must be >= 1");
}

bool is_smooth(double t, double k, int n)
{
    const double u = t / (std::numbers::pi * n);
    const auto p_max = static_cast<long long>(std::floor(k + 1.0));
    const double threshold = k / n;
    for (long long p = 1; p <= p_max; ++p)
        if (!(multiple_dist(p, u) > threshold))
            return false;
    return true;
}

bool is_smooth(const PhaseTuple& tuple, double k)
{
    return std::all_of(tuple.t.begin(), tuple.t.end(), [&](double t) { return is_smooth(t, k, tuple.n); });
}

namespace {

bool spread_impl(const PhaseTuple& tuple, double lambda, bool both_signs)
{
    const double scale = kTwoPi * tuple.n;
    const double threshold = lambda / tuple.n;
    const std::size_t m = tuple.m();
    if (m == 1)
        return both_signs ? torus_dist(tuple.t[0] / scale) >= threshold : true;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t s = r + 1; s < m; ++s) {
            if (torus_dist((tuple.t[r] - tuple.t[s]) / scale) < threshold)
                return false;
            if (both_signs && torus_dist((tuple.t[r] + tuple.t[s]) / scale) < threshold)
                return false;
        }
    }
    return true;
}

}  // namespace

bool is_spread(const PhaseTuple& tuple, double lambda) { return spread_impl(tuple, lambda, true); }

bool is_weakly_spread(const PhaseTuple& tuple, double lambda) { return spread_impl(tuple, lambda, false); }

ArithMeta classify_tuple(const PhaseTuple& tuple, std::span<const double> k_grid,
                         std::span<const double> lambda_grid)
{
    ArithMeta meta;
    for (double k : k_grid)
        if (is_smooth(tuple, k) && (!meta.smooth_k || k > *meta.smooth_k))
            meta.smooth_k = k;
    for (double l : lambda_grid) {
        if (is_spread(tuple, l) && (!meta.spread_lambda || l > *meta.spread_lambda))
            meta.spread_lambda = l;
        if (is_weakly_spread(tuple, l) && (!meta.weakly_spread_lambda || l > *meta.weakly_spread_lambda))
            meta.weakly_spread_lambda = l;
    }
    return meta;
}

bool is_bad_mesh_point(std::size_t alpha, const MeshConfig& mesh, double kappa)
{
    // t/(pi n) = x_alpha/pi = 2 alpha / N, so || p0 t/(pi n) || = dist(2 p0 alpha mod N) / N.
    const double k = std::pow(static_cast<double>(mesh.n), kappa);
    const auto p_max = static_cast<long long>(std::floor(k + 1.0));
    const auto N = static_cast<long long>(mesh.n_effective);
    const double threshold = k / mesh.n;
    for (long long p = 1; p <= p_max; ++p) {
        const long long r = (2 * p * static_cast<long long>(alpha)) % N;
        const double d = static_cast<double>(std::min(r, N - r)) / static_cast<double>(N);
        if (!(d > threshold))
            return true;
    }
    return false;
}

std::vector<bool> classify_bad_arcs(const MeshConfig& mesh, double kappa)
{
    if (!(kappa > 0.0 && kappa < 1.0))
        throw Refusal("kappa must lie in (0, 1)");
    std::vector<bool> mask(mesh.n_effective);
    for (std::size_t alpha = 1; alpha <= mesh.n_effective; ++alpha)
        mask[alpha - 1] = is_bad_mesh_point(alpha, mesh, kappa);
    return mask;
}

double dilation_score(const PhaseTuple& tuple, long long l)
{
    const double scale = kTwoPi * tuple.n;
    const std::size_t m = tuple.m();
    if (m == 1)
        return multiple_dist(l, tuple.t[0] / scale);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t s = r + 1; s < m; ++s) {
            worst = std::min(worst, multiple_dist(l, (tuple.t[r] - tuple.t[s]) / scale));
            worst = std::min(worst, multiple_dist(l, (tuple.t[r] + tuple.t[s]) / scale));
        }
    }
    return worst;
}

Dilation find_dilation(const PhaseTuple& tuple, double lambda, double k)
{
    if (!(lambda > 0.0) || !(k > 0.0))
        throw Refusal("find_dilation needs lambda > 0 and K > 0");
    const auto lo = static_cast<long long>(std::ceil(tuple.n / (2.0 * k)));
    const auto hi = static_cast<long long>(std::floor(tuple.n / k));
    if (lo > hi || hi < 1)
        throw Refusal("dilation interval [n/(2K), n/K] contains no integer");
    Dilation best;
    best.l = std::max<long long>(lo, 1);
    best.achieved = -1.0;
    for (long long l = std::max<long long>(lo, 1); l <= hi; ++l) {
        const double score = dilation_score(tuple, l);
        if (score > best.achieved) {
            best.achieved = score;
            best.l = l;
        }
    }
    best.precondition_met = is_spread(tuple, lambda);
    return best;
}

PigeonholeShift find_pigeonhole_shift(const PhaseTuple& tuple, long long q_max)
{
    if (q_max < 1)
        throw Refusal("pigeonhole search needs q_max >= 1");
    const double scale = kTwoPi * tuple.n;
    double best = std::numeric_limits<double>::infinity();
    PigeonholeShift out;
    for (long long q = 1; q <= q_max; ++q) {
        double sum = 0.0;
        for (double t : tuple.t) {
            const double d = multiple_dist(q, t / scale);
            sum += d * d;
        }
        if (sum < best) {
            best = sum;
            out.q0 = q;
        }
    }
    for (double t : tuple.t) {
        const double v = static_cast<double>(out.q0) * frac(t / scale);
        out.s.push_back(v - std::round(v));
    }
    return out;
}

PhaseTuple random_tuple(int n, std::size_t m, double smooth_k, double spread_lambda, Engine& rng, int max_tries)
{
    if (m < 1)
        throw Refusal("random tuple needs m >= 1");
    std::uniform_real_distribution<double> angle(0.0, kTwoPi * n);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<double> t(m);
        for (auto& v : t)
            v = angle(rng);
        PhaseTuple tuple(std::move(t), n);
        if (is_smooth(tuple, smooth_k) && is_spread(tuple, spread_lambda))
            return tuple;
    }
    throw Refusal("no smooth and spread tuple found in " + std::to_string(max_tries) + " draws");
}

}  // namespace minmod
