// SPDX-License-Identifier: Apache-2.0
#include "minmod/phasewalk.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "minmod/error.hpp"
#include "minmod/parallel.hpp"

namespace minmod {

namespace {

double binom(int k, int i)
{
    double r = 1.0;
    for (int s = 1; s <= i; ++s)
        r = r * (k - i + s) / s;
    return r;
}

}  // namespace

IndexRange default_range(const PhaseTuple& tuple, WalkVariant variant)
{
    return variant == WalkVariant::Full4m ? IndexRange{-tuple.n, tuple.n} : IndexRange{1, tuple.n};
}

Eigen::VectorXd step_vector(const PhaseTuple& tuple, int j)
{
    const auto m = static_cast<Eigen::Index>(tuple.m());
    const double jn = static_cast<double>(j) / tuple.n;
    Eigen::VectorXd w(4 * m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double arg = j * tuple.t[static_cast<std::size_t>(r)] / tuple.n;
        const double a = std::sin(arg);
        const double b = std::cos(arg);
        w[r] = a;
        w[m + r] = jn * b;
        w[2 * m + r] = b;
        w[3 * m + r] = -jn * a;
    }
    return w;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> complex_step_vectors(const PhaseTuple& tuple, int j)
{
    const auto m = static_cast<Eigen::Index>(tuple.m());
    const Eigen::VectorXd w = step_vector(tuple, j);
    return {w.head(2 * m), w.tail(2 * m)};
}

StepMatrix step_matrix(const PhaseTuple& tuple, IndexRange range, WalkVariant variant)
{
    if (range.lo < -tuple.n || range.hi > tuple.n)
        throw Refusal("step range must lie inside [-n, n]");
    StepMatrix s{tuple, range, variant, {}};
    const auto m = static_cast<Eigen::Index>(tuple.m());
    const auto count = static_cast<Eigen::Index>(range.size());
    if (variant == WalkVariant::Full4m) {
        s.rows.resize(count, 4 * m);
        for (int j = range.lo; j <= range.hi; ++j)
            s.rows.row(j - range.lo) = step_vector(tuple, j).transpose();
    } else {
        s.rows.resize(2 * count, 2 * m);
        for (int j = range.lo; j <= range.hi; ++j) {
            auto [u, v] = complex_step_vectors(tuple, j);
            s.rows.row(2 * (j - range.lo)) = u.transpose();
            s.rows.row(2 * (j - range.lo) + 1) = v.transpose();
        }
    }
    return s;
}

Covariance covariance(const StepMatrix& steps)
{
    if (steps.rows.rows() < steps.dim())
        throw Refusal("covariance needs at least as many steps as walk dimensions");
    Covariance c;
    c.v = steps.rows.transpose() * steps.rows / static_cast<double>(steps.rows.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.v, Eigen::EigenvaluesOnly);
    c.sigma_min = eig.eigenvalues().minCoeff();
    return c;
}

Covariance covariance(const PhaseTuple& tuple, IndexRange range, WalkVariant variant)
{
    return covariance(step_matrix(tuple, range, variant));
}

WalkSampler::WalkSampler(StepMatrix steps, CoefficientDist dist) : steps_(std::move(steps)), dist_(std::move(dist))
{
    wt_ = steps_.rows.transpose() / std::sqrt(static_cast<double>(steps_.rows.rows()));
}

Eigen::MatrixXd WalkSampler::draw(std::size_t count, Engine& rng) const
{
    const Eigen::Index rows = steps_.rows.rows();
    Eigen::MatrixXd xi(rows, static_cast<Eigen::Index>(count));
    if (dist_.kind() == DistKind::Rademacher) {
        // 64 signs per engine call.
        double* data = xi.data();
        const auto total = static_cast<std::size_t>(xi.size());
        std::size_t i = 0;
        while (i < total) {
            std::uint64_t bits = rng();
            const std::size_t stop = std::min<std::size_t>(total, i + 64);
            for (; i < stop; ++i, bits >>= 1)
                data[i] = (bits & 1U) ? 1.0 : -1.0;
        }
    } else {
        for (Eigen::Index c = 0; c < xi.cols(); ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                xi(r, c) = dist_.sample_real(rng);
    }
    return wt_ * xi;
}

void for_each_walk_batch(const WalkSampler& sampler, std::size_t total, std::uint64_t seed, unsigned threads,
                         const std::function<void(std::size_t, const Eigen::MatrixXd&)>& visit)
{
    const std::size_t batches = (total + kWalkBatch - 1) / kWalkBatch;
    parallel_for(batches, threads, [&](std::size_t b) {
        Engine rng = make_engine(split_seed(seed, b));
        const std::size_t count = std::min(kWalkBatch, total - b * kWalkBatch);
        visit(b, sampler.draw(count, rng));
    });
}

WalkSample sample_walk(const StepMatrix& steps, const CoefficientDist& dist, std::uint64_t seed)
{
    WalkSampler sampler(steps, dist);
    Engine rng = make_engine(seed);
    return {sampler.draw(1, rng).col(0), seed, dist.kind()};
}

WalkSample sample_walk(const PhaseTuple& tuple, const CoefficientDist& dist, std::uint64_t seed, WalkVariant variant)
{
    return sample_walk(step_matrix(tuple, default_range(tuple, variant), variant), dist, seed);
}

CharFnValue charfn_log_modulus(const StepMatrix& steps, const Eigen::VectorXd& x, const CoefficientDist& dist,
                               const CharFnOptions& opts)
{
    if (x.size() != steps.dim())
        throw Refusal("probe dimension does not match the walk");
    if (!x.allFinite())
        throw Refusal("probe must be finite");
    const Eigen::VectorXd u = steps.rows * x;
    CharFnValue out;

    switch (dist.kind()) {
    case DistKind::GaussianReal:
    case DistKind::GaussianComplexSplit:
        out.log_modulus = -0.5 * u.squaredNorm();
        return out;
    case DistKind::Rademacher:
    case DistKind::UniformSymmetric: {
        const bool rad = dist.kind() == DistKind::Rademacher;
        const double r3 = std::sqrt(3.0);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            double f;
            if (rad) {
                f = std::abs(std::cos(u[i]));
            } else {
                const double z = r3 * u[i];
                f = z == 0.0 ? 1.0 : std::abs(std::sin(z) / z);
            }
            if (f == 0.0) {
                out.saturated = true;
                out.log_modulus = kLogZeroSentinel;
                return out;
            }
            sum += std::log(f);
        }
        out.log_modulus = sum;
        return out;
    }
    case DistKind::Custom:
        break;
    }

    // Monte Carlo estimate of each factor E exp(i u_j xi) from one shared
    // sample of xi. The reported error adds per-factor errors linearly, which
    // is conservative for the correlated estimates.
    out.exact = false;
    Engine rng = make_engine(opts.seed);
    std::vector<double> draws(opts.samples);
    for (auto& d : draws)
        d = dist.sample_real(rng);
    const double s = static_cast<double>(opts.samples);
    double sum = 0.0, err = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
        for (double d : draws) {
            const double c = std::cos(u[i] * d), sn = std::sin(u[i] * d);
            re += c;
            im += sn;
            re2 += c * c;
            im2 += sn * sn;
        }
        re /= s;
        im /= s;
        const double mod2 = re * re + im * im;
        const double var = (re2 / s - re * re + im2 / s - im * im) / s;
        if (mod2 == 0.0) {
            out.saturated = true;
            out.log_modulus = kLogZeroSentinel;
            return out;
        }
        sum += 0.5 * std::log(mod2);
        err += std::sqrt(var / mod2);
    }
    out.log_modulus = sum;
    out.stderr = err;
    if (out.stderr > opts.max_stderr)
        throw Refusal("Monte Carlo characteristic function error " + std::to_string(out.stderr) +
                      " exceeds the requested precision at " + std::to_string(opts.samples) + " samples");
    return out;
}

CharFnValue charfn_log_modulus(const PhaseTuple& tuple, const Eigen::VectorXd& x, const CoefficientDist& dist,
                               const CharFnOptions& opts)
{
    return charfn_log_modulus(step_matrix(tuple, default_range(tuple, WalkVariant::Full4m)), x, dist, opts);
}

XiNorm xi_norm(double w, const CoefficientDist& dist, std::size_t samples, std::uint64_t seed)
{
    if (dist.kind() == DistKind::Rademacher) {
        const double d = torus_dist(2.0 * w);
        return {std::sqrt(d * d / 2.0), 0.0};
    }
    if (samples < 1000)
        throw Refusal("xi-norm Monte Carlo needs at least 1000 samples");
    Engine rng = make_engine(seed);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = dist.sample_real(rng);
        const double b = dist.sample_real(rng);
        const double d = torus_dist(w * (a - b));
        s1 += d * d;
        s2 += d * d * d * d;
    }
    const double m = static_cast<double>(samples);
    const double mean = s1 / m;
    const double se_mean = std::sqrt(std::max(s2 / m - mean * mean, 0.0) / m);
    const double value = std::sqrt(mean);
    return {value, value > 0 ? se_mean / (2.0 * value) : std::sqrt(se_mean)};
}

double psi_value(const PhaseTuple& tuple, std::span<const double> y, std::span<const double> y_prime, long long j,
                 PsiVariant variant)
{
    const double jn = static_cast<double>(j) / tuple.n;
    double sum = 0.0;
    for (std::size_t r = 0; r < tuple.m(); ++r) {
        const double arg = static_cast<double>(j) * tuple.t[r] / tuple.n;
        if (variant == PsiVariant::Psi)
            sum += y[r] * std::cos(arg) - y_prime[r] * jn * std::sin(arg);
        else
            sum += y[r] * std::sin(arg) + y_prime[r] * jn * std::cos(arg);
    }
    return sum;
}

PsiSequence psi_sequence(const PhaseTuple& tuple, std::vector<double> y, std::vector<double> y_prime, long long j_lo,
                         long long j_hi, PsiVariant variant)
{
    if (y.size() != tuple.m() || y_prime.size() != tuple.m())
        throw Refusal("y and y' must have m entries");
    PsiSequence seq{tuple, std::move(y), std::move(y_prime), variant, j_lo, {}};
    for (long long j = j_lo; j <= j_hi; ++j)
        seq.values.push_back(psi_value(tuple, seq.y, seq.y_prime, j, variant));
    return seq;
}

template <class T>
std::vector<T> finite_difference(std::span<const T> seq, int k, int q)
{
    if (k < 1 || q < 1)
        throw Refusal("finite difference needs k >= 1 and q >= 1");
    const long long reach = static_cast<long long>(k) * q;
    if (static_cast<long long>(seq.size()) <= reach)
        return {};
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i)
        c[static_cast<std::size_t>(i)] = ((i % 2) ? -1.0 : 1.0) * binom(k, i);
    std::vector<T> out(seq.size() - static_cast<std::size_t>(reach));
    for (std::size_t j = 0; j < out.size(); ++j) {
        T acc{};
        for (int i = 0; i <= k; ++i)
            acc += c[static_cast<std::size_t>(i)] * seq[j + static_cast<std::size_t>(i) * static_cast<std::size_t>(q)];
        out[j] = acc;
    }
    return out;
}

template std::vector<double> finite_difference<double>(std::span<const double>, int, int);
template std::vector<std::complex<double>> finite_difference<std::complex<double>>(
    std::span<const std::complex<double>>, int, int);

std::vector<std::complex<double>> twisted_difference(std::span<const std::complex<double>> seq, double t0, int l,
                                                     int n)
{
    if (l < 1)
        throw Refusal("twisted difference needs L >= 1");
    const auto reach = static_cast<std::size_t>(2 * l);
    if (seq.size() <= reach)
        return {};
    const std::complex<double> w1 = -2.0 * e_n(-static_cast<double>(l) * t0, n);
    const std::complex<double> w2 = e_n(-2.0 * l * t0, n);
    std::vector<std::complex<double>> out(seq.size() - reach);
    const auto L = static_cast<std::size_t>(l);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = seq[j] + w1 * seq[j + L] + w2 * seq[j + 2 * L];
    return out;
}

ShiftBoundSides shift_bound_sides(const PhaseTuple& tuple, std::span<const double> y, std::span<const double> y_prime,
                                  long long j, long long l, long long l_prime, long long ell, long long q0, int k)
{
    const auto m = static_cast<long long>(tuple.m());
    if (y.size() != tuple.m() || y_prime.size() != tuple.m())
        throw Refusal("y and y' must have m entries");
    if (l < 1 || l_prime < 1 || ell < 1 || q0 < 1 || k < 1 || j < 0)
        throw Refusal("shift bound needs positive L, L', ell, q0, k and j >= 0");
    const long long top = j + k * ell * q0 + 4 * (m - 1) * l + 3 * l_prime;
    if (top > tuple.n)
        throw Refusal("shift window [j, " + std::to_string(top) + "] leaves the psi domain [0, " +
                      std::to_string(tuple.n) + "]");

    const int n = tuple.n;
    const double t1 = tuple.t[0];
    const std::complex<double> one{1.0, 0.0};
    std::complex<double> prod = y_prime[0] * std::pow(one - e_n(2.0 * static_cast<double>(l_prime) * t1, n), 2) *
                                std::pow(one - e_n(static_cast<double>(ell * q0) * t1, n), k);
    for (std::size_t r = 1; r < tuple.m(); ++r) {
        prod *= std::pow(one - e_n(static_cast<double>(l) * (t1 - tuple.t[r]), n), 2);
        prod *= std::pow(one - e_n(static_cast<double>(l) * (t1 + tuple.t[r]), n), 2);
    }
    ShiftBoundSides out;
    out.lhs = static_cast<double>(l_prime) / n * std::abs(prod);
    for (int i = 1; i <= k; ++i)
        for (long long a = 0; a <= 4 * (m - 1); ++a)
            for (long long b = 0; b <= 3; ++b)
                out.rhs += torus_dist(psi_value(tuple, y, y_prime, j + i * ell * q0 + a * l + b * l_prime));
    return out;
}

int default_difference_order(std::size_t m, double k_star, double kappa)
{
    return static_cast<int>(std::floor(4.0 * static_cast<double>(m) * k_star / kappa)) + 1;
}

std::vector<SmallBall> small_ball_profile(const PhaseTuple& tuple, const CoefficientDist& dist,
                                          const Eigen::VectorXd& center, std::span<const double> deltas,
                                          std::size_t samples, std::uint64_t seed, unsigned threads)
{
    if (samples < 10000)
        throw Refusal("small-ball estimates need at least 10^4 samples");
    WalkSampler sampler(step_matrix(tuple, default_range(tuple, WalkVariant::Full4m)), dist);
    if (center.size() != sampler.steps().dim())
        throw Refusal("small-ball center dimension does not match the walk");

    const std::size_t batches = (samples + kWalkBatch - 1) / kWalkBatch;
    std::vector<std::vector<std::size_t>> hits(batches, std::vector<std::size_t>(deltas.size(), 0));
    for_each_walk_batch(sampler, samples, seed, threads, [&](std::size_t b, const Eigen::MatrixXd& s) {
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            const double dist2 = (s.col(c) - center).squaredNorm();
            for (std::size_t d = 0; d < deltas.size(); ++d)
                if (dist2 <= deltas[d] * deltas[d])
                    ++hits[b][d];
        }
    });

    std::vector<SmallBall> out(deltas.size());
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        std::size_t h = 0;
        for (const auto& row : hits)
            h += row[d];
        const double p = static_cast<double>(h) / static_cast<double>(samples);
        out[d] = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
    }
    return out;
}

SmallBall small_ball_estimate(const PhaseTuple& tuple, const CoefficientDist& dist, const Eigen::VectorXd& center,
                              double delta, std::size_t samples, std::uint64_t seed, unsigned threads)
{
    const double d[1] = {delta};
    return small_ball_profile(tuple, dist, center, d, samples, seed, threads)[0];
}

SmallBall polynomial_small_ball(double t, int n, const CoefficientDist& dist, PolyQuantity which, double delta,
                                std::size_t samples, std::uint64_t seed, unsigned threads)
{
    if (samples < 10000)
        throw Refusal("small-ball estimates need at least 10^4 samples");
    // Walk coordinates for m = 1: (Im Pt, Im Pt', Re Pt, Re Pt').
    const PhaseTuple tuple({t}, n);
    WalkSampler sampler(step_matrix(tuple, default_range(tuple, WalkVariant::Full4m)), dist);
    const Eigen::Index re = which == PolyQuantity::Value ? 2 : 3;
    const Eigen::Index im = which == PolyQuantity::Value ? 0 : 1;

    const std::size_t batches = (samples + kWalkBatch - 1) / kWalkBatch;
    std::vector<std::size_t> hits(batches, 0);
    for_each_walk_batch(sampler, samples, seed, threads, [&](std::size_t b, const Eigen::MatrixXd& s) {
        for (Eigen::Index c = 0; c < s.cols(); ++c)
            if (std::hypot(s(re, c), s(im, c)) <= delta)
                ++hits[b];
    });
    std::size_t h = 0;
    for (auto v : hits)
        h += v;
    const double p = static_cast<double>(h) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

}  // namespace minmod
