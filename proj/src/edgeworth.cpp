// SPDX-License-Identifier: Apache-2.0
#include "minmod/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

double factorial(int k)
{
    double r = 1.0;
    for (int i = 2; i <= k; ++i)
        r *= i;
    return r;
}

double multi_factorial(MonoKey key, int dims)
{
    double r = 1.0;
    for (int i = 0; i < dims; ++i)
        r *= factorial(exponent_of(key, i));
    return r;
}

double monomial_value(MonoKey key, const Eigen::VectorXd& u)
{
    double t = 1.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (int p = exponent_of(key, static_cast<int>(i)); p > 0; --p)
            t *= u[i];
    return t;
}

}  // namespace

std::vector<double> scalar_cumulants(const CoefficientDist& dist, int order)
{
    if (dist.moment_order() < order)
        throw Refusal("coefficient law " + dist.name() + " declares moments up to order " +
                      std::to_string(dist.moment_order()) + "; order " + std::to_string(order) + " is required");
    std::vector<double> mu(static_cast<std::size_t>(order) + 1), kappa(mu.size(), 0.0);
    for (int k = 0; k <= order; ++k)
        mu[static_cast<std::size_t>(k)] = dist.moment(k);
    for (int r = 1; r <= order; ++r) {
        double s = mu[static_cast<std::size_t>(r)];
        for (int k = 1; k < r; ++k)
            s -= binom(r - 1, k - 1) * kappa[static_cast<std::size_t>(k)] * mu[static_cast<std::size_t>(r - k)];
        kappa[static_cast<std::size_t>(r)] = s;
    }
    return kappa;
}

double CumulantSet::value(std::span<const int> nu) const
{
    auto it = values.find(pack_exponents(nu));
    return it == values.end() ? 0.0 : it->second;
}

double CumulantSet::projected(const Eigen::VectorXd& u, int r) const
{
    if (r < 1 || r > order)
        throw Refusal("projected cumulant order outside the computed range");
    double s = 0.0;
    for (MonoKey key : monomials_of_degree(dims, r)) {
        auto it = values.find(key);
        if (it != values.end())
            s += factorial(r) / multi_factorial(key, dims) * it->second * monomial_value(key, u);
    }
    return s;
}

CumulantSet average_cumulants(const StepMatrix& steps, const CoefficientDist& dist, int order)
{
    if (order < 1 || order > 6)
        throw Refusal("cumulant order must lie in [1, 6]");
    CumulantSet cs;
    cs.dims = static_cast<int>(steps.dim());
    cs.order = order;
    cs.count = static_cast<std::size_t>(steps.rows.rows());
    cs.kappa = scalar_cumulants(dist, order);
    if (cs.dims > kMaxVars)
        throw Refusal("cumulant sets support at most 8 walk dimensions");

    // powers[e](j, i) = w_j[i]^e
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(order) + 1);
    powers[0] = Eigen::MatrixXd::Ones(steps.rows.rows(), steps.rows.cols());
    for (int e = 1; e <= order; ++e)
        powers[static_cast<std::size_t>(e)] = powers[static_cast<std::size_t>(e - 1)].cwiseProduct(steps.rows);

    const double rows = static_cast<double>(cs.count);
    for (int r = 1; r <= order; ++r) {
        const double k = cs.kappa[static_cast<std::size_t>(r)];
        for (MonoKey key : monomials_of_degree(cs.dims, r)) {
            Eigen::VectorXd prod = Eigen::VectorXd::Ones(steps.rows.rows());
            for (int i = 0; i < cs.dims; ++i) {
                const int e = exponent_of(key, i);
                if (e > 0)
                    prod = prod.cwiseProduct(powers[static_cast<std::size_t>(e)].col(i));
            }
            cs.values[key] = k * prod.sum() / rows;
        }
    }
    return cs;
}

CumulantSet average_cumulants(const PhaseTuple& tuple, const CoefficientDist& dist, int order)
{
    return average_cumulants(step_matrix(tuple, default_range(tuple, WalkVariant::Full4m)), dist, order);
}

namespace {

void setup_gaussian(const Eigen::MatrixXd& v, Eigen::MatrixXd& lambda, double& log_norm)
{
    if (v.rows() != v.cols() || v.rows() < 1)
        throw Refusal("covariance must be a nonempty square matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-8))
        throw Refusal("covariance is near-singular (sigma_min <= 1e-8)");
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    lambda = llt.solve(Eigen::MatrixXd::Identity(v.rows(), v.cols()));
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    log_norm = 0.5 * static_cast<double>(v.rows()) * std::log(2.0 * std::numbers::pi) + 0.5 * log_det;
}

}  // namespace

ExpansionDensity gaussian_density(const Eigen::MatrixXd& v)
{
    ExpansionDensity d;
    setup_gaussian(v, d.lambda_, d.log_norm_);
    d.v_ = v;
    d.ell_ = 2;
    d.polys_ = {MultiPoly::constant(static_cast<int>(v.rows()), 1.0)};
    return d;
}

ExpansionDensity build_expansion(const CumulantSet& cumulants, const Eigen::MatrixXd& v, int ell)
{
    if (ell < 2 || ell > 4)
        throw Refusal("expansion order must be 2, 3 or 4");
    if (cumulants.order < ell)
        throw Refusal("expansion of order " + std::to_string(ell) + " needs cumulants up to order " +
                      std::to_string(ell));
    if (v.rows() != cumulants.dims)
        throw Refusal("covariance dimension does not match the cumulant set");
    ExpansionDensity d = gaussian_density(v);
    d.ell_ = ell;
    d.eps_ = 1.0 / std::sqrt(static_cast<double>(cumulants.count));
    const int dims = cumulants.dims;

    auto k_poly = [&](int r) {
        MultiPoly p(dims);
        for (MonoKey key : monomials_of_degree(dims, r)) {
            auto it = cumulants.values.find(key);
            if (it != cumulants.values.end())
                p.add_term(key, it->second / multi_factorial(key, dims));
        }
        return p;
    };

    // z^nu -> prod_i O_i^{nu_i} 1 with O_i p = p (Lambda x)_i - d_i p.
    std::unordered_map<MonoKey, MultiPoly> image;
    image.emplace(0, MultiPoly::constant(dims, 1.0));
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(dims));
    for (int i = 0; i < dims; ++i)
        for (int k = 0; k < dims; ++k)
            rows[static_cast<std::size_t>(i)].push_back(d.lambda_(i, k));
    auto apply = [&](auto&& self, MonoKey key) -> const MultiPoly& {
        if (auto it = image.find(key); it != image.end())
            return it->second;
        int i = 0;
        while (exponent_of(key, i) == 0)
            ++i;
        const MultiPoly& base = self(self, key - (MonoKey{1} << (4 * i)));
        MultiPoly out = base.times_linear(rows[static_cast<std::size_t>(i)]) + base.derivative(i) * -1.0;
        return image.emplace(key, std::move(out)).first->second;
    };
    auto substitute = [&](const MultiPoly& t) {
        MultiPoly out(dims);
        for (const auto& [key, c] : t.terms())
            out += apply(apply, key) * c;
        out.prune(1e-15);
        return out;
    };

    if (ell >= 3)
        d.polys_.push_back(substitute(k_poly(3)));
    if (ell >= 4) {
        const MultiPoly k3 = k_poly(3);
        d.polys_.push_back(substitute(k_poly(4) + (k3 * k3) * 0.5));
    }
    return d;
}

double ExpansionDensity::gaussian(const Eigen::VectorXd& x) const
{
    return std::exp(-0.5 * x.dot(lambda_ * x) - log_norm_);
}

MultiPoly ExpansionDensity::correction() const
{
    MultiPoly c(dims());
    double scale = 1.0;
    for (const auto& p : polys_) {
        c += p * scale;
        scale *= eps_;
    }
    return c;
}

double ExpansionDensity::term(int r, const Eigen::VectorXd& x) const
{
    if (r < 0 || r >= static_cast<int>(polys_.size()))
        return 0.0;
    std::vector<double> xv(x.data(), x.data() + x.size());
    return std::pow(eps_, r) * polys_[static_cast<std::size_t>(r)](xv) * gaussian(x);
}

double ExpansionDensity::operator()(const Eigen::VectorXd& x) const
{
    double s = 0.0;
    for (int r = 0; r < static_cast<int>(polys_.size()); ++r)
        s += term(r, x);
    return s;
}

Box centered_box(int dims, double half_side)
{
    return Box(static_cast<std::size_t>(dims), {-half_side, half_side});
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order)
{
    std::vector<double> x(static_cast<std::size_t>(order)), w(x.size());
    for (int i = 0; i < order; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = order * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

namespace {

struct Axis {
    std::vector<double> x, w;
};

Axis axis_grid(double lo, double hi, double sigma, int order, double panel_sigmas)
{
    const auto panels = std::max<int>(1, static_cast<int>(std::ceil((hi - lo) / (panel_sigmas * sigma))));
    const auto [gx, gw] = gauss_legendre(order);
    Axis a;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            a.x.push_back(mid + 0.5 * h * gx[i]);
            a.w.push_back(0.5 * h * gw[i]);
        }
    }
    return a;
}

double nested(const std::vector<Axis>& axes, const Eigen::MatrixXd& lam, std::size_t level, const DenseTensor& t,
              double q, const std::vector<double>& s)
{
    const auto d = axes.size();
    const Axis& ax = axes[level];
    const double lll = lam(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level));
    double sum = 0.0;
    if (level + 1 == d) {
        for (std::size_t i = 0; i < ax.x.size(); ++i) {
            const double x = ax.x[i];
            sum += ax.w[i] * std::exp(-0.5 * (q + lll * x * x + 2.0 * x * s[level])) * t.eval1(x);
        }
        return sum;
    }
    std::vector<double> s2(d);
    for (std::size_t i = 0; i < ax.x.size(); ++i) {
        const double x = ax.x[i];
        const double q2 = q + lll * x * x + 2.0 * x * s[level];
        for (std::size_t k = level + 1; k < d; ++k)
            s2[k] = s[k] + lam(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(level)) * x;
        sum += ax.w[i] * nested(axes, lam, level + 1, t.contract_first(x), q2, s2);
    }
    return sum;
}

double tensor_integral(const std::vector<Axis>& axes, const Eigen::MatrixXd& lam, const DenseTensor& t,
                       unsigned threads)
{
    const Axis& first = axes[0];
    const auto d = axes.size();
    if (d == 1)
        return nested(axes, lam, 0, t, 0.0, std::vector<double>(1, 0.0));
    std::vector<double> part(first.x.size());
    parallel_for(first.x.size(), threads, [&](std::size_t i) {
        const double x = first.x[i];
        std::vector<double> s(d);
        for (std::size_t k = 1; k < d; ++k)
            s[k] = lam(static_cast<Eigen::Index>(k), 0) * x;
        part[i] = first.w[i] * nested(axes, lam, 1, t.contract_first(x), lam(0, 0) * x * x, s);
    });
    double sum = 0.0;
    for (double p : part)
        sum += p;
    return sum;
}

}  // namespace

BoxIntegral integrate_gaussian_poly(const Eigen::MatrixXd& v, const MultiPoly& poly, const Box& box,
                                    const QuadOptions& opts)
{
    const auto d = static_cast<std::size_t>(v.rows());
    if (box.size() != d)
        throw Refusal("box dimension does not match the density");
    for (const auto& [lo, hi] : box)
        if (!(hi > lo))
            throw Refusal("box sides must have positive length");
    Eigen::MatrixXd lam;
    double log_norm = 0.0;
    setup_gaussian(v, lam, log_norm);
    MultiPoly p = poly.empty() ? MultiPoly::constant(static_cast<int>(d), 0.0) : poly;
    DenseTensor t = p.dims() == 0 ? DenseTensor{static_cast<int>(d), 0, std::vector<double>(1, 0.0)}
                                  : DenseTensor::from(p);
    if (t.c.empty())
        t.c.assign(1, 0.0);

    BoxIntegral out;
    double prev = 0.0;
    bool have_prev = false;
    for (int order = 4; order <= 64; order *= 2) {
        std::vector<Axis> axes;
        double points = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double sigma = std::sqrt(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
            axes.push_back(axis_grid(box[i].first, box[i].second, sigma, order, opts.panel_sigmas));
            points *= static_cast<double>(axes.back().x.size());
        }
        if (points > opts.max_points)
            break;
        const double val = tensor_integral(axes, lam, t, opts.threads) * std::exp(-log_norm);
        out.value = val;
        out.order = order;
        if (have_prev) {
            out.error = std::abs(val - prev);
            if (out.error <= std::max(opts.rel_tol * std::abs(val), opts.abs_tol)) {
                out.converged = true;
                return out;
            }
        }
        prev = val;
        have_prev = true;
    }
    if (!have_prev)
        out.error = std::numeric_limits<double>::infinity();
    return out;
}

BoxIntegral box_probability(const ExpansionDensity& density, const Box& box, const QuadOptions& opts)
{
    return integrate_gaussian_poly(density.covariance(), density.correction(), box, opts);
}

BoxIntegral box_probability(const GaussianComparison& gauss, const Box& box, const QuadOptions& opts)
{
    const auto d = gauss.v.rows();
    if (static_cast<std::size_t>(d) != box.size())
        throw Refusal("box dimension does not match the density");
    bool diagonal = true;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            if (i != k && std::abs(gauss.v(i, k)) > 1e-13 * std::sqrt(gauss.v(i, i) * gauss.v(k, k)))
                diagonal = false;
    if (!diagonal)
        return integrate_gaussian_poly(gauss.v, MultiPoly::constant(static_cast<int>(d), 1.0), box, opts);
    BoxIntegral out;
    out.value = 1.0;
    out.converged = true;
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto [lo, hi] = box[static_cast<std::size_t>(i)];
        if (!(hi > lo))
            throw Refusal("box sides must have positive length");
        const double s = std::sqrt(2.0 * gauss.v(i, i));
        out.value *= 0.5 * (std::erf(hi / s) - std::erf(lo / s));
    }
    return out;
}

BoxIntegral box_moment(const ExpansionDensity& density, const Box& box, MonoKey nu, const QuadOptions& opts)
{
    return integrate_gaussian_poly(density.covariance(),
                                   density.correction() * MultiPoly::monomial(density.dims(), nu), box, opts);
}

BoxIntegral box_term(const ExpansionDensity& density, int r, const Box& box, const QuadOptions& opts)
{
    if (r < 0 || r >= static_cast<int>(density.polys().size()))
        throw Refusal("expansion term index out of range");
    return integrate_gaussian_poly(density.covariance(),
                                   density.polys()[static_cast<std::size_t>(r)] * std::pow(density.eps(), r), box,
                                   opts);
}

BoxComparison compare_box(const PhaseTuple& tuple, const CoefficientDist& dist, const Box& box,
                          std::size_t samples, int ell, std::uint64_t seed, unsigned threads)
{
    if (samples < 10000)
        throw Refusal("box comparison needs at least 10^4 samples");
    const StepMatrix steps = step_matrix(tuple, default_range(tuple, WalkVariant::Full4m));
    if (box.size() != static_cast<std::size_t>(steps.dim()))
        throw Refusal("box dimension does not match the walk");
    const Covariance cov = covariance(steps);

    BoxComparison out;
    const BoxIntegral g = box_probability(GaussianComparison{cov.v}, box);
    out.gaussian = g.value;
    out.quadrature_converged = g.converged;
    if (ell == 2) {
        out.edgeworth = out.gaussian;
    } else {
        const BoxIntegral e = box_probability(build_expansion(average_cumulants(steps, dist, ell), cov.v, ell), box);
        out.edgeworth = e.value;
        out.quadrature_converged = out.quadrature_converged && e.converged;
    }

    WalkSampler sampler(steps, dist);
    const std::size_t batches = (samples + kWalkBatch - 1) / kWalkBatch;
    std::vector<std::size_t> hits(batches, 0);
    for_each_walk_batch(sampler, samples, seed, threads, [&](std::size_t b, const Eigen::MatrixXd& s) {
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            bool inside = true;
            for (Eigen::Index i = 0; i < s.rows() && inside; ++i) {
                const auto [lo, hi] = box[static_cast<std::size_t>(i)];
                inside = s(i, c) >= lo && s(i, c) <= hi;
            }
            hits[b] += inside ? 1 : 0;
        }
    });
    std::size_t h = 0;
    for (auto v : hits)
        h += v;
    const double n = static_cast<double>(samples);
    out.empirical = static_cast<double>(h) / n;
    out.stderr = std::sqrt(out.empirical * (1.0 - out.empirical) / n);
    out.diff_gaussian = out.empirical - out.gaussian;
    out.diff_edgeworth = out.empirical - out.edgeworth;
    return out;
}

}  // namespace minmod
