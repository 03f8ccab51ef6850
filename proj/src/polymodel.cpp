// SPDX-License-Identifier: Apache-2.0
#include "minmod/polymodel.hpp"

#include <cmath>
#include <numbers>

#include "minmod/error.hpp"
#include "minmod/fft.hpp"

namespace minmod {

namespace {

std::vector<double> gaussian_moments(int order)
{
    std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
    m[0] = 1.0;
    for (int k = 2; k <= order; k += 2)
        m[k] = m[k - 2] * (k - 1);
    return m;
}

constexpr int kBuiltinMomentOrder = 12;

}  // namespace

CoefficientDist CoefficientDist::rademacher()
{
    CoefficientDist d(DistKind::Rademacher, "rademacher");
    d.moments_.assign(kBuiltinMomentOrder + 1, 0.0);
    for (int k = 0; k <= kBuiltinMomentOrder; k += 2)
        d.moments_[k] = 1.0;
    return d;
}

CoefficientDist CoefficientDist::gaussian_real()
{
    CoefficientDist d(DistKind::GaussianReal, "gaussian");
    d.moments_ = gaussian_moments(kBuiltinMomentOrder);
    return d;
}

CoefficientDist CoefficientDist::gaussian_complex_split()
{
    CoefficientDist d(DistKind::GaussianComplexSplit, "gaussian-complex");
    d.moments_ = gaussian_moments(kBuiltinMomentOrder);
    return d;
}

CoefficientDist CoefficientDist::uniform_symmetric()
{
    // Uniform on [-sqrt3, sqrt3]: E xi^{2k} = 3^k / (2k+1).
    CoefficientDist d(DistKind::UniformSymmetric, "uniform");
    d.moments_.assign(kBuiltinMomentOrder + 1, 0.0);
    for (int k = 0; k <= kBuiltinMomentOrder; k += 2)
        d.moments_[k] = std::pow(3.0, k / 2) / (k + 1);
    return d;
}

CoefficientDist CoefficientDist::custom(std::string name, Sampler sampler, std::vector<double> moments)
{
    if (moments.size() < 3)
        throw Refusal("custom distribution must declare moments up to order 2");
    CoefficientDist d(DistKind::Custom, std::move(name));
    d.sampler_ = std::move(sampler);
    d.moments_ = std::move(moments);
    return d;
}

CoefficientDist CoefficientDist::parse(std::string_view name)
{
    if (name == "rademacher")
        return rademacher();
    if (name == "gaussian" || name == "gaussian-real")
        return gaussian_real();
    if (name == "gaussian-complex" || name == "complex")
        return gaussian_complex_split();
    if (name == "uniform")
        return uniform_symmetric();
    throw Refusal("unknown coefficient distribution '" + std::string(name) + "'");
}

double CoefficientDist::sample_real(Engine& rng) const
{
    switch (kind_) {
    case DistKind::Rademacher:
        return (rng() >> 63) ? 1.0 : -1.0;
    case DistKind::GaussianReal:
    case DistKind::GaussianComplexSplit:
        return std::normal_distribution<double>(0.0, 1.0)(rng);
    case DistKind::UniformSymmetric: {
        const double r = std::sqrt(3.0);
        return std::uniform_real_distribution<double>(-r, r)(rng);
    }
    case DistKind::Custom:
        if (!sampler_)
            throw Refusal("custom distribution '" + name_ + "' has no sampler");
        return sampler_(rng);
    }
    return 0.0;
}

cplx CoefficientDist::sample(Engine& rng) const
{
    if (kind_ == DistKind::GaussianComplexSplit) {
        std::normal_distribution<double> g(0.0, 1.0);
        const double re = g(rng);
        const double im = g(rng);
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }
    return {sample_real(rng), 0.0};
}

int CoefficientDist::moment_order() const { return static_cast<int>(moments_.size()) - 1; }

double CoefficientDist::moment(int k) const
{
    if (k < 0 || k > moment_order())
        throw Refusal("distribution '" + name_ + "' declares moments only up to order " +
                      std::to_string(moment_order()) + "; order " + std::to_string(k) + " is required");
    return moments_[static_cast<std::size_t>(k)];
}

MomentCheck check_declared_moments(const CoefficientDist& dist, std::size_t samples, std::uint64_t seed)
{
    Engine rng = make_engine(seed);
    double s1 = 0, s2 = 0, s4 = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = dist.sample_real(rng);
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    const double m = static_cast<double>(samples);
    MomentCheck c;
    c.mean = s1 / m;
    c.variance = s2 / m;
    c.mean_se = std::sqrt(c.variance / m);
    c.variance_se = std::sqrt(std::max(s4 / m - c.variance * c.variance, 0.0) / m);
    c.ok = std::abs(c.mean) <= 4 * c.mean_se + 1e-12 && std::abs(c.variance - 1.0) <= 4 * c.variance_se + 1e-12;
    return c;
}

void ModelSpec::validate() const
{
    if (n < 0)
        throw Refusal("degree n must be non-negative");
    if (model == ModelKind::CosSin && !(a > 0.0))
        throw Refusal("CosSin model requires a > 0");
}

std::size_t ModelSpec::coefficient_count() const
{
    const auto nn = static_cast<std::size_t>(n);
    return model == ModelKind::OneSidedKac ? nn + 1 : 2 * nn + 1;
}

double ModelSpec::normalization() const
{
    switch (model) {
    case ModelKind::SymmetricKac:
        return 1.0 / std::sqrt(2.0 * n + 1.0);
    case ModelKind::OneSidedKac:
        return 1.0 / std::sqrt(n + 1.0);
    case ModelKind::CosSin:
        return 1.0 / std::sqrt(n + a);
    }
    return 1.0;
}

ModelKind parse_model(std::string_view name)
{
    if (name == "symmetric" || name == "symmetric-kac")
        return ModelKind::SymmetricKac;
    if (name == "one-sided" || name == "one-sided-kac")
        return ModelKind::OneSidedKac;
    if (name == "cossin")
        return ModelKind::CosSin;
    throw Refusal("unknown model '" + std::string(name) + "'");
}

std::string model_name(ModelKind kind)
{
    switch (kind) {
    case ModelKind::SymmetricKac:
        return "symmetric";
    case ModelKind::OneSidedKac:
        return "one-sided";
    case ModelKind::CosSin:
        return "cossin";
    }
    return "?";
}

FourierForm fourier_form(const PolySample& poly)
{
    const auto& spec = poly.spec;
    const int n = spec.n;
    FourierForm f;
    f.scale = spec.normalization();
    switch (spec.model) {
    case ModelKind::SymmetricKac:
        f.j_min = -n;
        f.c = poly.coeffs;
        break;
    case ModelKind::OneSidedKac:
        f.j_min = 0;
        f.c = poly.coeffs;
        break;
    case ModelKind::CosSin: {
        // cos(jx) = (e^{ijx} + e^{-ijx})/2, sin(jx) = (e^{ijx} - e^{-ijx})/(2i)
        f.j_min = -n;
        f.c.assign(2 * static_cast<std::size_t>(n) + 1, cplx{});
        const cplx i{0.0, 1.0};
        f.c[static_cast<std::size_t>(n)] = std::sqrt(spec.a) * poly.coeffs[0];
        for (int j = 1; j <= n; ++j) {
            const cplx xi = poly.coeffs[2 * static_cast<std::size_t>(j) - 1];
            const cplx eta = poly.coeffs[2 * static_cast<std::size_t>(j)];
            f.c[static_cast<std::size_t>(n + j)] = 0.5 * (xi - i * eta);
            f.c[static_cast<std::size_t>(n - j)] = 0.5 * (xi + i * eta);
        }
        break;
    }
    }
    return f;
}

PolySample sample_polynomial(const ModelSpec& spec, std::uint64_t seed)
{
    spec.validate();
    PolySample poly{spec, {}, seed};
    Engine rng = make_engine(seed);
    const std::size_t count = spec.coefficient_count();
    poly.coeffs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const cplx v = spec.dist.sample(rng);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Refusal("sampler for '" + spec.dist.name() + "' returned a non-finite value at coefficient " +
                          std::to_string(k));
        poly.coeffs.push_back(v);
    }
    return poly;
}

PolySample make_polynomial(const ModelSpec& spec, std::vector<cplx> coeffs, std::uint64_t seed)
{
    spec.validate();
    if (coeffs.size() != spec.coefficient_count())
        throw Refusal("expected " + std::to_string(spec.coefficient_count()) + " coefficients, got " +
                      std::to_string(coeffs.size()));
    return PolySample{spec, std::move(coeffs), seed};
}

cplx evaluate(const PolySample& poly, double x, int order, Scaling scaling)
{
    if (order < 0 || order > 2)
        throw Refusal("derivative order must be 0, 1 or 2");
    const FourierForm f = fourier_form(poly);
    const double n = poly.spec.n;
    const double arg = scaling == Scaling::Rescaled ? x / n : x;

    cplx sum{};
    for (std::size_t k = 0; k < f.c.size(); ++k) {
        const double j = f.j_min + static_cast<int>(k);
        cplx term = f.c[k] * std::polar(1.0, j * arg);
        if (order >= 1)
            term *= cplx{0.0, j};
        if (order == 2)
            term *= cplx{0.0, j};
        sum += term;
    }
    sum *= f.scale;
    if (scaling == Scaling::Rescaled && order > 0)
        sum /= std::pow(n, order);
    return sum;
}

std::vector<cplx> evaluate_mesh(const PolySample& poly, std::size_t N, int order)
{
    if (order < 0 || order > 2)
        throw Refusal("mesh derivative order must be 0, 1 or 2");
    const auto n = static_cast<std::size_t>(poly.spec.n);
    if (N < 2 * n + 1)
        throw Refusal("mesh size " + std::to_string(N) + " < 2n+1 = " + std::to_string(2 * n + 1) +
                      " would alias");
    const FourierForm f = fourier_form(poly);
    const auto NN = static_cast<long long>(N);

    std::vector<cplx> buf(N, cplx{});
    for (std::size_t k = 0; k < f.c.size(); ++k) {
        const long long j = f.j_min + static_cast<long long>(k);
        cplx c = f.c[k] * f.scale;
        if (order >= 1)
            c *= cplx{0.0, static_cast<double>(j)};
        if (order == 2)
            c *= cplx{0.0, static_cast<double>(j)};
        buf[static_cast<std::size_t>(((j % NN) + NN) % NN)] += c;
    }
    fft::backward_inplace(buf);

    // buf[k] holds the value at 2*pi*k/N; alpha = N maps to k = 0.
    std::vector<cplx> out(N);
    for (std::size_t alpha = 1; alpha <= N; ++alpha)
        out[alpha - 1] = buf[alpha % N];
    return out;
}

FastEvaluator::FastEvaluator(const PolySample& poly) : form_(fourier_form(poly))
{
    d1_.resize(form_.c.size());
    d2_.resize(form_.c.size());
    for (std::size_t k = 0; k < form_.c.size(); ++k) {
        const double j = form_.j_min + static_cast<int>(k);
        d1_[k] = form_.c[k] * cplx{0.0, j};
        d2_[k] = form_.c[k] * (-j * j);
    }
}

cplx FastEvaluator::value(double x) const
{
    const cplx z = std::polar(1.0, x);
    cplx acc{};
    for (std::size_t k = form_.c.size(); k-- > 0;)
        acc = acc * z + form_.c[k];
    return form_.scale * acc * std::polar(1.0, form_.j_min * x);
}

std::array<cplx, 3> FastEvaluator::jet(double x) const
{
    const cplx z = std::polar(1.0, x);
    cplx a0{}, a1{}, a2{};
    for (std::size_t k = form_.c.size(); k-- > 0;) {
        a0 = a0 * z + form_.c[k];
        a1 = a1 * z + d1_[k];
        a2 = a2 * z + d2_[k];
    }
    const cplx shift = form_.scale * std::polar(1.0, form_.j_min * x);
    return {a0 * shift, a1 * shift, a2 * shift};
}

nlohmann::json to_json(const PolySample& poly)
{
    nlohmann::json j;
    j["model"] = model_name(poly.spec.model);
    j["n"] = poly.spec.n;
    if (poly.spec.model == ModelKind::CosSin)
        j["a"] = poly.spec.a;
    j["dist"] = poly.spec.dist.name();
    j["seed"] = poly.seed;
    auto& arr = j["coeffs"] = nlohmann::json::array();
    for (const cplx& c : poly.coeffs)
        arr.push_back({c.real(), c.imag()});
    return j;
}

PolySample poly_from_json(const nlohmann::json& j, const CoefficientDist& fallback_dist)
{
    ModelSpec spec;
    spec.model = parse_model(j.at("model").get<std::string>());
    spec.n = j.at("n").get<int>();
    if (j.contains("a"))
        spec.a = j.at("a").get<double>();
    spec.dist = fallback_dist;
    if (j.contains("dist")) {
        try {
            spec.dist = CoefficientDist::parse(j.at("dist").get<std::string>());
        } catch (const Refusal&) {
        }
    }
    std::vector<cplx> coeffs;
    for (const auto& c : j.at("coeffs"))
        coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    return make_polynomial(spec, std::move(coeffs), seed);
}

}  // namespace minmod
