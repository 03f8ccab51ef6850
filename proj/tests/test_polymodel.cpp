// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "minmod/error.hpp"
#include "minmod/polymodel.hpp"

using namespace minmod;

namespace {

// Independent evaluation straight from the model definitions.
cplx direct(const PolySample& p, double x, int order)
{
    const int n = p.spec.n;
    const cplx I{0, 1};
    auto dk = [&](double j) { return std::pow(I * j, order); };
    cplx s = 0;
    switch (p.spec.model) {
    case ModelKind::SymmetricKac:
        for (int j = -n; j <= n; ++j)
            s += p.coeffs[static_cast<std::size_t>(j + n)] * dk(j) * std::exp(I * (j * x));
        return s / std::sqrt(2.0 * n + 1);
    case ModelKind::OneSidedKac:
        for (int j = 0; j <= n; ++j)
            s += p.coeffs[static_cast<std::size_t>(j)] * dk(j) * std::exp(I * (j * x));
        return s / std::sqrt(n + 1.0);
    case ModelKind::CosSin: {
        const double a = p.spec.a;
        if (order == 0)
            s = std::sqrt(a) * p.coeffs[0];
        for (int j = 1; j <= n; ++j) {
            // d^k/dx^k cos(jx) = j^k cos(jx + k pi/2), same for sin.
            const double ph = order * std::numbers::pi / 2;
            const double jk = std::pow(j, order);
            s += p.coeffs[static_cast<std::size_t>(2 * j - 1)] * jk * std::cos(j * x + ph) +
                 p.coeffs[static_cast<std::size_t>(2 * j)] * jk * std::sin(j * x + ph);
        }
        return s / std::sqrt(n + a);
    }
    }
    return 0;
}

double max_abs_coeff(const PolySample& p)
{
    double m = 0;
    for (auto c : p.coeffs)
        m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

TEST_CASE("degree zero symmetric polynomial is the constant xi_0")
{
    ModelSpec spec{ModelKind::SymmetricKac, 0, 0.5, CoefficientDist::rademacher()};
    const PolySample p = sample_polynomial(spec, 11);
    REQUIRE(p.coeffs.size() == 1);
    for (double x : {0.0, 1.0, -2.5, 10.0})
        CHECK(std::abs(evaluate(p, x, 0) - p.coeffs[0]) < 1e-15);
    for (auto v : evaluate_mesh(p, 16, 0))
        CHECK(std::abs(v - p.coeffs[0]) < 1e-14);
}

TEST_CASE("coefficient counts and normalizations")
{
    for (int n : {1, 5, 20}) {
        ModelSpec s{ModelKind::SymmetricKac, n, 0.5, CoefficientDist::gaussian_real()};
        CHECK(s.coefficient_count() == static_cast<std::size_t>(2 * n + 1));
        CHECK(s.normalization() == doctest::Approx(1 / std::sqrt(2.0 * n + 1)));
        s.model = ModelKind::OneSidedKac;
        CHECK(s.coefficient_count() == static_cast<std::size_t>(n + 1));
        CHECK(s.normalization() == doctest::Approx(1 / std::sqrt(n + 1.0)));
        s.model = ModelKind::CosSin;
        s.a = 0.7;
        CHECK(s.coefficient_count() == static_cast<std::size_t>(2 * n + 1));
        CHECK(s.normalization() == doctest::Approx(1 / std::sqrt(n + 0.7)));
        CHECK(sample_polynomial(s, 3).coeffs.size() == s.coefficient_count());
    }
}

TEST_CASE("invalid specs are refused")
{
    ModelSpec s{ModelKind::SymmetricKac, -1, 0.5, CoefficientDist::rademacher()};
    CHECK_THROWS_AS(s.validate(), Refusal);
    s = {ModelKind::CosSin, 4, 0.0, CoefficientDist::rademacher()};
    CHECK_THROWS_AS(s.validate(), Refusal);
    CHECK_THROWS_AS(CoefficientDist::parse("cauchy"), Refusal);
    CHECK_THROWS_AS(parse_model("laurent"), Refusal);
}

TEST_CASE("sampling is deterministic in (spec, seed)")
{
    ModelSpec spec{ModelKind::SymmetricKac, 20, 0.5, CoefficientDist::gaussian_complex_split()};
    const auto a = sample_polynomial(spec, 99);
    const auto b = sample_polynomial(spec, 99);
    REQUIRE(a.coeffs.size() == 41);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        CHECK(a.coeffs[i].real() == b.coeffs[i].real());
        CHECK(a.coeffs[i].imag() == b.coeffs[i].imag());
    }
    CHECK(sample_polynomial(spec, 100).coeffs[0] != a.coeffs[0]);
}

TEST_CASE("complex Gaussian coordinates have unit variance")
{
    ModelSpec spec{ModelKind::SymmetricKac, 20, 0.5, CoefficientDist::gaussian_complex_split()};
    double s2 = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        s2 += std::norm(sample_polynomial(spec, static_cast<std::uint64_t>(i)).coeffs[7]);
    const double var = s2 / draws;
    CHECK(var >= 0.95);
    CHECK(var <= 1.05);
}

TEST_CASE("custom law with non-finite draws is rejected")
{
    auto bad = CoefficientDist::custom(
        "nan", [](Engine&) { return std::numeric_limits<double>::quiet_NaN(); }, {1, 0, 1});
    ModelSpec spec{ModelKind::SymmetricKac, 3, 0.5, bad};
    CHECK_THROWS_AS(sample_polynomial(spec, 1), Refusal);
}

TEST_CASE("declared moments")
{
    const auto u = CoefficientDist::uniform_symmetric();
    CHECK(u.moment(1) == 0.0);
    CHECK(u.moment(2) == doctest::Approx(1.0));
    CHECK(u.moment(3) == 0.0);
    CHECK(u.moment(4) == doctest::Approx(9.0 / 5));
    CHECK(u.moment(6) == doctest::Approx(27.0 / 7));
    const auto g = CoefficientDist::gaussian_real();
    CHECK(g.moment(4) == doctest::Approx(3.0));
    CHECK(g.moment(6) == doctest::Approx(15.0));
    CHECK(g.moment(8) == doctest::Approx(105.0));
    const auto r = CoefficientDist::rademacher();
    CHECK(r.moment(8) == 1.0);
    CHECK(r.moment(7) == 0.0);

    auto short_law = CoefficientDist::custom(
        "short", [](Engine& e) { return std::bernoulli_distribution(0.5)(e) ? 1.0 : -1.0; }, {1, 0, 1});
    CHECK(short_law.moment_order() == 2);
    CHECK_THROWS_AS(short_law.moment(3), Refusal);
}

TEST_CASE("declared moment check for custom laws")
{
    auto expo = CoefficientDist::custom(
        "centered-exponential", [](Engine& e) { return std::exponential_distribution<double>(1.0)(e) - 1.0; },
        {1, 0, 1, 2, 9});
    CHECK(check_declared_moments(expo, 200000, 5).ok);
    auto shifted = CoefficientDist::custom(
        "shifted", [](Engine& e) { return std::normal_distribution<double>(0.3, 1.0)(e); }, {1, 0, 1});
    CHECK_FALSE(check_declared_moments(shifted, 200000, 5).ok);
}

TEST_CASE("all-ones symmetric polynomial at x = 0")
{
    for (int n : {1, 7, 30}) {
        ModelSpec spec{ModelKind::SymmetricKac, n, 0.5, CoefficientDist::rademacher()};
        const auto p = make_polynomial(spec, std::vector<cplx>(static_cast<std::size_t>(2 * n + 1), 1.0));
        CHECK(std::abs(evaluate(p, 0.0, 0) - std::sqrt(2.0 * n + 1)) < 1e-12);
        CHECK(std::abs(evaluate(p, 0.0, 1)) < 1e-12);
        const auto mesh1 = evaluate_mesh(p, 64, 1);
        CHECK(std::abs(mesh1.back()) < 1e-10);
    }
}

TEST_CASE("evaluate matches direct summation for every model and order")
{
    const ModelKind kinds[] = {ModelKind::SymmetricKac, ModelKind::OneSidedKac, ModelKind::CosSin};
    for (ModelKind k : kinds) {
        for (const auto& d : {CoefficientDist::gaussian_complex_split(), CoefficientDist::rademacher()}) {
            ModelSpec spec{k, 16, 0.8, d};
            const auto p = sample_polynomial(spec, 42);
            for (int order = 0; order <= 2; ++order) {
                for (double x : {0.0, 0.3, 1.7, -2.2, 5.9}) {
                    const cplx want = direct(p, x, order);
                    const cplx got = evaluate(p, x, order);
                    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)) * std::pow(16.0, order));
                }
            }
        }
    }
}

TEST_CASE("rescaled evaluation is n^-k P^(k)(s/n)")
{
    ModelSpec spec{ModelKind::SymmetricKac, 12, 0.5, CoefficientDist::gaussian_real()};
    const auto p = sample_polynomial(spec, 8);
    for (int order = 0; order <= 2; ++order)
        for (double s : {0.5, 3.0, 40.0}) {
            const cplx want = direct(p, s / 12, order) / std::pow(12.0, order);
            CHECK(std::abs(evaluate(p, s, order, Scaling::Rescaled) - want) < 1e-12 * std::max(1.0, std::abs(want)));
        }
}

TEST_CASE("mesh evaluation matches direct evaluation")
{
    SUBCASE("n = 4, N = 64, order 0")
    {
        ModelSpec spec{ModelKind::SymmetricKac, 4, 0.5, CoefficientDist::gaussian_complex_split()};
        const auto p = sample_polynomial(spec, 3);
        const auto mesh = evaluate_mesh(p, 64, 0);
        double top = 0, err = 0;
        for (std::size_t a = 1; a <= 64; ++a) {
            const cplx want = direct(p, 2 * std::numbers::pi * a / 64, 0);
            top = std::max(top, std::abs(want));
            err = std::max(err, std::abs(mesh[a - 1] - want));
        }
        CHECK(err <= 1e-9 * top);
    }
    SUBCASE("random instances up to n = 64, all models and orders")
    {
        Engine rng = make_engine(77);
        for (int trial = 0; trial < 12; ++trial) {
            const int n = std::uniform_int_distribution<int>(1, 64)(rng);
            const auto kind = static_cast<ModelKind>(trial % 3);
            ModelSpec spec{kind, n, 1.3, CoefficientDist::gaussian_complex_split()};
            const auto p = sample_polynomial(spec, static_cast<std::uint64_t>(trial));
            const std::size_t N = static_cast<std::size_t>(2 * n + 1 + trial * 7);
            for (int order = 0; order <= 2; ++order) {
                const auto mesh = evaluate_mesh(p, N, order);
                double top = 0, err = 0;
                for (std::size_t a = 1; a <= N; ++a) {
                    const cplx want = direct(p, 2 * std::numbers::pi * static_cast<double>(a) / N, order);
                    top = std::max(top, std::abs(want));
                    err = std::max(err, std::abs(mesh[a - 1] - want));
                }
                CHECK(err <= 1e-9 * top);
            }
        }
    }
    SUBCASE("aliasing meshes are refused")
    {
        ModelSpec spec{ModelKind::SymmetricKac, 10, 0.5, CoefficientDist::rademacher()};
        const auto p = sample_polynomial(spec, 1);
        CHECK_THROWS_AS(evaluate_mesh(p, 20, 0), Refusal);
        CHECK_NOTHROW(evaluate_mesh(p, 21, 0));
    }
}

TEST_CASE("fast evaluator agrees with evaluate")
{
    ModelSpec spec{ModelKind::CosSin, 25, 0.5, CoefficientDist::gaussian_complex_split()};
    const auto p = sample_polynomial(spec, 5);
    const FastEvaluator fe(p);
    for (double x : {0.1, 2.0, 4.4}) {
        const auto jet = fe.jet(x);
        for (int k = 0; k <= 2; ++k) {
            const cplx want = evaluate(p, x, k);
            CHECK(std::abs(jet[static_cast<std::size_t>(k)] - want) < 1e-10 * std::max(1.0, std::abs(want)));
        }
        CHECK(std::abs(fe.value(x) - evaluate(p, x, 0)) < 1e-12);
    }
}

TEST_CASE("real coefficients give conjugate symmetry")
{
    ModelSpec spec{ModelKind::SymmetricKac, 30, 0.5, CoefficientDist::rademacher()};
    const auto p = sample_polynomial(spec, 17);
    for (double x : {0.2, 1.1, 2.9, 3.1}) {
        const cplx a = evaluate(p, -x, 0);
        const cplx b = std::conj(evaluate(p, x, 0));
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Parseval on the (2n+1)-point mesh")
{
    for (auto kind : {ModelKind::SymmetricKac, ModelKind::OneSidedKac}) {
        ModelSpec spec{kind, 40, 0.5, CoefficientDist::gaussian_complex_split()};
        const auto p = sample_polynomial(spec, 23);
        const auto vals = evaluate_mesh(p, 81, 0);
        double mean = 0, energy = 0;
        for (auto v : vals)
            mean += std::norm(v);
        mean /= 81;
        for (auto c : p.coeffs)
            energy += std::norm(c);
        energy *= spec.normalization() * spec.normalization();
        CHECK(std::abs(mean - energy) <= 1e-10 * energy);
    }
}

TEST_CASE("JSON round trip")
{
    ModelSpec spec{ModelKind::CosSin, 6, 0.25, CoefficientDist::uniform_symmetric()};
    const auto p = sample_polynomial(spec, 1234);
    const auto j = to_json(p);
    CHECK(j.at("model") == "cossin");
    CHECK(j.at("n") == 6);
    CHECK(j.at("seed") == 1234);
    const auto q = poly_from_json(j);
    CHECK(q.spec.model == p.spec.model);
    CHECK(q.spec.a == p.spec.a);
    CHECK(q.spec.dist.kind() == DistKind::UniformSymmetric);
    REQUIRE(q.coeffs.size() == p.coeffs.size());
    for (std::size_t i = 0; i < p.coeffs.size(); ++i)
        CHECK(q.coeffs[i] == p.coeffs[i]);
    CHECK(max_abs_coeff(q) <= std::sqrt(3.0));
}
