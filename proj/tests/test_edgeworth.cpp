// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "minmod/edgeworth.hpp"
#include "minmod/error.hpp"

using namespace minmod;

namespace {

constexpr double kPi = std::numbers::pi;

MonoKey key_of(std::initializer_list<int> e) { return pack_exponents(std::vector<int>(e)); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Probability of [a1,b1]x[a2,b2] under N(0, [[1, rho],[rho, 1]]) by Simpson's
// rule over x1 with the conditional law of x2.
double bivariate_box(double a1, double b1, double a2, double b2, double rho)
{
    const int steps = 20000;
    const double h = (b1 - a1) / steps, s = std::sqrt(1 - rho * rho);
    double acc = 0;
    for (int i = 0; i <= steps; ++i) {
        const double x = a1 + i * h;
        const double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
        const double phi = std::exp(-x * x / 2) / std::sqrt(2 * kPi);
        acc += w * phi * (std_normal_cdf((b2 - rho * x) / s) - std_normal_cdf((a2 - rho * x) / s));
    }
    return acc * h / 3;
}

PhaseTuple tuple2(int n) { return PhaseTuple({0.137 * 2 * kPi * n, 0.391 * 2 * kPi * n}, n); }

}  // namespace

TEST_CASE("multipoly arithmetic")
{
    const std::array<int, 3> e{2, 0, 1};
    CHECK(unpack_exponents(pack_exponents(e), 3) == std::vector<int>{2, 0, 1});
    CHECK(total_degree(pack_exponents(e), 3) == 3);
    // Number of monomials of degree r in d variables is C(r + d - 1, d - 1).
    CHECK(monomials_of_degree(4, 3).size() == 20);
    CHECK(monomials_of_degree(8, 4).size() == 330);

    MultiPoly p(2), q(2);
    p.add_term(key_of({1, 0}), 2.0);
    p.add_term(key_of({0, 2}), -1.0);
    q.add_term(key_of({0, 0}), 3.0);
    q.add_term(key_of({1, 1}), 0.5);
    const MultiPoly pq = p * q;
    for (auto [x, y] : {std::pair{0.3, -1.2}, std::pair{2.0, 0.7}}) {
        const std::array<double, 2> pt{x, y};
        const double pv = 2 * x - y * y, qv = 3 + 0.5 * x * y;
        CHECK(pq(pt) == doctest::Approx(pv * qv));
        CHECK(p.derivative(1)(pt) == doctest::Approx(-2 * y));
        const std::array<double, 2> row{1.5, -2.0};
        CHECK(p.times_linear(row)(pt) == doctest::Approx(pv * (1.5 * x - 2 * y)));
        const DenseTensor t = DenseTensor::from(pq);
        CHECK(t.contract_first(x).eval1(y) == doctest::Approx(pv * qv));
    }
    CHECK(pq.degree() == 4);
}

TEST_CASE("scalar cumulants")
{
    const auto r = scalar_cumulants(CoefficientDist::rademacher(), 6);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == doctest::Approx(1.0));
    CHECK(r[4] == doctest::Approx(-2.0));
    CHECK(r[6] == doctest::Approx(16.0));
    const auto g = scalar_cumulants(CoefficientDist::gaussian_real(), 6);
    for (int k = 3; k <= 6; ++k)
        CHECK(std::abs(g[static_cast<std::size_t>(k)]) < 1e-12);
    const auto u = scalar_cumulants(CoefficientDist::uniform_symmetric(), 4);
    CHECK(u[4] == doctest::Approx(-1.2));

    auto short_law = CoefficientDist::custom("short", [](Engine&) { return 1.0; }, {1, 0, 1});
    try {
        scalar_cumulants(short_law, 4);
        FAIL("expected a refusal");
    } catch (const Refusal& e) {
        CHECK(std::string(e.what()).find('4') != std::string::npos);
    }
}

TEST_CASE("averaged cumulants")
{
    const int n = 64;
    const auto tup = tuple2(n);
    const auto steps = step_matrix(tup, {-n, n});

    SUBCASE("Gaussian cumulants vanish beyond order two")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::gaussian_real(), 4);
        for (int r = 3; r <= 4; ++r)
            for (MonoKey k : monomials_of_degree(8, r))
                CHECK(std::abs(cs.value(unpack_exponents(k, 8))) < 1e-12);
    }
    SUBCASE("Rademacher fourth order is -2 times the step moment")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::rademacher(), 4);
        for (MonoKey k : monomials_of_degree(8, 4)) {
            const auto nu = unpack_exponents(k, 8);
            double avg = 0;
            for (Eigen::Index j = 0; j < steps.rows.rows(); ++j) {
                double p = 1;
                for (int i = 0; i < 8; ++i)
                    p *= std::pow(steps.rows(j, i), nu[static_cast<std::size_t>(i)]);
                avg += p;
            }
            avg /= static_cast<double>(steps.rows.rows());
            CHECK(cs.value(nu) == doctest::Approx(-2 * avg).epsilon(1e-10).scale(1.0));
        }
    }
    SUBCASE("second order equals the covariance")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::uniform_symmetric(), 2);
        const auto cov = covariance(steps);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                std::vector<int> nu(8, 0);
                nu[static_cast<std::size_t>(a)] += 1;
                nu[static_cast<std::size_t>(b)] += 1;
                CHECK(cs.value(nu) == doctest::Approx(cov.v(a, b)).scale(1.0));
            }
    }
    SUBCASE("projection matches the scalar cumulant of <u, X>")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::rademacher(), 4);
        Eigen::VectorXd u(8);
        u << 0.3, -0.1, 0.5, 0.2, -0.7, 0.1, 0.05, 0.4;
        double m4 = 0;
        for (Eigen::Index j = 0; j < steps.rows.rows(); ++j)
            m4 += std::pow(steps.rows.row(j).dot(u), 4);
        m4 /= static_cast<double>(steps.rows.rows());
        CHECK(cs.projected(u, 4) == doctest::Approx(-2 * m4));
    }
    SUBCASE("additivity over a split index set")
    {
        const auto dist = CoefficientDist::uniform_symmetric();
        const auto all = average_cumulants(step_matrix(tup, {-n, n}), dist, 4);
        const auto lo = average_cumulants(step_matrix(tup, {-n, 10}), dist, 4);
        const auto hi = average_cumulants(step_matrix(tup, {11, n}), dist, 4);
        const double wl = static_cast<double>(n + 11) / (2 * n + 1), wh = static_cast<double>(n - 10) / (2 * n + 1);
        for (int r = 1; r <= 4; ++r)
            for (MonoKey k : monomials_of_degree(8, r)) {
                const auto nu = unpack_exponents(k, 8);
                CHECK(std::abs(all.value(nu) - (wl * lo.value(nu) + wh * hi.value(nu))) <= 1e-12);
            }
    }
    SUBCASE("refusals")
    {
        CHECK_THROWS_AS(average_cumulants(steps, CoefficientDist::rademacher(), 7), Refusal);
        CHECK_THROWS_AS(average_cumulants(steps, CoefficientDist::rademacher(), 0), Refusal);
    }
}

TEST_CASE("expansion densities")
{
    const int n = 64;
    const auto tup = tuple2(n);
    const auto steps = step_matrix(tup, {-n, n});
    const auto cov = covariance(steps);

    SUBCASE("order two is the Gaussian density")
    {
        const auto q = build_expansion(average_cumulants(steps, CoefficientDist::rademacher(), 2), cov.v, 2);
        const Eigen::LLT<Eigen::MatrixXd> llt(cov.v);
        const double logdet = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        Eigen::VectorXd x(8);
        x << 0.1, -0.2, 0.3, 0.0, 0.5, -0.1, 0.2, 0.1;
        const double want = std::exp(-0.5 * x.dot(cov.v.inverse() * x) - 0.5 * logdet - 4 * std::log(2 * kPi));
        CHECK(q(x) == doctest::Approx(want).epsilon(1e-10));
        CHECK(q.gaussian(x) == doctest::Approx(want).epsilon(1e-10));
        CHECK(q.polys().size() == 1);
    }
    SUBCASE("symmetric law: order three equals order two")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::rademacher(), 3);
        const auto q2 = build_expansion(cs, cov.v, 2), q3 = build_expansion(cs, cov.v, 3);
        Engine rng = make_engine(31);
        std::normal_distribution<double> g;
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd x(8);
            for (int i = 0; i < 8; ++i)
                x[i] = g(rng);
            CHECK(q3(x) == doctest::Approx(q2(x)).epsilon(1e-13));
        }
    }
    SUBCASE("refusals")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::rademacher(), 4);
        CHECK_THROWS_AS(build_expansion(cs, cov.v, 5), Refusal);
        CHECK_THROWS_AS(build_expansion(cs, cov.v, 1), Refusal);
        CHECK_THROWS_AS(build_expansion(average_cumulants(steps, CoefficientDist::rademacher(), 3), cov.v, 4),
                        Refusal);
        const auto sing = covariance(PhaseTuple({100.0, 100.0}, n), {-n, n});
        CHECK_THROWS_AS(build_expansion(cs, sing.v, 4), Refusal);
    }
}

TEST_CASE("one-dimensional expansion matches the classical Edgeworth series")
{
    const double sigma = 1.3, k3 = 0.8, k4 = -1.1;
    const std::size_t count = 50;
    CumulantSet cs;
    cs.dims = 1;
    cs.order = 4;
    cs.count = count;
    cs.values[key_of({1})] = 0.0;
    cs.values[key_of({2})] = sigma * sigma;
    cs.values[key_of({3})] = k3;
    cs.values[key_of({4})] = k4;
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = sigma * sigma;
    const auto q = build_expansion(cs, v, 4);
    const double eps = 1 / std::sqrt(static_cast<double>(count));
    CHECK(q.eps() == doctest::Approx(eps));

    auto he3 = [](double z) { return z * z * z - 3 * z; };
    auto he4 = [](double z) { return std::pow(z, 4) - 6 * z * z + 3; };
    auto he6 = [](double z) { return std::pow(z, 6) - 15 * std::pow(z, 4) + 45 * z * z - 15; };
    double worst = 0;
    for (double x = -6; x <= 6; x += 0.05) {
        const double z = x / sigma;
        const double phi = std::exp(-z * z / 2) / (sigma * std::sqrt(2 * kPi));
        const double want = phi * (1 + eps * k3 / (6 * std::pow(sigma, 3)) * he3(z) +
                                   eps * eps *
                                       (k4 / (24 * std::pow(sigma, 4)) * he4(z) +
                                        k3 * k3 / (72 * std::pow(sigma, 6)) * he6(z)));
        Eigen::VectorXd pt(1);
        pt[0] = x;
        worst = std::max(worst, std::abs(q(pt) - want));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly")
{
    for (int order : {4, 8, 16}) {
        const auto [x, w] = gauss_legendre(order);
        REQUIRE(x.size() == static_cast<std::size_t>(order));
        for (int p = 0; p < 2 * order; ++p) {
            double s = 0;
            for (std::size_t i = 0; i < x.size(); ++i)
                s += w[i] * std::pow(x[i], p);
            const double want = p % 2 ? 0.0 : 2.0 / (p + 1);
            CHECK(s == doctest::Approx(want).scale(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("box probabilities")
{
    SUBCASE("diagonal Gaussian against erf")
    {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 3);
        v.diagonal() << 0.5, 1.0, 2.0;
        const Box box{{-0.3, 0.9}, {-1.0, 0.2}, {0.1, 2.5}};
        double want = 1;
        for (int i = 0; i < 3; ++i) {
            const double s = std::sqrt(v(i, i));
            want *= std_normal_cdf(box[static_cast<std::size_t>(i)].second / s) -
                    std_normal_cdf(box[static_cast<std::size_t>(i)].first / s);
        }
        CHECK(box_probability(GaussianComparison{v}, box).value == doctest::Approx(want).epsilon(1e-12));
        const auto quad = box_probability(gaussian_density(v), box);
        CHECK(quad.converged);
        CHECK(quad.value == doctest::Approx(want).epsilon(1e-6));
    }
    SUBCASE("correlated Gaussian against a conditional-law oracle")
    {
        const double rho = 0.6;
        Eigen::MatrixXd v(2, 2);
        v << 1, rho, rho, 1;
        const Box box{{-0.5, 1.2}, {-1.5, 0.3}};
        const double want = bivariate_box(-0.5, 1.2, -1.5, 0.3, rho);
        const auto got = box_probability(GaussianComparison{v}, box);
        CHECK(got.converged);
        CHECK(got.value == doctest::Approx(want).epsilon(1e-6));
    }

    const int n = 64;
    const PhaseTuple tup({0.137 * 2 * kPi * n}, n);
    const auto steps = step_matrix(tup, {-n, n});
    const auto cov = covariance(steps);
    Box whole;
    for (int i = 0; i < 4; ++i) {
        const double s = std::sqrt(cov.v(i, i));
        whole.push_back({-10 * s, 10 * s});
    }
    QuadOptions coarse;
    coarse.rel_tol = 1e-7;

    SUBCASE("whole space has unit mass")
    {
        const auto q = gaussian_density(cov.v);
        CHECK(box_probability(q, whole, coarse).value == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("symmetric box and symmetric law: order three equals order two")
    {
        const auto cs = average_cumulants(steps, CoefficientDist::uniform_symmetric(), 3);
        const auto box = centered_box(4, 0.6);
        const double p2 = box_probability(build_expansion(cs, cov.v, 2), box).value;
        const double p3 = box_probability(build_expansion(cs, cov.v, 3), box).value;
        CHECK(p3 == doctest::Approx(p2).epsilon(1e-10));
    }
}

TEST_CASE("moment matching and cancellation of correction terms")
{
    // Asymmetric law so that the third-order term is present.
    auto expo = CoefficientDist::custom(
        "centered-exponential", [](Engine& e) { return std::exponential_distribution<double>(1.0)(e) - 1.0; },
        {1, 0, 1, 2, 9});
    const int n = 16;
    const PhaseTuple tup({0.29 * 2 * kPi * n}, n);
    const auto steps = step_matrix(tup, {-n, n});
    const auto cov = covariance(steps);
    const auto q = build_expansion(average_cumulants(steps, expo, 4), cov.v, 4);
    REQUIRE(q.polys().size() == 3);
    CHECK_FALSE(q.polys()[1].empty());

    Box whole;
    for (int i = 0; i < 4; ++i) {
        const double s = std::sqrt(cov.v(i, i));
        whole.push_back({-8 * s, 8 * s});
    }
    CHECK(box_probability(q, whole).value == doctest::Approx(1.0).epsilon(1e-4));
    for (int r = 1; r <= 2; ++r)
        CHECK(std::abs(box_term(q, r, whole).value) <= 1e-3);
    for (int a = 0; a < 4; ++a) {
        std::vector<int> e(4, 0);
        e[static_cast<std::size_t>(a)] = 1;
        CHECK(std::abs(box_moment(q, whole, pack_exponents(e)).value) <= 1e-4);
        for (int b = a; b < 4; ++b) {
            std::vector<int> f(4, 0);
            f[static_cast<std::size_t>(a)] += 1;
            f[static_cast<std::size_t>(b)] += 1;
            CHECK(box_moment(q, whole, pack_exponents(f)).value == doctest::Approx(cov.v(a, b)).scale(1.0).epsilon(1e-4));
        }
    }
}

TEST_CASE("box comparison")
{
    SUBCASE("point mass at zero")
    {
        auto zero = CoefficientDist::custom("zero", [](Engine&) { return 0.0; }, {1, 0, 0});
        const PhaseTuple tup({0.3 * 2 * kPi * 32}, 32);
        const auto in = compare_box(tup, zero, centered_box(4, 0.5), 10000, 2, 1);
        CHECK(in.empirical == 1.0);
        Box off = centered_box(4, 0.5);
        off[0] = {0.1, 0.6};
        CHECK(compare_box(tup, zero, off, 10000, 2, 1).empirical == 0.0);
    }
    SUBCASE("order two reports the Gaussian value as the expansion")
    {
        const PhaseTuple tup({0.3 * 2 * kPi * 32}, 32);
        const auto c = compare_box(tup, CoefficientDist::rademacher(), centered_box(4, 0.5), 10000, 2, 3);
        CHECK(c.edgeworth == c.gaussian);
        CHECK(c.diff_edgeworth == c.diff_gaussian);
        CHECK_THROWS_AS(compare_box(tup, CoefficientDist::rademacher(), centered_box(4, 0.5), 9999, 2, 3), Refusal);
    }
    SUBCASE("unit box at n = 512 against the Gaussian law")
    {
        const int n = 512;
        const PhaseTuple tup({0.137 * 2 * kPi * n}, n);
        const auto c = compare_box(tup, CoefficientDist::rademacher(), centered_box(4, 0.5), 1'000'000, 2, 5);
        const double constant = 1.0;
        MESSAGE("empirical " << c.empirical << ", gaussian " << c.gaussian << ", diff " << c.diff_gaussian
                             << ", stderr " << c.stderr);
        CHECK(std::abs(c.diff_gaussian) <= std::max(3 * c.stderr, constant / std::sqrt(n)));
        CHECK(c.quadrature_converged);
    }
}
