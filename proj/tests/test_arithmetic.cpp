// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "minmod/arithmetic.hpp"
#include "minmod/error.hpp"

using namespace minmod;

namespace {

constexpr double kPi = std::numbers::pi;

double frac_dist(double x) { return std::abs(x - std::round(x)); }

// Definition, written out independently.
bool smooth_oracle(double t, double k, int n)
{
    const int top = static_cast<int>(std::floor(k + 1));
    for (int p0 = 1; p0 <= top; ++p0)
        if (!(frac_dist(p0 * t / (kPi * n)) > k / n))
            return false;
    return true;
}

double dilation_oracle(const std::vector<double>& t, int n, long long l)
{
    double best = 1.0;
    if (t.size() == 1)
        return frac_dist(std::fmod(static_cast<double>(l) * t[0] / (2 * kPi * n), 1.0));
    for (std::size_t r = 0; r < t.size(); ++r)
        for (std::size_t s = r + 1; s < t.size(); ++s)
            for (double sign : {-1.0, 1.0})
                best = std::min(best,
                                frac_dist(std::fmod(static_cast<double>(l) * (t[r] + sign * t[s]) / (2 * kPi * n), 1.0)));
    return best;
}

}  // namespace

TEST_CASE("torus distance")
{
    CHECK(torus_dist(0.0) == 0.0);
    CHECK(torus_dist(0.25) == doctest::Approx(0.25));
    CHECK(torus_dist(0.75) == doctest::Approx(0.25));
    CHECK(torus_dist(-3.1) == doctest::Approx(0.1));
    CHECK(torus_dist(1e9 + 0.5) == doctest::Approx(0.5));
}

TEST_CASE("smoothness examples")
{
    for (double k : {0.5, 1.0, 10.0})
        CHECK_FALSE(is_smooth(0.0, k, 100));
    CHECK_FALSE(is_smooth(kPi * 100 / 2, 1.0, 100));
    const double gamma = (std::sqrt(5.0) - 1) / 2;
    CHECK(is_smooth(kPi * 1000 * gamma, 10.0, 1000));
    CHECK(smooth_oracle(kPi * 1000 * gamma, 10.0, 1000));
}

TEST_CASE("smoothness matches the definition on random angles")
{
    Engine rng = make_engine(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 50 + trial;
        const double t = 2 * kPi * n * u(rng);
        const double k = 1 + 20 * u(rng);
        CHECK(is_smooth(t, k, n) == smooth_oracle(t, k, n));
    }
}

TEST_CASE("angles in the intermediate band are smooth")
{
    Engine rng = make_engine(13);
    for (int n : {1000, 100000, 1000000}) {
        for (double kappa : {0.05, 0.1}) {
            const double lo = std::pow(n, -1 + kappa), hi = std::pow(n, -2 * kappa);
            std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
            for (int trial = 0; trial < 200; ++trial) {
                const double d = std::exp(u(rng));
                const double sign = trial % 2 ? 1.0 : -1.0;
                const double t = kPi * n * (std::floor(trial / 4.0) + sign * d);
                CHECK(is_smooth(t, std::pow(n, kappa), n));
            }
        }
    }
}

TEST_CASE("spread examples")
{
    const double t = 3.7 * 100;
    CHECK_FALSE(is_spread(PhaseTuple({t, t}, 100), 0.1));
    CHECK_FALSE(is_spread(PhaseTuple({t, -t}, 100), 0.1));
    CHECK(is_weakly_spread(PhaseTuple({t, -t}, 100), 0.1));
    CHECK(is_spread(PhaseTuple({kPi * 10}, 10), 1.0));
    CHECK(is_weakly_spread(PhaseTuple({0.0}, 10), 5.0));
    CHECK_FALSE(is_spread(PhaseTuple({0.0}, 10), 0.5));
}

TEST_CASE("spread is monotone in lambda and implies weak spread")
{
    Engine rng = make_engine(14);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi * 512);
    const double grid[] = {0.25, 0.5, 1, 2, 4, 8, 16, 32};
    for (int trial = 0; trial < 300; ++trial) {
        PhaseTuple tup({u(rng), u(rng), u(rng)}, 512);
        bool prev = true;
        for (double l : grid) {
            const bool s = is_spread(tup, l);
            if (s)
                CHECK(prev);
            if (s)
                CHECK(is_weakly_spread(tup, l));
            prev = s;
        }
        const auto meta = classify_tuple(tup, std::vector<double>{1, 2, 4}, grid);
        if (meta.spread_lambda && meta.weakly_spread_lambda)
            CHECK(*meta.weakly_spread_lambda >= *meta.spread_lambda);
    }
}

TEST_CASE("tuples refuse non-finite entries and empty input")
{
    CHECK_THROWS_AS(PhaseTuple({}, 10), Refusal);
    CHECK_THROWS_AS(PhaseTuple({std::nan("")}, 10), Refusal);
    CHECK_THROWS_AS(PhaseTuple({1.0}, 0), Refusal);
}

TEST_CASE("bad arcs")
{
    const auto mesh = build_mesh(256);
    const auto mask = classify_bad_arcs(mesh, 0.1);
    REQUIRE(mask.size() == mesh.n_effective);
    CHECK(mask[mesh.n_effective - 1]);
    CHECK(mask[mesh.n_effective / 2 - 1]);
    CHECK(is_bad_mesh_point(mesh.n_effective, mesh, 0.1));
    CHECK(is_bad_mesh_point(mesh.n_effective / 2, mesh, 0.1));

    std::size_t bad = 0;
    for (std::size_t a = 1; a <= mesh.n_effective; ++a) {
        const bool oracle = !smooth_oracle(256 * mesh.x(a), std::pow(256.0, 0.1), 256);
        CHECK(mask[a - 1] == oracle);
        bad += mask[a - 1] ? 1 : 0;
    }
    CHECK(static_cast<double>(bad) / static_cast<double>(mesh.n_effective) <= 0.05);
}

TEST_CASE("dilation")
{
    SUBCASE("m = 1, t = 2 pi n / 3")
    {
        const int n = 999;
        PhaseTuple tup({2 * kPi * n / 3}, n);
        const auto d = find_dilation(tup, 1.0, 10.0);
        CHECK(d.achieved == doctest::Approx(1.0 / 3).epsilon(1e-9));
        CHECK(d.l % 3 != 0);
        CHECK(d.l >= static_cast<long long>(std::ceil(n / 20.0)));
        CHECK(d.l <= n / 10);
    }
    SUBCASE("m = 2, smooth and spread, n = 4096, K = 64")
    {
        Engine rng = make_engine(15);
        const int n = 4096;
        const auto tup = random_tuple(n, 2, std::pow(n, 0.3), 1.0, rng);
        const auto d = find_dilation(tup, 1.0, 64.0);
        CHECK(d.precondition_met);
        double best = -1;
        long long arg = 0;
        for (long long l = static_cast<long long>(std::ceil(n / 128.0)); l <= n / 64; ++l) {
            const double v = dilation_oracle(tup.t, n, l);
            if (v > best) {
                best = v;
                arg = l;
            }
        }
        CHECK(d.achieved == doctest::Approx(best).epsilon(1e-12));
        CHECK(d.l == arg);
        CHECK(d.achieved >= 1.0 / (8 * 64));
    }
    SUBCASE("repeated angle is not spread")
    {
        PhaseTuple tup({5.0, 5.0}, 1000);
        const auto d = find_dilation(tup, 1.0, 10.0);
        CHECK_FALSE(d.precondition_met);
        CHECK(d.achieved == 0.0);
    }
    SUBCASE("empty search interval")
    {
        CHECK_THROWS_AS(find_dilation(PhaseTuple({1.0}, 10), 1.0, 100.0), Refusal);
    }
    SUBCASE("agreement with exhaustive search across scales")
    {
        Engine rng = make_engine(16);
        for (int n : {256, 1024, 4096, 16384}) {
            std::uniform_real_distribution<double> u(0.0, 2 * kPi * n);
            for (std::size_t m : {1u, 2u, 3u}) {
                std::vector<double> t(m);
                for (auto& x : t)
                    x = u(rng);
                PhaseTuple tup(t, n);
                const double k = 8;
                const auto d = find_dilation(tup, 0.5, k);
                double best = -1;
                for (long long l = static_cast<long long>(std::ceil(n / (2 * k))); l <= static_cast<long long>(n / k); ++l)
                    best = std::max(best, dilation_oracle(t, n, l));
                CHECK(d.achieved == doctest::Approx(best).epsilon(1e-12));
                CHECK(dilation_score(tup, d.l) == doctest::Approx(d.achieved));
            }
        }
    }
}

TEST_CASE("pigeonhole shift")
{
    PhaseTuple tup({2 * kPi * 100 * 0.2, 2 * kPi * 100 * 0.4}, 100);
    const auto s = find_pigeonhole_shift(tup, 10);
    CHECK(s.q0 % 5 == 0);
    REQUIRE(s.s.size() == 2);
    CHECK(std::abs(s.s[0]) < 1e-12);
    CHECK(std::abs(s.s[1]) < 1e-12);
}

TEST_CASE("random tuples satisfy the requested conditions")
{
    Engine rng = make_engine(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto tup = random_tuple(4096, 2, std::pow(4096.0, 0.3), 1.0, rng);
        CHECK(tup.m() == 2);
        CHECK(is_smooth(tup, std::pow(4096.0, 0.3)));
        CHECK(is_spread(tup, 1.0));
    }
    CHECK_THROWS_AS(random_tuple(64, 2, 1.0, 30.0, rng, 50), Refusal);
}
