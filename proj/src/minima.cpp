// SPDX-License-Identifier: Apache-2.0
#include "minmod/minima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "minmod/arithmetic.hpp"
#include "minmod/error.hpp"

namespace minmod {

MeshConfig build_mesh(int n, double k0, double c0, int beta)
{
    if (n <= 2)
        throw Refusal("build_mesh requires n >= 3 so that ln n > 1");
    if (!(k0 > 4.0))
        throw Refusal("mesh exponent K0 must exceed 4");
    if (!(c0 > 0.0))
        throw Refusal("derivative cap C0 must be positive");
    if (beta < 8)
        throw Refusal("oversampling floor beta must be >= 8");

    MeshConfig mesh;
    mesh.n = n;
    mesh.k0 = k0;
    mesh.c0 = c0;
    mesh.beta = beta;
    const long double nn = n;
    mesh.n_nominal = static_cast<long long>(std::floor(nn * nn / std::pow(std::log(nn), static_cast<long double>(k0))));
    const long long floor_n = static_cast<long long>(beta) * n;
    mesh.n_effective = static_cast<std::size_t>(std::max({mesh.n_nominal, floor_n, 2LL * n + 1}));
    return mesh;
}

std::optional<Linearization> linearize_site(cplx p, cplx dp, int n)
{
    const double dp2 = std::norm(dp);
    if (dp2 == 0.0)
        return std::nullopt;
    const cplx cross = p * std::conj(dp);
    return Linearization{-cross.real() / dp2, n * cross.imag() / std::sqrt(dp2)};
}

std::vector<double> MinimaProcess::points() const
{
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back(r.z);
    return out;
}

std::vector<double> MinimaProcess::sharp_points() const
{
    std::vector<double> out;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!in_bad_arc[i])
            out.push_back(records[i].z);
    return out;
}

std::vector<SiteRecord> site_records(const PolySample& poly, const MeshConfig& mesh)
{
    if (poly.spec.n != mesh.n)
        throw Refusal("mesh was built for n = " + std::to_string(mesh.n) + ", polynomial has n = " +
                      std::to_string(poly.spec.n));
    const auto values = evaluate_mesh(poly, mesh.n_effective, 0);
    const auto derivs = evaluate_mesh(poly, mesh.n_effective, 1);

    const double n = mesh.n;
    const double log_n = std::log(n);
    const double y_cap = mesh.half_width();
    const double p_cap = 1.0 / std::sqrt(n);
    const double dp_lo = n * std::pow(log_n, -mesh.k0 / 2.0);
    const double dp_hi = mesh.c0 * n * std::sqrt(log_n);

    std::vector<SiteRecord> out(mesh.n_effective);
    for (std::size_t alpha = 1; alpha <= mesh.n_effective; ++alpha) {
        SiteRecord& s = out[alpha - 1];
        s.alpha = alpha;
        s.x = mesh.x(alpha);
        s.p = values[alpha - 1];
        s.dp = derivs[alpha - 1];
        const auto lin = linearize_site(s.p, s.dp, mesh.n);
        if (!lin) {
            s.degenerate = true;
            s.y = s.z = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        s.y = lin->y;
        s.z = lin->z;
        s.flag_a_prime = std::abs(s.y) <= y_cap && std::abs(s.z) <= log_n;
        const double adp = std::abs(s.dp);
        s.flag_a_double_prime = std::abs(s.p) <= p_cap && adp >= dp_lo && adp <= dp_hi;
        s.flag_a = s.flag_a_prime && s.flag_a_double_prime;
    }
    return out;
}

MinimaProcess select_minima(const PolySample& poly, const MeshConfig& mesh, double kappa)
{
    MinimaProcess proc;
    proc.mesh = mesh;
    proc.kappa = kappa;
    for (auto& s : site_records(poly, mesh)) {
        if (!s.flag_a)
            continue;
        proc.in_bad_arc.push_back(is_bad_mesh_point(s.alpha, mesh, kappa));
        proc.records.push_back(s);
    }
    return proc;
}

void write_sites_csv(std::ostream& os, const std::vector<SiteRecord>& records)
{
    os << "alpha,x,re_p,im_p,re_dp,im_dp,y,z,a_prime,a_double_prime,a\n";
    os.precision(17);
    for (const auto& s : records) {
        os << s.alpha << ',' << s.x << ',' << s.p.real() << ',' << s.p.imag() << ',' << s.dp.real() << ','
           << s.dp.imag() << ',' << s.y << ',' << s.z << ',' << s.flag_a_prime << ',' << s.flag_a_double_prime
           << ',' << s.flag_a << '\n';
    }
}

namespace {

// Golden-section search for the minimum of f on [lo, hi].
template <class F>
std::pair<double, double> golden_search(F&& f, double lo, double hi, int iters)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

std::pair<double, double> golden_min(const FastEvaluator& eval, double lo, double hi, int iters)
{
    return golden_search([&](double x) { return std::abs(eval.value(x)); }, lo, hi, iters);
}

GlobalMin dense_oracle_min(const PolySample& poly, const DenseOracle& opt)
{
    const int n = poly.spec.n;
    if (opt.resolution < 4 * static_cast<std::size_t>(n) || opt.resolution < 2 * static_cast<std::size_t>(n) + 1)
        throw Refusal("dense oracle resolution " + std::to_string(opt.resolution) + " < 4n");
    const std::size_t R = opt.resolution;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(R);

    const auto values = evaluate_mesh(poly, R, 0);
    std::vector<std::size_t> local;
    for (std::size_t i = 0; i < R; ++i) {
        const double v = std::norm(values[i]);
        if (v <= std::norm(values[(i + R - 1) % R]) && v <= std::norm(values[(i + 1) % R]))
            local.push_back(i);
    }

    const FastEvaluator eval(poly);
    std::vector<cplx> derivs;
    const double direct_cost = static_cast<double>(local.size()) * static_cast<double>(2 * n + 1);
    const bool use_fft = direct_cost > static_cast<double>(R) * std::log2(static_cast<double>(R)) &&
                         R <= (std::size_t{1} << 23);
    if (use_fft)
        derivs = evaluate_mesh(poly, R, 1);

    // Rank local minima by the minimum of the linear model over the bracket.
    struct Candidate {
        double score;
        double x;
    };
    std::vector<Candidate> cands;
    cands.reserve(local.size());
    for (std::size_t i : local) {
        const double x = h * static_cast<double>(i + 1);  // element i is alpha = i+1
        const cplx p = values[i];
        const cplx dp = use_fft ? derivs[i] : eval.jet(x)[1];
        const double dp2 = std::norm(dp);
        double s = dp2 > 0 ? -(p * std::conj(dp)).real() / dp2 : 0.0;
        s = std::clamp(s, -h, h);
        cands.push_back({std::abs(p + s * dp), x});
    }
    const std::size_t keep = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(std::max(opt.candidates, 1)));
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                      [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

    GlobalMin best{0.0, std::numeric_limits<double>::infinity(), false};
    for (std::size_t c = 0; c < keep; ++c) {
        const auto [x, v] = golden_min(eval, cands[c].x - h, cands[c].x + h, opt.refine_iters);
        if (v < best.m_n)
            best = {x, v, false};
    }
    return best;
}

GlobalMin mesh_linearized_min(const PolySample& poly, const MeshConfig& mesh)
{
    const auto sites = site_records(poly, mesh);
    GlobalMin best{0.0, std::numeric_limits<double>::infinity(), false};
    for (const auto& s : sites) {
        if (!s.flag_a)
            continue;
        const double v = std::abs(s.z) / mesh.n;
        if (v < best.m_n)
            best = {s.x + s.y, v, false};
    }
    if (std::isfinite(best.m_n))
        return best;
    best.fallback = true;
    for (const auto& s : sites) {
        const double v = std::abs(s.p);
        if (v < best.m_n) {
            best.m_n = v;
            best.x_star = s.x;
        }
    }
    return best;
}

}  // namespace

GlobalMin global_min(const PolySample& poly, const GlobalMinMethod& method)
{
    if (poly.spec.n == 0) {
        // P is constant.
        return {0.0, std::abs(evaluate(poly, 0.0, 0)), false};
    }
    return std::visit(
        [&](const auto& m) -> GlobalMin {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DenseOracle>)
                return dense_oracle_min(poly, m);
            else
                return mesh_linearized_min(poly, m.mesh);
        },
        method);
}

double sup_derivative(const PolySample& poly, int k)
{
    const int n = poly.spec.n;
    if (n == 0)
        return k == 0 ? std::abs(evaluate(poly, 0.0, 0)) : 0.0;
    const std::size_t R = std::max<std::size_t>(16 * static_cast<std::size_t>(n), 64);
    const auto vals = evaluate_mesh(poly, R, k);
    double top = 0.0;
    for (const auto& v : vals)
        top = std::max(top, std::abs(v));
    // A grid maximum can sit up to 2% below its peak, so every local maximum
    // within 5% of the grid top is refined.
    const FastEvaluator eval(poly);
    const double h = 2.0 * std::numbers::pi / static_cast<double>(R);
    double best = top;
    for (std::size_t i = 0; i < R; ++i) {
        const double v = std::abs(vals[i]);
        if (v < 0.95 * top || v < std::abs(vals[(i + R - 1) % R]) || v < std::abs(vals[(i + 1) % R]))
            continue;
        const double x = h * static_cast<double>(i + 1);
        const auto [xs, fs] =
            golden_search([&](double y) { return -std::abs(eval.jet(y)[static_cast<std::size_t>(k)]); }, x - h, x + h, 60);
        best = std::max(best, -fs);
    }
    return best;
}

DerivativeEvent check_derivative_event(const PolySample& poly, int k, double kexp)
{
    if (k < 0 || k > 2)
        throw Refusal("derivative event order must be 0, 1 or 2");
    DerivativeEvent ev;
    const double n = std::max(poly.spec.n, 1);
    ev.sup_value = sup_derivative(poly, k) / std::pow(n, k);
    ev.holds = ev.sup_value <= std::pow(std::log(n), kexp);
    return ev;
}

std::vector<SeparationViolation> check_separation(const MinimaProcess& process, double k0)
{
    std::vector<SeparationViolation> out;
    const auto& recs = process.records;
    const auto N = static_cast<long long>(process.mesh.n_effective);
    const double n = process.mesh.n;
    const double log_n = std::log(n);
    const double band = n / std::pow(log_n, 3.0 * k0);
    const double hw = process.mesh.half_width();
    const double y_lo = hw - hw / std::pow(log_n, k0 / 4.0);

    for (std::size_t i = 0; i < recs.size(); ++i) {
        for (std::size_t j = i + 1; j < recs.size(); ++j) {
            const long long diff = static_cast<long long>(recs[j].alpha) - static_cast<long long>(recs[i].alpha);
            const long long d = std::min(std::abs(diff), N - std::abs(diff));
            if (d == 1) {
                const auto successor = [N](std::size_t a) { return static_cast<long long>(a) == N ? 1 : a + 1; };
                const bool i_left = successor(recs[i].alpha) == recs[j].alpha;
                const SiteRecord& left = i_left ? recs[i] : recs[j];
                if (!(left.y >= y_lo && left.y <= hw))
                    out.push_back({recs[i].alpha, recs[j].alpha, true});
            } else if (d >= 2 && static_cast<double>(d) <= band) {
                out.push_back({recs[i].alpha, recs[j].alpha, false});
            }
        }
    }
    return out;
}

}  // namespace minmod
