// SPDX-License-Identifier: Apache-2.0
//
// minmod: command-line front end for the minimum-modulus laboratory.
//
// Exit codes: 0 success, 2 precondition refusal, 3 acceptance failure (report).
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minmod/acceptance.hpp"
#include "minmod/arithmetic.hpp"
#include "minmod/edgeworth.hpp"
#include "minmod/ensemble.hpp"
#include "minmod/error.hpp"
#include "minmod/minima.hpp"
#include "minmod/phasewalk.hpp"
#include "minmod/polymodel.hpp"
#include "minmod/stats.hpp"

using namespace minmod;
using json = nlohmann::json;

namespace {

struct Common {
    std::string model = "symmetric";
    std::string dist = "gaussian-complex";
    int n = 100;
    std::size_t replicates = 1000;
    std::uint64_t seed = 1;
    double k0 = 5.0;
    double c0 = 2.0;
    int beta = 64;
    double kappa = 0.1;
    std::string method = "dense";
    std::string out;
    std::string format = "json";
    unsigned threads = 0;
};

struct TupleArgs {
    std::vector<double> t;
    std::size_t m = 1;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--model", c.model, "symmetric | one-sided | cossin")->capture_default_str();
    sub->add_option("--dist", c.dist, "rademacher | gaussian | gaussian-complex | uniform")->capture_default_str();
    sub->add_option("--n", c.n, "degree")->capture_default_str();
    sub->add_option("--replicates", c.replicates, "ensemble size or sample count")->capture_default_str();
    sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
    sub->add_option("--k0", c.k0, "mesh exponent K0")->capture_default_str();
    sub->add_option("--c0", c.c0, "derivative window constant C0")->capture_default_str();
    sub->add_option("--beta", c.beta, "mesh oversampling factor")->capture_default_str();
    sub->add_option("--kappa", c.kappa, "bad-arc smoothness exponent")->capture_default_str();
    sub->add_option("--method", c.method, "mesh | dense")->capture_default_str();
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads (0 = hardware)")->capture_default_str();
}

void add_tuple(CLI::App* sub, TupleArgs& t)
{
    sub->add_option("--t", t.t, "explicit tuple of rescaled angles t_r");
    sub->add_option("--m", t.m, "tuple size when drawing a random smooth, spread tuple")->capture_default_str();
}

PhaseTuple make_tuple(const TupleArgs& args, const Common& c)
{
    if (!args.t.empty())
        return PhaseTuple(args.t, c.n);
    Engine rng = make_engine(c.seed);
    return random_tuple(c.n, args.m, std::pow(static_cast<double>(c.n), 0.3), 1.0, rng);
}

ModelSpec make_spec(const Common& c)
{
    ModelSpec s{parse_model(c.model), c.n, 0.5, CoefficientDist::parse(c.dist)};
    s.validate();
    return s;
}

// Writes to --out or stdout.
void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f)
        throw Refusal("cannot open output file " + c.out);
    f << text;
}

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

int cmd_simulate(const Common& c, int bins, double hist_max, std::size_t resolution)
{
    const ModelSpec spec = make_spec(c);
    EnsembleOptions eo;
    eo.method = parse_method(c.method);
    eo.dense.resolution = resolution;
    eo.threads = c.threads;
    const EnsembleResult res =
        run_ensemble(spec, MeshParams{c.k0, c.c0, c.beta, c.kappa}, c.replicates, c.seed, eo);
    const auto valid = res.valid_samples();
    std::ostringstream os;
    if (c.format == "csv") {
        os << "replicate,seed,n_m_n,failed\n";
        for (std::size_t i = 0; i < res.samples.size(); ++i)
            os << i << ',' << res.seeds[i] << ',' << res.samples[i] << ',' << (res.failed[i] ? 1 : 0) << '\n';
        emit(c, os.str());
        return 0;
    }
    json j;
    j["model"] = model_name(spec.model);
    j["dist"] = spec.dist.name();
    j["n"] = spec.n;
    j["replicates"] = c.replicates;
    j["method"] = method_name(res.method);
    j["mesh"] = {{"n_nominal", res.mesh.n_nominal}, {"n_effective", res.mesh.n_effective}};
    j["failures"] = res.failures();
    j["wallclock"] = res.wallclock;
    if (valid.size() >= 100 && *std::min_element(valid.begin(), valid.end()) <
                                   *std::max_element(valid.begin(), valid.end())) {
        const FitReport f = fit_exponential(valid);
        j["fit"] = {{"lambda_mle", f.lambda_mle},       {"lambda_tail", f.lambda_tail},
                    {"ks_vs_fit", f.ks_vs_fit},         {"ks_vs_target", f.ks_vs_target},
                    {"ci_mle", {f.ci_mle.lo, f.ci_mle.hi}}, {"ci_tail", {f.ci_tail.lo, f.ci_tail.hi}},
                    {"target", kExponentialRate}};
    }
    json h = json::array();
    for (const auto& b : histogram(valid, bins, 0.0, hist_max))
        h.push_back({{"bin_left", b.left}, {"bin_right", b.right}, {"count", b.count}, {"density", b.density}});
    j["histogram"] = h;
    j["samples"] = res.samples;
    j["seeds"] = res.seeds;
    if (res.method == MethodKind::MeshLinearized) {
        std::size_t differs = 0;
        for (bool b : res.sharp_differs)
            differs += b;
        j["sharp_differs_fraction"] = static_cast<double>(differs) / static_cast<double>(res.samples.size());
    }
    emit(c, j.dump(2) + "\n");
    return 0;
}

int cmd_minmod(const Common& c, std::size_t resolution, const std::string& sites_path)
{
    const ModelSpec spec = make_spec(c);
    const PolySample poly = sample_polynomial(spec, c.seed);
    const MeshConfig mesh = build_mesh(spec.n, c.k0, c.c0, c.beta);
    const GlobalMin lin = global_min(poly, MeshLinearized{mesh});
    const GlobalMin dense = global_min(poly, DenseOracle{resolution ? resolution : mesh.n_effective, 40, 16});
    const MinimaProcess proc = select_minima(poly, mesh, c.kappa);
    if (!sites_path.empty()) {
        std::ofstream f(sites_path);
        if (!f)
            throw Refusal("cannot open " + sites_path);
        write_sites_csv(f, site_records(poly, mesh));
    }
    const DerivativeEvent g2 = check_derivative_event(poly, 2, c.k0 / 2);
    if (c.format == "csv") {
        std::ostringstream os;
        os << "method,x_star,m_n,n_m_n\n"
           << "mesh," << lin.x_star << ',' << lin.m_n << ',' << spec.n * lin.m_n << '\n'
           << "dense," << dense.x_star << ',' << dense.m_n << ',' << spec.n * dense.m_n << '\n';
        emit(c, os.str());
        return 0;
    }
    json j;
    j["n"] = spec.n;
    j["seed"] = c.seed;
    j["mesh_linearized"] = {{"x_star", lin.x_star}, {"m_n", lin.m_n}, {"fallback", lin.fallback}};
    j["dense_oracle"] = {{"x_star", dense.x_star}, {"m_n", dense.m_n}};
    j["n_effective"] = mesh.n_effective;
    j["flagged_sites"] = proc.records.size();
    j["separation_violations"] = check_separation(proc, c.k0).size();
    j["derivative_event_2"] = {{"holds", g2.holds}, {"sup_value", g2.sup_value}};
    emit(c, j.dump(2) + "\n");
    return 0;
}

int cmd_classify(const Common& c, const TupleArgs& targs)
{
    if (targs.t.empty()) {
        const MeshConfig mesh = build_mesh(c.n, c.k0, c.c0, c.beta);
        const auto mask = classify_bad_arcs(mesh, c.kappa);
        std::ostringstream os;
        if (c.format == "csv") {
            os << "alpha,x,bad\n";
            for (std::size_t a = 1; a <= mask.size(); ++a)
                os << a << ',' << mesh.x(a) << ',' << (mask[a - 1] ? 1 : 0) << '\n';
        } else {
            std::size_t bad = 0;
            for (bool b : mask)
                bad += b;
            json j{{"n", c.n}, {"n_effective", mesh.n_effective}, {"kappa", c.kappa}, {"bad_sites", bad},
                   {"bad_fraction", static_cast<double>(bad) / static_cast<double>(mask.size())}};
            os << j.dump(2) << '\n';
        }
        emit(c, os.str());
        return 0;
    }
    const PhaseTuple tuple(targs.t, c.n);
    std::vector<double> kgrid, lgrid;
    for (double k = 0.5; k <= 64; k *= 2)
        kgrid.push_back(k);
    for (double l = 0.125; l <= 8; l *= 2)
        lgrid.push_back(l);
    const ArithMeta meta = classify_tuple(tuple, kgrid, lgrid);
    json j{{"n", c.n}, {"t", tuple.t}};
    j["smooth_k"] = meta.smooth_k ? json(*meta.smooth_k) : json(nullptr);
    j["spread_lambda"] = meta.spread_lambda ? json(*meta.spread_lambda) : json(nullptr);
    j["weakly_spread_lambda"] = meta.weakly_spread_lambda ? json(*meta.weakly_spread_lambda) : json(nullptr);
    j["smooth_n_kappa"] = is_smooth(tuple, std::pow(static_cast<double>(c.n), c.kappa));
    emit(c, j.dump(2) + "\n");
    return 0;
}

int cmd_covariance(const Common& c, const TupleArgs& targs, bool complex_variant)
{
    const PhaseTuple tuple = make_tuple(targs, c);
    const WalkVariant v = complex_variant ? WalkVariant::Complex2m : WalkVariant::Full4m;
    const Covariance cov = covariance(tuple, default_range(tuple, v), v);
    std::ostringstream os;
    if (c.format == "csv") {
        for (Eigen::Index i = 0; i < cov.v.rows(); ++i) {
            for (Eigen::Index k = 0; k < cov.v.cols(); ++k)
                os << (k ? "," : "") << cov.v(i, k);
            os << '\n';
        }
    } else {
        os << json{{"n", c.n}, {"t", tuple.t}, {"sigma_min", cov.sigma_min}, {"V", matrix_json(cov.v)}}.dump(2)
           << '\n';
    }
    emit(c, os.str());
    return 0;
}

int cmd_charfn(const Common& c, const TupleArgs& targs, int probes, double xmin, double xmax, std::size_t samples)
{
    const PhaseTuple tuple = make_tuple(targs, c);
    const CoefficientDist dist = CoefficientDist::parse(c.dist);
    const StepMatrix steps = step_matrix(tuple, default_range(tuple, WalkVariant::Full4m));
    Engine rng = make_engine(split_seed(c.seed, 1));
    std::uniform_real_distribution<double> logr(std::log(xmin), std::log(xmax));
    std::normal_distribution<double> g;
    std::ostringstream os;
    os << "probe,norm,log_modulus,stderr,saturated\n";
    for (int p = 0; p < probes; ++p) {
        Eigen::VectorXd x(steps.dim());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = g(rng);
        x *= std::exp(logr(rng)) / x.norm();
        CharFnOptions opts;
        opts.samples = samples;
        opts.seed = split_seed(c.seed, 1000 + static_cast<std::uint64_t>(p));
        const CharFnValue v = charfn_log_modulus(steps, x, dist, opts);
        os << p << ',' << x.norm() << ',' << v.log_modulus << ',' << v.stderr << ',' << (v.saturated ? 1 : 0) << '\n';
    }
    emit(c, os.str());
    return 0;
}

int cmd_smallball(const Common& c, const TupleArgs& targs, const std::vector<double>& deltas)
{
    const PhaseTuple tuple = make_tuple(targs, c);
    const auto prof = small_ball_profile(tuple, CoefficientDist::parse(c.dist),
                                         Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * tuple.m())), deltas,
                                         c.replicates, c.seed, c.threads);
    std::ostringstream os;
    os << "delta,p_hat,stderr\n";
    for (std::size_t i = 0; i < deltas.size(); ++i)
        os << deltas[i] << ',' << prof[i].p_hat << ',' << prof[i].stderr << '\n';
    emit(c, os.str());
    return 0;
}

int cmd_edgeworth(const Common& c, const TupleArgs& targs, int ell, double half_side)
{
    const PhaseTuple tuple = make_tuple(targs, c);
    const Box box = centered_box(static_cast<int>(4 * tuple.m()), half_side);
    const BoxComparison r =
        compare_box(tuple, CoefficientDist::parse(c.dist), box, c.replicates, ell, c.seed, c.threads);
    json j{{"n", c.n},
           {"t", tuple.t},
           {"ell", ell},
           {"half_side", half_side},
           {"samples", c.replicates},
           {"empirical", r.empirical},
           {"stderr", r.stderr},
           {"gaussian", r.gaussian},
           {"edgeworth", r.edgeworth},
           {"diff_gaussian", r.diff_gaussian},
           {"diff_edgeworth", r.diff_edgeworth},
           {"quadrature_converged", r.quadrature_converged}};
    emit(c, j.dump(2) + "\n");
    return 0;
}

int cmd_report(const Common& c, const std::vector<int>& only)
{
    AcceptanceOptions opts;
    opts.threads = c.threads;
    const auto results = run_acceptance(only, opts, &std::cout);
    bool all = true;
    for (const auto& r : results)
        all = all && r.pass;
    std::cout << (all ? "all acceptance criteria passed\n" : "some acceptance criteria failed\n");
    return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Minimum modulus of random trigonometric polynomials"};
    app.require_subcommand(1);
    Common c;
    TupleArgs targs;

    auto* simulate = app.add_subcommand("simulate", "ensemble of n*m_n with exponential fit and histogram");
    add_common(simulate, c);
    int bins = 40;
    double hist_max = 4.0;
    std::size_t resolution = 0;
    simulate->add_option("--bins", bins, "histogram bins")->capture_default_str();
    simulate->add_option("--hist-max", hist_max, "histogram upper edge")->capture_default_str();
    simulate->add_option("--resolution", resolution, "dense grid size (0 = mesh size)")->capture_default_str();

    auto* minmod_cmd = app.add_subcommand("minmod", "one instance, both minimization methods");
    add_common(minmod_cmd, c);
    std::string sites;
    minmod_cmd->add_option("--resolution", resolution, "dense grid size (0 = mesh size)");
    minmod_cmd->add_option("--sites", sites, "write per-site linearization CSV here");

    auto* classify = app.add_subcommand("classify", "bad-arc mask, or smooth/spread metadata for --t");
    add_common(classify, c);
    classify->add_option("--t", targs.t, "tuple of rescaled angles");

    auto* cov = app.add_subcommand("covariance", "walk covariance and its smallest eigenvalue");
    add_common(cov, c);
    add_tuple(cov, targs);
    bool complex_variant = false;
    cov->add_flag("--complex", complex_variant, "use the complex-coefficient 2m-dimensional walk");

    auto* charfn = app.add_subcommand("charfn", "log-modulus of the walk characteristic function at random probes");
    add_common(charfn, c);
    add_tuple(charfn, targs);
    int probes = 100;
    double xmin = 0.1, xmax = 10.0;
    std::size_t mc_samples = 20000;
    charfn->add_option("--probes", probes)->capture_default_str();
    charfn->add_option("--xmin", xmin, "smallest probe norm")->capture_default_str();
    charfn->add_option("--xmax", xmax, "largest probe norm")->capture_default_str();
    charfn->add_option("--samples", mc_samples, "Monte Carlo budget for laws without closed form")
        ->capture_default_str();

    auto* smallball = app.add_subcommand("smallball", "small-ball probabilities of the normalized walk");
    add_common(smallball, c);
    add_tuple(smallball, targs);
    std::vector<double> deltas{0.4, 0.6, 0.8, 1.0};
    smallball->add_option("--delta", deltas, "radii")->capture_default_str();

    auto* edgeworth = app.add_subcommand("edgeworth", "Monte Carlo box probability vs Gaussian and Edgeworth");
    add_common(edgeworth, c);
    add_tuple(edgeworth, targs);
    int ell = 4;
    double half_side = 0.5;
    edgeworth->add_option("--ell", ell, "expansion order 2..4")->capture_default_str();
    edgeworth->add_option("--half-side", half_side, "box is [-h, h]^{4m}")->capture_default_str();

    auto* report = app.add_subcommand("report", "run the acceptance checks");
    add_common(report, c);
    std::vector<int> only;
    report->add_option("--only", only, "criterion ids (default all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate)
            return cmd_simulate(c, bins, hist_max, resolution);
        if (*minmod_cmd)
            return cmd_minmod(c, resolution, sites);
        if (*classify)
            return cmd_classify(c, targs);
        if (*cov)
            return cmd_covariance(c, targs, complex_variant);
        if (*charfn)
            return cmd_charfn(c, targs, probes, xmin, xmax, mc_samples);
        if (*smallball)
            return cmd_smallball(c, targs, deltas);
        if (*edgeworth)
            return cmd_edgeworth(c, targs, ell, half_side);
        if (*report)
            return cmd_report(c, only);
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
