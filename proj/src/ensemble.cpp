// SPDX-License-Identifier: Apache-2.0
#include "minmod/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "minmod/error.hpp"
#include "minmod/parallel.hpp"
#include "minmod/rng.hpp"

namespace minmod {

std::string method_name(MethodKind kind)
{
    return kind == MethodKind::MeshLinearized ? "mesh" : "dense";
}

MethodKind parse_method(std::string_view name)
{
    if (name == "mesh" || name == "mesh_linearized")
        return MethodKind::MeshLinearized;
    if (name == "dense" || name == "dense_oracle")
        return MethodKind::DenseOracle;
    throw Refusal("unknown method '" + std::string(name) + "' (expected mesh or dense)");
}

std::size_t EnsembleResult::failures() const
{
    return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), true));
}

std::vector<double> EnsembleResult::valid_samples() const
{
    std::vector<double> out;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!failed[i])
            out.push_back(samples[i]);
    return out;
}

namespace {

struct Replicate {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool fallback = false;
    bool sharp_differs = false;
    bool failed = false;
    std::string error;
};

Replicate mesh_replicate(const PolySample& poly, const MeshConfig& mesh, double kappa)
{
    const MinimaProcess proc = select_minima(poly, mesh, kappa);
    Replicate r;
    if (proc.records.empty()) {
        const GlobalMin g = global_min(poly, MeshLinearized{mesh});
        r.value = mesh.n * g.m_n;
        r.fallback = g.fallback;
        return r;
    }
    const auto all = proc.points();
    const auto sharp = proc.sharp_points();
    auto min_abs = [](const std::vector<double>& v) {
        double m = std::numeric_limits<double>::infinity();
        for (double z : v)
            m = std::min(m, std::abs(z));
        return m;
    };
    const double a = min_abs(all);
    r.value = a;
    r.sharp_differs = sharp.empty() || min_abs(sharp) != a;
    return r;
}

}  // namespace

EnsembleResult run_ensemble(const ModelSpec& spec, const MeshParams& mesh_params, std::size_t replicates,
                            std::uint64_t master_seed, const EnsembleOptions& opts)
{
    if (replicates < 1)
        throw Refusal("ensemble needs at least one replicate");
    spec.validate();
    EnsembleResult res;
    res.spec = spec;
    res.mesh = build_mesh(spec.n, mesh_params.k0, mesh_params.c0, mesh_params.beta);
    res.method = opts.method;
    res.samples.assign(replicates, std::numeric_limits<double>::quiet_NaN());
    res.seeds.resize(replicates);
    res.failed.assign(replicates, false);
    res.errors.assign(replicates, {});
    res.fallback.assign(replicates, false);
    res.sharp_differs.assign(replicates, false);
    for (std::size_t i = 0; i < replicates; ++i)
        res.seeds[i] = split_seed(master_seed, i);

    DenseOracle dense = opts.dense;
    if (dense.resolution == 0)
        dense.resolution = res.mesh.n_effective;

    // Workers write only their own slot; the fold below runs in replicate order.
    std::vector<Replicate> out(replicates);
    const auto start = std::chrono::steady_clock::now();
    parallel_for(replicates, opts.threads, [&](std::size_t i) {
        try {
            const PolySample poly = sample_polynomial(spec, res.seeds[i]);
            if (opts.method == MethodKind::MeshLinearized) {
                out[i] = mesh_replicate(poly, res.mesh, mesh_params.kappa);
            } else {
                out[i].value = spec.n * global_min(poly, dense).m_n;
            }
        } catch (const std::exception& e) {
            out[i].error = e.what();
            out[i].failed = true;
        }
    });
    res.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t i = 0; i < replicates; ++i) {
        if (out[i].failed) {
            res.failed[i] = true;
            res.errors[i] = out[i].error;
            continue;
        }
        res.samples[i] = out[i].value;
        res.fallback[i] = out[i].fallback;
        res.sharp_differs[i] = out[i].sharp_differs;
    }
    return res;
}

}  // namespace minmod
