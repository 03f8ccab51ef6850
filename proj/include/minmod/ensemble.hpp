// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minmod/mesh.hpp"
#include "minmod/minima.hpp"
#include "minmod/polymodel.hpp"

namespace minmod {

struct MeshParams {
    double k0 = 5.0;
    double c0 = 2.0;
    int beta = 64;
    double kappa = 0.1;
};

enum class MethodKind { MeshLinearized, DenseOracle };

std::string method_name(MethodKind kind);
/// "mesh" or "dense".
MethodKind parse_method(std::string_view name);

struct EnsembleOptions {
    MethodKind method = MethodKind::DenseOracle;
    /// Used by the dense method; resolution 0 means the mesh size N_effective.
    DenseOracle dense{0, 40, 16};
    unsigned threads = 0;
};

struct EnsembleResult {
    ModelSpec spec;
    MeshConfig mesh;
    MethodKind method = MethodKind::DenseOracle;
    std::vector<double> samples;       ///< n * m_n; NaN where the replicate failed
    std::vector<std::uint64_t> seeds;  ///< per-replicate polynomial seeds
    std::vector<bool> failed;
    std::vector<std::string> errors;   ///< empty for successful replicates
    /// Mesh method only: no site was flagged and the raw mesh minimum was used.
    std::vector<bool> fallback;
    /// Mesh method only: the minimum over the bad-arc-thinned process differs
    /// from the unthinned one.
    std::vector<bool> sharp_differs;
    double wallclock = 0.0;

    std::size_t failures() const;
    std::vector<double> valid_samples() const;
};

/// Replicate i samples with seed split_seed(master_seed, i). Deterministic and
/// independent of the thread count. Refuses M < 1 and meshes build_mesh refuses.
EnsembleResult run_ensemble(const ModelSpec& spec, const MeshParams& mesh_params, std::size_t replicates,
                            std::uint64_t master_seed, const EnsembleOptions& opts = {});

}  // namespace minmod
