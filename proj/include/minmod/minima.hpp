// SPDX-License-Identifier: Apache-2.0
//
// Near-minima of |P| on the mesh via local linearization.
//
// At each mesh point the first-order model F(x) = p + (x - x_alpha) dp has
// |F| minimized at x_alpha + Y with value |Z|/n, where
//   Y = -Re(p conj(dp)) / |dp|^2,   Z = n Im(p conj(dp)) / |dp|.
// A site is flagged when the minimizer stays in its own cell with a small
// value (A') and P, P' are regular there (A'').
#pragma once

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "minmod/mesh.hpp"
#include "minmod/polymodel.hpp"

namespace minmod {

struct Linearization {
    double y = 0.0;
    double z = 0.0;
};

/// nullopt when dp == 0 (degenerate derivative).
std::optional<Linearization> linearize_site(cplx p, cplx dp, int n);

struct SiteRecord {
    std::size_t alpha = 0;
    double x = 0.0;
    cplx p;
    cplx dp;
    double y = 0.0;
    double z = 0.0;
    bool degenerate = false;
    bool flag_a_prime = false;
    bool flag_a_double_prime = false;
    bool flag_a = false;
};

struct MinimaProcess {
    MeshConfig mesh;
    std::vector<SiteRecord> records;   ///< flagged sites only, in alpha order
    std::vector<bool> in_bad_arc;      ///< parallel to records; true = thinned out of the sharp process
    double kappa = 0.1;

    /// X_alpha = Z_alpha over flagged sites.
    std::vector<double> points() const;
    /// Points of the process thinned by bad arcs.
    std::vector<double> sharp_points() const;
};

/// Linearization data and event flags at every mesh point.
std::vector<SiteRecord> site_records(const PolySample& poly, const MeshConfig& mesh);

/// Flagged sites of the mesh, with bad-arc thinning at smoothness exponent kappa.
MinimaProcess select_minima(const PolySample& poly, const MeshConfig& mesh, double kappa = 0.1);

void write_sites_csv(std::ostream& os, const std::vector<SiteRecord>& records);

struct MeshLinearized {
    MeshConfig mesh;
};

struct DenseOracle {
    std::size_t resolution = 10'000'000;
    int refine_iters = 40;
    /// Number of grid local minima (ranked by their linearized value) that get
    /// a golden-section refinement.
    int candidates = 16;
};

using GlobalMinMethod = std::variant<MeshLinearized, DenseOracle>;

struct GlobalMin {
    double x_star = 0.0;
    double m_n = 0.0;
    /// Mesh method only: no site was flagged and the raw mesh minimum was used.
    bool fallback = false;
};

GlobalMin global_min(const PolySample& poly, const GlobalMinMethod& method);

struct DerivativeEvent {
    bool holds = false;
    double sup_value = 0.0;  ///< estimate of sup_s |d^k/ds^k P(s/n)|
};

/// Event that n^{-k} sup_x |P^{(k)}(x)| <= (ln n)^{kexp}.
DerivativeEvent check_derivative_event(const PolySample& poly, int k, double kexp);

/// Estimate of sup_x |P^{(k)}(x)| (no rescaling).
double sup_derivative(const PolySample& poly, int k);

struct SeparationViolation {
    std::size_t alpha = 0;
    std::size_t alpha_prime = 0;
    /// Adjacent pair whose left recentering falls outside the allowed window,
    /// as opposed to a pair inside the forbidden band.
    bool adjacent = false;
};

/// Flagged pairs at cyclic index distance in [2, n / (ln n)^{3 K0}], plus
/// adjacent flagged pairs whose left site has Y outside
/// [pi/N - pi/(N (ln n)^{K0/4}), pi/N].
std::vector<SeparationViolation> check_separation(const MinimaProcess& process, double k0);

}  // namespace minmod
