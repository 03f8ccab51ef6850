// SPDX-License-Identifier: Apache-2.0
//
// Diophantine classifiers for rescaled angles t = n x.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "minmod/mesh.hpp"
#include "minmod/rng.hpp"

namespace minmod {

/// Distance from x to the nearest integer.
double torus_dist(double x);

/// A tuple (t_1..t_m) of rescaled angles at scale n.
struct PhaseTuple {
    std::vector<double> t;
    int n = 1;

    PhaseTuple() = default;
    PhaseTuple(std::vector<double> angles, int scale);

    std::size_t m() const { return t.size(); }
};

/// K-smooth: || p0 t / (pi n) || > K/n for every nonzero |p0| <= K+1.
bool is_smooth(double t, double k, int n);
bool is_smooth(const PhaseTuple& tuple, double k);

/// lambda-spread: || (t_r +- t_r') / (2 pi n) || >= lambda/n for all pairs and
/// both signs; for m = 1, || t / (2 pi n) || >= lambda/n.
bool is_spread(const PhaseTuple& tuple, double lambda);
/// Difference sign only. Vacuous for m = 1.
bool is_weakly_spread(const PhaseTuple& tuple, double lambda);

struct ArithMeta {
    std::optional<double> smooth_k;
    std::optional<double> spread_lambda;
    std::optional<double> weakly_spread_lambda;
};

/// Largest value on each grid for which the property holds.
ArithMeta classify_tuple(const PhaseTuple& tuple, std::span<const double> k_grid,
                         std::span<const double> lambda_grid);

/// mask[alpha-1] is true when n x_alpha is not n^kappa-smooth. Uses exact
/// integer arithmetic on t/(pi n) = 2 alpha / N.
std::vector<bool> classify_bad_arcs(const MeshConfig& mesh, double kappa);

/// Bad-arc test for a single mesh index.
bool is_bad_mesh_point(std::size_t alpha, const MeshConfig& mesh, double kappa);

struct Dilation {
    long long l = 0;
    double achieved = 0.0;
    bool precondition_met = true;  ///< input was lambda-spread
};

/// Minimum over pairs and signs of || L (t_r +- t_r') / (2 pi n) || (m >= 2),
/// or || L t / (2 pi n) || for m = 1.
double dilation_score(const PhaseTuple& tuple, long long l);

/// Exhaustive search over integers L in [n/(2K), n/K] maximizing dilation_score.
/// Ties resolve to the smallest L. Refuses an empty interval.
Dilation find_dilation(const PhaseTuple& tuple, double lambda, double k);

struct PigeonholeShift {
    long long q0 = 0;
    std::vector<double> s;  ///< signed residuals q0 t_r/(2 pi n) - nearest integer
};

/// q in [1, q_max] minimizing sum_r || q t_r / (2 pi n) ||^2.
PigeonholeShift find_pigeonhole_shift(const PhaseTuple& tuple, long long q_max);

/// Rejection sampler: t_r uniform on [0, 2 pi n) until the tuple is K-smooth
/// and lambda-spread. Refuses after `max_tries` rejections.
PhaseTuple random_tuple(int n, std::size_t m, double smooth_k, double spread_lambda, Engine& rng,
                        int max_tries = 100000);

}  // namespace minmod
