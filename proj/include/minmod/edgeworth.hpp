// SPDX-License-Identifier: Apache-2.0
//
// Averaged cumulants of the phase-space walk and low-order Edgeworth
// densities
//
//   Q_l(x) = phi_V(x) (1 + sum_{r=1}^{l-2} eps^r P_r(x)),   eps = |J|^{-1/2},
//
// where P_r phi_V = T_r(-D) phi_V with T_1(z) = K_3(z), T_2(z) = K_4(z) + K_3(z)^2/2
// and K_r(z) = sum_{|nu|=r} chi_nu z^nu / nu!.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minmod/multipoly.hpp"
#include "minmod/phasewalk.hpp"

namespace minmod {

/// kappa_1..kappa_order of the scalar law (index 0 unused), from its moments.
/// Refuses when the law lacks moments up to `order`.
std::vector<double> scalar_cumulants(const CoefficientDist& dist, int order);

struct CumulantSet {
    int dims = 0;
    int order = 0;
    std::size_t count = 0;  ///< number of steps averaged over
    std::vector<double> kappa;  ///< scalar cumulants of the coefficient law
    std::unordered_map<MonoKey, double> values;  ///< chi_nu for 1 <= |nu| <= order

    double value(std::span<const int> nu) const;
    /// Cumulant of order r of <u, X> for one averaged step X:
    /// sum_{|nu|=r} r!/nu! chi_nu u^nu.
    double projected(const Eigen::VectorXd& u, int r) const;
};

/// chi_nu = kappa_{|nu|} * (1/rows) sum_j w_j^nu over the rows of the step
/// matrix. Refuses order outside [1, 6] or missing moments.
CumulantSet average_cumulants(const StepMatrix& steps, const CoefficientDist& dist, int order);
CumulantSet average_cumulants(const PhaseTuple& tuple, const CoefficientDist& dist, int order);

struct GaussianComparison {
    Eigen::MatrixXd v;
};

class ExpansionDensity {
public:
    int ell() const { return ell_; }
    int dims() const { return static_cast<int>(v_.rows()); }
    double eps() const { return eps_; }
    const Eigen::MatrixXd& covariance() const { return v_; }
    const Eigen::MatrixXd& precision() const { return lambda_; }
    /// P_0 = 1, then P_1 .. P_{l-2}.
    const std::vector<MultiPoly>& polys() const { return polys_; }

    double gaussian(const Eigen::VectorXd& x) const;
    double operator()(const Eigen::VectorXd& x) const;
    /// eps^r P_r(x) phi_V(x)
    double term(int r, const Eigen::VectorXd& x) const;
    /// 1 + sum_r eps^r P_r
    MultiPoly correction() const;

private:
    friend ExpansionDensity build_expansion(const CumulantSet&, const Eigen::MatrixXd&, int);
    friend ExpansionDensity gaussian_density(const Eigen::MatrixXd&);
    int ell_ = 2;
    double eps_ = 0.0;
    double log_norm_ = 0.0;
    Eigen::MatrixXd v_;
    Eigen::MatrixXd lambda_;
    std::vector<MultiPoly> polys_;
};

/// Refuses l outside {2, 3, 4}, sigma_min(V) <= 1e-8, or cumulants of too low
/// order.
ExpansionDensity build_expansion(const CumulantSet& cumulants, const Eigen::MatrixXd& v, int ell);
ExpansionDensity gaussian_density(const Eigen::MatrixXd& v);

using Box = std::vector<std::pair<double, double>>;

/// [-h, h]^dims
Box centered_box(int dims, double half_side);

struct QuadOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
    double panel_sigmas = 1.5;     ///< panel width in marginal standard deviations
    double max_points = 4e8;       ///< largest tensor grid attempted
    unsigned threads = 0;
};

struct BoxIntegral {
    double value = 0.0;
    double error = 0.0;  ///< difference between the last two quadrature orders
    bool converged = false;
    int order = 0;       ///< Gauss-Legendre points per panel
};

/// Integral over the box of phi_V * poly (tensor Gauss-Legendre, order doubled
/// until successive values agree).
BoxIntegral integrate_gaussian_poly(const Eigen::MatrixXd& v, const MultiPoly& poly, const Box& box,
                                    const QuadOptions& opts = {});

BoxIntegral box_probability(const ExpansionDensity& density, const Box& box, const QuadOptions& opts = {});
/// Product of erf differences when V is diagonal, quadrature otherwise.
BoxIntegral box_probability(const GaussianComparison& gauss, const Box& box, const QuadOptions& opts = {});
/// Integral of x^nu Q(x) over the box.
BoxIntegral box_moment(const ExpansionDensity& density, const Box& box, MonoKey nu, const QuadOptions& opts = {});
/// Integral of eps^r P_r phi_V over the box.
BoxIntegral box_term(const ExpansionDensity& density, int r, const Box& box, const QuadOptions& opts = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

struct BoxComparison {
    double empirical = 0.0;
    double stderr = 0.0;
    double gaussian = 0.0;
    double edgeworth = 0.0;
    double diff_gaussian = 0.0;   ///< empirical - gaussian
    double diff_edgeworth = 0.0;  ///< empirical - edgeworth
    bool quadrature_converged = true;
};

/// Monte Carlo box probability of the normalized walk against the Gaussian and
/// Edgeworth predictions. Refuses fewer than 10^4 samples.
BoxComparison compare_box(const PhaseTuple& tuple, const CoefficientDist& dist, const Box& box,
                          std::size_t samples, int ell, std::uint64_t seed, unsigned threads = 0);

}  // namespace minmod
