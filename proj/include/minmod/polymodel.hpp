// SPDX-License-Identifier: Apache-2.0
//
// Random trigonometric polynomial ensembles on the unit circle.
//
//   SymmetricKac:  P(x) = (2n+1)^{-1/2} sum_{j=-n}^{n} xi_j e^{ijx}
//   OneSidedKac:   P(x) = (n+1)^{-1/2}  sum_{j=0}^{n}  xi_j e^{ijx}
//   CosSin(a):     P(x) = (n+a)^{-1/2} [ sqrt(a) xi_0 + sum_{j=1}^{n} xi_j cos(jx) + eta_j sin(jx) ]
//
// Coefficients are stored unnormalized; the normalization is applied when a
// polynomial is evaluated.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "minmod/rng.hpp"

namespace minmod {

using cplx = std::complex<double>;

enum class DistKind { Rademacher, GaussianReal, GaussianComplexSplit, UniformSymmetric, Custom };

/// Law of the iid coefficients. All built-in laws are centered with unit
/// variance. GaussianComplexSplit draws (g' + i g'')/sqrt(2); its "real
/// scalar law" (used by the phase-space walk and the cumulant machinery) is
/// the standard real Gaussian.
class CoefficientDist {
public:
    using Sampler = std::function<double(Engine&)>;

    static CoefficientDist rademacher();
    static CoefficientDist gaussian_real();
    static CoefficientDist gaussian_complex_split();
    static CoefficientDist uniform_symmetric();
    /// `moments[k]` is E xi^k for k = 0..moments.size()-1 (so moments[0] = 1).
    /// The declared order must be at least 2.
    static CoefficientDist custom(std::string name, Sampler sampler, std::vector<double> moments);

    /// Parses "rademacher", "gaussian", "gaussian-complex", "uniform".
    static CoefficientDist parse(std::string_view name);

    DistKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool is_complex() const { return kind_ == DistKind::GaussianComplexSplit; }

    /// One draw of the real scalar law.
    double sample_real(Engine& rng) const;
    /// One coefficient draw (complex for GaussianComplexSplit, real otherwise).
    cplx sample(Engine& rng) const;

    /// Highest k for which E xi^k is known.
    int moment_order() const;
    /// E xi^k of the real scalar law; throws Refusal past moment_order().
    double moment(int k) const;

private:
    CoefficientDist(DistKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    DistKind kind_;
    std::string name_;
    Sampler sampler_;
    std::vector<double> moments_;
};

/// Empirical mean/variance check for a Custom law. `ok` means both are within
/// 4 standard errors of (0, 1).
struct MomentCheck {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    bool ok = false;
};
MomentCheck check_declared_moments(const CoefficientDist& dist, std::size_t samples, std::uint64_t seed);

enum class ModelKind { SymmetricKac, OneSidedKac, CosSin };

struct ModelSpec {
    ModelKind model = ModelKind::SymmetricKac;
    int n = 1;
    double a = 0.5;  ///< CosSin only
    CoefficientDist dist = CoefficientDist::gaussian_complex_split();

    void validate() const;
    /// 2n+1, n+1, or 2n+1 (xi_0 then interleaved xi_j, eta_j).
    std::size_t coefficient_count() const;
    double normalization() const;
};

ModelKind parse_model(std::string_view name);
std::string model_name(ModelKind kind);

struct PolySample {
    ModelSpec spec;
    std::vector<cplx> coeffs;
    std::uint64_t seed = 0;
};

/// Exponential-basis view of a sample: P(x) = scale * sum_k c[k] e^{i (j_min + k) x}.
struct FourierForm {
    int j_min = 0;
    std::vector<cplx> c;
    double scale = 1.0;

    int j_max() const { return j_min + static_cast<int>(c.size()) - 1; }
};
FourierForm fourier_form(const PolySample& poly);

/// Deterministic in (spec, seed). Throws Refusal if a Custom sampler returns
/// a non-finite value.
PolySample sample_polynomial(const ModelSpec& spec, std::uint64_t seed);

/// Builds a sample from explicit coefficients (validated for length).
PolySample make_polynomial(const ModelSpec& spec, std::vector<cplx> coeffs, std::uint64_t seed = 0);

enum class Scaling {
    Natural,   ///< P^{(k)}(x)
    Rescaled,  ///< d^k/ds^k P(s/n) = n^{-k} P^{(k)}(s/n)
};

/// P^{(order)}(x), order in {0, 1, 2}. With Scaling::Rescaled the argument is
/// s and the result is the k-th derivative of s -> P(s/n).
cplx evaluate(const PolySample& poly, double x, int order, Scaling scaling = Scaling::Natural);

/// P^{(order)}(x_alpha) at x_alpha = 2*pi*alpha/N, alpha = 1..N (element
/// alpha-1), via one length-N transform. Requires N >= 2n+1.
std::vector<cplx> evaluate_mesh(const PolySample& poly, std::size_t N, int order);

/// Horner evaluation of P, P', P'' at one point. Cheaper than evaluate() when
/// many points are needed, e.g. inside a line search.
class FastEvaluator {
public:
    explicit FastEvaluator(const PolySample& poly);

    cplx value(double x) const;
    /// {P, P', P''} at x.
    std::array<cplx, 3> jet(double x) const;

private:
    FourierForm form_;
    std::vector<cplx> d1_;
    std::vector<cplx> d2_;
};

nlohmann::json to_json(const PolySample& poly);
/// The "dist" key selects the law by name; unknown or custom names fall back
/// to `fallback_dist`.
PolySample poly_from_json(const nlohmann::json& j,
                          const CoefficientDist& fallback_dist = CoefficientDist::gaussian_complex_split());

}  // namespace minmod
