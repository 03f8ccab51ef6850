// SPDX-License-Identifier: Apache-2.0
//
// Random walk in phase space.
//
// For a tuple t = (t_1..t_m) and step index j,
//   a_j = (sin(j t_r / n))_r,  b_j = (cos(j t_r / n))_r,
//   w_j = (a_j, (j/n) b_j, b_j, -(j/n) a_j) in R^{4m},
// and S_n(t) = sum_{j=-n}^{n} xi_j w_j collects Im P, Im P', Re P, Re P' at
// the m angles t_r / n (derivatives in the rescaled variable).
//
// The complex-coefficient variant uses two independent coefficients per step
// with u_j = (a_j, (j/n) b_j) and v_j = (b_j, -(j/n) a_j) in R^{2m}.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "minmod/arithmetic.hpp"
#include "minmod/polymodel.hpp"

namespace minmod {

enum class WalkVariant { Full4m, Complex2m };

/// Inclusive integer interval [lo, hi].
struct IndexRange {
    int lo = 0;
    int hi = 0;
    std::size_t size() const { return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0; }
};

/// [-n, n] for Full4m, [1, n] for Complex2m.
IndexRange default_range(const PhaseTuple& tuple, WalkVariant variant);

Eigen::VectorXd step_vector(const PhaseTuple& tuple, int j);
/// {u_j, v_j}
std::pair<Eigen::VectorXd, Eigen::VectorXd> complex_step_vectors(const PhaseTuple& tuple, int j);

struct StepMatrix {
    PhaseTuple tuple;
    IndexRange range;
    WalkVariant variant = WalkVariant::Full4m;
    /// One row per independent coefficient: w_j for Full4m, or u_j, v_j
    /// (interleaved) for Complex2m.
    Eigen::MatrixXd rows;

    Eigen::Index dim() const { return rows.cols(); }
};

/// Refuses a range outside [-n, n].
StepMatrix step_matrix(const PhaseTuple& tuple, IndexRange range, WalkVariant variant = WalkVariant::Full4m);

struct Covariance {
    Eigen::MatrixXd v;   ///< (1/rows) W^T W
    double sigma_min = 0.0;  ///< smallest eigenvalue of v
};

/// Refuses fewer rows than the walk dimension.
Covariance covariance(const PhaseTuple& tuple, IndexRange range, WalkVariant variant = WalkVariant::Full4m);
Covariance covariance(const StepMatrix& steps);

struct WalkSample {
    Eigen::VectorXd value;  ///< W^T xi / sqrt(rows)
    std::uint64_t seed = 0;
    DistKind dist = DistKind::Rademacher;
};

WalkSample sample_walk(const PhaseTuple& tuple, const CoefficientDist& dist, std::uint64_t seed,
                       WalkVariant variant = WalkVariant::Full4m);
WalkSample sample_walk(const StepMatrix& steps, const CoefficientDist& dist, std::uint64_t seed);

/// Draws normalized walk values in batches; each batch uses its own split seed
/// so results do not depend on the thread count.
class WalkSampler {
public:
    WalkSampler(StepMatrix steps, CoefficientDist dist);

    const StepMatrix& steps() const { return steps_; }
    /// `count` samples as the columns of the returned matrix.
    Eigen::MatrixXd draw(std::size_t count, Engine& rng) const;

private:
    StepMatrix steps_;
    CoefficientDist dist_;
    Eigen::MatrixXd wt_;  ///< W^T / sqrt(rows)
};

/// Runs `total` walk draws split into fixed-size batches and hands each batch
/// (as matrix columns) to `visit(batch_index, samples)`. visit may be called
/// concurrently for different batches.
void for_each_walk_batch(const WalkSampler& sampler, std::size_t total, std::uint64_t seed, unsigned threads,
                         const std::function<void(std::size_t, const Eigen::MatrixXd&)>& visit);
constexpr std::size_t kWalkBatch = 4096;

/// Value recorded for ln|phi| when some factor is exactly zero.
constexpr double kLogZeroSentinel = -1e9;

struct CharFnValue {
    double log_modulus = 0.0;
    double stderr = 0.0;     ///< 0 for closed forms
    bool saturated = false;  ///< a factor vanished; log_modulus is the sentinel
    bool exact = true;
};

struct CharFnOptions {
    std::size_t samples = 20000;  ///< Monte Carlo budget for laws without a closed form
    std::uint64_t seed = 1;
    double max_stderr = 1e300;    ///< refuse when the Monte Carlo error exceeds this
};

/// ln |E exp(i <S_n(t), x>)| computed as a sum over steps. Closed forms for
/// Rademacher (ln|cos|), Gaussian (-u^2/2) and uniform (ln|sinc|); other laws
/// use a Monte Carlo estimate of each factor.
CharFnValue charfn_log_modulus(const StepMatrix& steps, const Eigen::VectorXd& x, const CoefficientDist& dist,
                               const CharFnOptions& opts = {});
CharFnValue charfn_log_modulus(const PhaseTuple& tuple, const Eigen::VectorXd& x, const CoefficientDist& dist,
                               const CharFnOptions& opts = {});

struct XiNorm {
    double value = 0.0;
    double stderr = 0.0;
};

/// (E || w (xi - xi') ||^2)^{1/2}; exact for Rademacher.
XiNorm xi_norm(double w, const CoefficientDist& dist, std::size_t samples = 100000, std::uint64_t seed = 1);

enum class PsiVariant {
    Psi,       ///< sum_r y_r cos(j t_r/n) - y'_r (j/n) sin(j t_r/n)
    PsiPrime,  ///< sum_r y_r sin(j t_r/n) + y'_r (j/n) cos(j t_r/n)
};

double psi_value(const PhaseTuple& tuple, std::span<const double> y, std::span<const double> y_prime, long long j,
                 PsiVariant variant = PsiVariant::Psi);

struct PsiSequence {
    PhaseTuple tuple;
    std::vector<double> y;
    std::vector<double> y_prime;
    PsiVariant variant = PsiVariant::Psi;
    long long j_lo = 0;
    std::vector<double> values;

    double at(long long j) const { return values.at(static_cast<std::size_t>(j - j_lo)); }
};

PsiSequence psi_sequence(const PhaseTuple& tuple, std::vector<double> y, std::vector<double> y_prime, long long j_lo,
                         long long j_hi, PsiVariant variant = PsiVariant::Psi);

/// (Delta^k_q g)(j) = sum_{i=0}^{k} C(k,i) (-1)^i g(j + i q). The output is
/// kq shorter than the input and aligned with its first index.
template <class T>
std::vector<T> finite_difference(std::span<const T> seq, int k, int q);

/// (D f)(j) = sum_{a=0}^{2} C(2,a) (-1)^a e^{-i a L t0 / n} f(j + a L); output
/// is 2L shorter than the input.
std::vector<std::complex<double>> twisted_difference(std::span<const std::complex<double>> seq, double t0, int l,
                                                     int n);

/// e_n(theta) = exp(i theta / n)
inline std::complex<double> e_n(double theta, int n) { return std::polar(1.0, theta / n); }

struct ShiftBoundSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the shift inequality for psi: lhs is the product of
/// vanishing factors at t_1, rhs the sum of || psi || over the shifted index
/// set. Refuses when the index window leaves [0, n].
ShiftBoundSides shift_bound_sides(const PhaseTuple& tuple, std::span<const double> y, std::span<const double> y_prime,
                                  long long j, long long l, long long l_prime, long long ell, long long q0, int k);

/// Differencing order floor(4 m K* / kappa) + 1.
int default_difference_order(std::size_t m, double k_star, double kappa);

struct SmallBall {
    double p_hat = 0.0;
    double stderr = 0.0;
};

/// Empirical P(|S_n(t)/sqrt(2n+1) - center| <= delta). Refuses < 10^4 samples.
SmallBall small_ball_estimate(const PhaseTuple& tuple, const CoefficientDist& dist, const Eigen::VectorXd& center,
                              double delta, std::size_t samples, std::uint64_t seed, unsigned threads = 0);

/// Same estimate for several radii from one set of draws.
std::vector<SmallBall> small_ball_profile(const PhaseTuple& tuple, const CoefficientDist& dist,
                                          const Eigen::VectorXd& center, std::span<const double> deltas,
                                          std::size_t samples, std::uint64_t seed, unsigned threads = 0);

enum class PolyQuantity { Value, Derivative };

/// P(|Pt(t)| <= delta) or P(|Pt'(t)| <= delta) for the rescaled symmetric
/// polynomial Pt(s) = P(s/n) with real coefficients, read off the walk.
SmallBall polynomial_small_ball(double t, int n, const CoefficientDist& dist, PolyQuantity which, double delta,
                                std::size_t samples, std::uint64_t seed, unsigned threads = 0);

}  // namespace minmod
