// SPDX-License-Identifier: Apache-2.0
//
// Sparse real polynomials in up to 8 variables with exponents below 16.
#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace minmod {

/// Exponent vector packed 4 bits per variable, variable 0 in the low bits.
using MonoKey = std::uint32_t;

constexpr int kMaxVars = 8;
constexpr int kMaxExponent = 15;

MonoKey pack_exponents(std::span<const int> e);
std::vector<int> unpack_exponents(MonoKey key, int dims);
inline int exponent_of(MonoKey key, int var) { return static_cast<int>((key >> (4 * var)) & 0xFU); }
int total_degree(MonoKey key, int dims);

/// All exponent vectors of total degree `degree` in `dims` variables.
std::vector<MonoKey> monomials_of_degree(int dims, int degree);

class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(int dims) : dims_(dims) {}
    static MultiPoly constant(int dims, double c);
    static MultiPoly monomial(int dims, MonoKey key, double c = 1.0);

    int dims() const { return dims_; }
    const std::unordered_map<MonoKey, double>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int degree() const;
    double coeff(MonoKey key) const;

    void add_term(MonoKey key, double c);
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator*=(double s);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);

    MultiPoly derivative(int var) const;
    /// Multiply by the linear form sum_k row[k] x_k.
    MultiPoly times_linear(std::span<const double> row) const;

    double operator()(std::span<const double> x) const;

    /// Drop terms with |c| <= tol * max |c|.
    void prune(double tol = 0.0);

private:
    int dims_ = 0;
    std::unordered_map<MonoKey, double> terms_;
};

/// Dense coefficient tensor for fast nested evaluation on tensor grids.
/// Index = sum_i e_i (D+1)^i with variable 0 least significant.
struct DenseTensor {
    int dims = 0;
    int degree = 0;  ///< per-variable exponent bound D
    std::vector<double> c;

    static DenseTensor from(const MultiPoly& p);
    /// Substitute x_0 = v; the result has dims - 1 variables.
    DenseTensor contract_first(double v) const;
    /// Value of a 1-variable tensor (Horner).
    double eval1(double v) const;
};

}  // namespace minmod
