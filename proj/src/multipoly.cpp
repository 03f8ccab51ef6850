// SPDX-License-Identifier: Apache-2.0
#include "minmod/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minmod {

MonoKey pack_exponents(std::span<const int> e)
{
    if (e.size() > static_cast<std::size_t>(kMaxVars))
        throw std::invalid_argument("too many variables");
    MonoKey key = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 || e[i] > kMaxExponent)
            throw std::invalid_argument("exponent out of range");
        key |= static_cast<MonoKey>(e[i]) << (4 * i);
    }
    return key;
}

std::vector<int> unpack_exponents(MonoKey key, int dims)
{
    std::vector<int> e(static_cast<std::size_t>(dims));
    for (int i = 0; i < dims; ++i)
        e[static_cast<std::size_t>(i)] = exponent_of(key, i);
    return e;
}

int total_degree(MonoKey key, int dims)
{
    int s = 0;
    for (int i = 0; i < dims; ++i)
        s += exponent_of(key, i);
    return s;
}

namespace {

void enumerate(int dims, int var, int left, MonoKey acc, std::vector<MonoKey>& out)
{
    if (var == dims - 1) {
        out.push_back(acc | (static_cast<MonoKey>(left) << (4 * var)));
        return;
    }
    for (int e = left; e >= 0; --e)
        enumerate(dims, var + 1, left - e, acc | (static_cast<MonoKey>(e) << (4 * var)), out);
}

MonoKey add_keys(MonoKey a, MonoKey b, int dims)
{
    for (int i = 0; i < dims; ++i)
        if (exponent_of(a, i) + exponent_of(b, i) > kMaxExponent)
            throw std::overflow_error("exponent overflow in polynomial product");
    return a + b;
}

}  // namespace

std::vector<MonoKey> monomials_of_degree(int dims, int degree)
{
    std::vector<MonoKey> out;
    if (dims < 1 || degree > kMaxExponent)
        return out;
    enumerate(dims, 0, degree, 0, out);
    return out;
}

MultiPoly MultiPoly::constant(int dims, double c)
{
    MultiPoly p(dims);
    p.add_term(0, c);
    return p;
}

MultiPoly MultiPoly::monomial(int dims, MonoKey key, double c)
{
    MultiPoly p(dims);
    p.add_term(key, c);
    return p;
}

int MultiPoly::degree() const
{
    int d = -1;
    for (const auto& [k, c] : terms_)
        d = std::max(d, total_degree(k, dims_));
    return d;
}

double MultiPoly::coeff(MonoKey key) const
{
    auto it = terms_.find(key);
    return it == terms_.end() ? 0.0 : it->second;
}

void MultiPoly::add_term(MonoKey key, double c)
{
    if (c == 0.0)
        return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0)
            terms_.erase(it);
    }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o)
{
    if (dims_ == 0)
        dims_ = o.dims_;
    for (const auto& [k, c] : o.terms_)
        add_term(k, c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_)
        c *= s;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b)
{
    MultiPoly out(std::max(a.dims_, b.dims_));
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_)
            out.add_term(add_keys(ka, kb, out.dims_), ca * cb);
    return out;
}

MultiPoly MultiPoly::derivative(int var) const
{
    MultiPoly out(dims_);
    const MonoKey unit = MonoKey{1} << (4 * var);
    for (const auto& [k, c] : terms_) {
        const int e = exponent_of(k, var);
        if (e > 0)
            out.add_term(k - unit, c * e);
    }
    return out;
}

MultiPoly MultiPoly::times_linear(std::span<const double> row) const
{
    MultiPoly out(dims_);
    for (int v = 0; v < dims_; ++v) {
        const double r = row[static_cast<std::size_t>(v)];
        if (r == 0.0)
            continue;
        const MonoKey unit = MonoKey{1} << (4 * v);
        for (const auto& [k, c] : terms_)
            out.add_term(add_keys(k, unit, dims_), c * r);
    }
    return out;
}

double MultiPoly::operator()(std::span<const double> x) const
{
    double sum = 0.0;
    for (const auto& [k, c] : terms_) {
        double t = c;
        for (int i = 0; i < dims_; ++i) {
            const int e = exponent_of(k, i);
            for (int p = 0; p < e; ++p)
                t *= x[static_cast<std::size_t>(i)];
        }
        sum += t;
    }
    return sum;
}

void MultiPoly::prune(double tol)
{
    double big = 0.0;
    for (const auto& [k, c] : terms_)
        big = std::max(big, std::abs(c));
    const double cut = tol * big;
    std::erase_if(terms_, [cut](const auto& kv) { return std::abs(kv.second) <= cut; });
}

DenseTensor DenseTensor::from(const MultiPoly& p)
{
    DenseTensor t;
    t.dims = p.dims();
    for (const auto& [k, c] : p.terms())
        for (int i = 0; i < t.dims; ++i)
            t.degree = std::max(t.degree, exponent_of(k, i));
    const std::size_t base = static_cast<std::size_t>(t.degree) + 1;
    std::size_t size = 1;
    for (int i = 0; i < t.dims; ++i)
        size *= base;
    t.c.assign(size, 0.0);
    for (const auto& [k, c] : p.terms()) {
        std::size_t idx = 0, mul = 1;
        for (int i = 0; i < t.dims; ++i, mul *= base)
            idx += static_cast<std::size_t>(exponent_of(k, i)) * mul;
        t.c[idx] += c;
    }
    return t;
}

DenseTensor DenseTensor::contract_first(double v) const
{
    DenseTensor out;
    out.dims = dims - 1;
    out.degree = degree;
    const std::size_t base = static_cast<std::size_t>(degree) + 1;
    out.c.assign(c.size() / base, 0.0);
    for (std::size_t r = 0; r < out.c.size(); ++r) {
        const double* p = c.data() + r * base;
        double acc = 0.0;
        for (std::size_t e = base; e-- > 0;)
            acc = acc * v + p[e];
        out.c[r] = acc;
    }
    return out;
}

double DenseTensor::eval1(double v) const
{
    double acc = 0.0;
    for (std::size_t e = c.size(); e-- > 0;)
        acc = acc * v + c[e];
    return acc;
}

}  // namespace minmod
