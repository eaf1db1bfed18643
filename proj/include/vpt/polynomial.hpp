#pragma once

// Dense univariate polynomials with numeric coefficients, ascending order.

#include "vpt/numeric.hpp"

#include <vector>

namespace vpt {

template <class T>
struct Poly {
    std::vector<T> c;  // c[k] multiplies x^k

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}

    bool empty() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    template <class U>
    U eval(const U& x) const {
        U acc(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + U(*it);
        return acc;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * T(static_cast<long>(k));
        return d;
    }

    void trim(const T& zero = T(0)) {
        while (!c.empty() && c.back() == zero) c.pop_back();
    }
};

inline Poly<Real> to_real_poly(const Poly<Rational>& p) {
    Poly<Real> q;
    q.c.reserve(p.c.size());
    for (const auto& a : p.c) q.c.push_back(to_real(a));
    return q;
}

inline Poly<Complex> to_complex_poly(const Poly<Rational>& p) {
    Poly<Complex> q;
    q.c.reserve(p.c.size());
    for (const auto& a : p.c) q.c.push_back(to_complex(a));
    return q;
}

inline Poly<Complex> to_complex_poly(const Poly<Real>& p) {
    Poly<Complex> q;
    q.c.reserve(p.c.size());
    for (const auto& a : p.c) q.c.push_back(to_complex(a));
    return q;
}

}  // namespace vpt
