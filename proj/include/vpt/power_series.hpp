#pragma once

// Truncated formal power series helpers used by the strong-coupling
// reversion and the order-by-order solvers.

#include "vpt/numeric.hpp"

#include <stdexcept>
#include <vector>

namespace vpt {

// Coefficients of a series truncated after t^(n-1), where n = size().
template <class T>
using Series = std::vector<T>;

template <class T>
Series<T> series_mul(const Series<T>& a, const Series<T>& b) {
    size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("series_mul: length mismatch");
    Series<T> r(n, T(0));
    for (size_t i = 0; i < n; ++i) {
        if (a[i] == T(0)) continue;
        for (size_t j = 0; j + i < n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <class T>
Series<T> series_add(Series<T> a, const Series<T>& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

template <class T>
Series<T> series_scale(Series<T> a, const T& s) {
    for (auto& x : a) x *= s;
    return a;
}

// (1 + v)^alpha for a series with v[0] == 0, via the standard recurrence
// c_n = (1/n) * sum_{k=1}^{n} ((alpha+1) k/n - 1) v_k c_{n-k}.
template <class T, class A>
Series<T> series_one_plus_pow(const Series<T>& v, const A& alpha) {
    size_t n = v.size();
    Series<T> c(n, T(0));
    c[0] = T(1);
    for (size_t m = 1; m < n; ++m) {
        T acc(0);
        for (size_t k = 1; k <= m; ++k) {
            T w = T(alpha + A(1)) * T(static_cast<long>(k)) / T(static_cast<long>(m)) - T(1);
            acc += w * v[k] * c[m - k];
        }
        c[m] = acc;
    }
    return c;
}

// u^alpha for u[0] != 0; principal branch for complex leading coefficient.
inline Series<Complex> series_pow(const Series<Complex>& u, const Real& alpha) {
    if (u.empty() || u[0] == Complex(0))
        throw std::domain_error("series_pow: vanishing leading coefficient");
    size_t n = u.size();
    Series<Complex> v(n, Complex(0));
    for (size_t k = 1; k < n; ++k) v[k] = u[k] / u[0];
    Series<Complex> c = series_one_plus_pow(v, alpha);
    Complex lead = cpow(u[0], alpha);
    for (auto& x : c) x *= lead;
    return c;
}

}  // namespace vpt
