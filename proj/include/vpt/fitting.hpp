#pragma once

// Small dense solvers and fit helpers shared by the model suites.

#include "vpt/numeric.hpp"

#include <stdexcept>
#include <vector>

namespace vpt {

// Gaussian elimination with partial pivoting (exact for Rational).
template <class T>
std::vector<T> solve_linear(std::vector<std::vector<T>> A, std::vector<T> rhs) {
    const size_t n = A.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (abs(A[r][col]) > abs(A[piv][col])) piv = r;
        if (A[piv][col] == T(0)) throw std::runtime_error("solve_linear: singular system");
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        for (size_t r = col + 1; r < n; ++r) {
            T f = A[r][col] / A[col][col];
            if (f == T(0)) continue;
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<T> x(n, T(0));
    for (size_t i = n; i-- > 0;) {
        T acc = rhs[i];
        for (size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

// Least squares min ||X b - y|| via normal equations.
template <class T>
std::vector<T> least_squares(const std::vector<std::vector<T>>& X, const std::vector<T>& y) {
    const size_t rows = X.size();
    if (rows == 0 || y.size() != rows) throw std::invalid_argument("least_squares: bad shapes");
    const size_t cols = X[0].size();
    std::vector<std::vector<T>> N(cols, std::vector<T>(cols, T(0)));
    std::vector<T> r(cols, T(0));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t a = 0; a < cols; ++a) {
            for (size_t b = a; b < cols; ++b) N[a][b] += X[i][a] * X[i][b];
            r[a] += X[i][a] * y[i];
        }
    }
    for (size_t a = 0; a < cols; ++a)
        for (size_t b = 0; b < a; ++b) N[a][b] = N[b][a];
    return solve_linear(std::move(N), std::move(r));
}

// Ordinary linear regression y = a + b x.
struct LineFit {
    Real intercept, slope;
};
LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y);

// Nonlinear fit y(L) = A + B L^{-kappa} by Gauss-Newton, initialized at
// A = last value, kappa = 1.
struct PowerLawFit {
    Real A, B, kappa;
    bool converged = false;
};
PowerLawFit fit_power_law(const std::vector<Real>& L, const std::vector<Real>& y);

// Exponential-decay fit y(L) = exp(c0 + c1 L) on log scale.
struct ExpFit {
    Real c0, c1;
};
ExpFit fit_exponential(const std::vector<Real>& L, const std::vector<Real>& y);

}  // namespace vpt
