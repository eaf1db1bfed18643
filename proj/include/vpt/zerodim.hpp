#pragma once

// Exactly solvable zero-dimensional partition function
//   Z(g) = (1/sqrt(2 pi)) Int exp(-x^2/2 - g x^4/4) dx
//        = exp(1/8g) K_{1/4}(1/8g) / sqrt(4 pi g),   g > 0,
// with weak coefficients a_l = (-1)^l Gamma(2l+1/2)/(l! sqrt(pi)) and
// strong coefficients b_l = (-1)^l Gamma(l/2+1/4)/(2 l! sqrt(pi)).
// Ground truth for the resummation engine on both sides of the cut.

#include "vpt/numeric.hpp"
#include "vpt/series.hpp"

#include <vector>

namespace vpt {
namespace zerodim {

inline GrowthParams growth() { return GrowthParams(Rational(-1), Rational(4)); }

// Exact rationals, generated from the closed form and independently from
// the recursion a_{l+1} = -(16 l (l+1) + 3)/(4(l+1)) a_l; both must agree.
WeakSeries weak_coeffs(int L);

// Strong-coupling coefficients at the working precision; the rational
// ratio parts are dual-generated (Gamma form vs. three-term recursion).
std::vector<Real> strong_coeffs(int L);

struct ExactValue {
    Complex value;
    bool limit_flag = false;  // set when g = 0 returned the limit
    std::string route;        // "bessel", "quadrature+bessel", "strong-series"
};

// Exact Z. Real g > 0: quadrature and Bessel closed form cross-checked to
// 1e-12. Real g < 0: boundary value on the upper rim of the cut
// (strong-series continuation for |g| >= 0.3, rotated Bessel route below).
// Complex g: strong-series continuation, |g| >= 0.3 only.
ExactValue exact(const Complex& g);

// Entire function zeta(x) = sum b_l x^l with Z(g) = g^{-1/4} zeta(g^{-1/2}).
Complex zeta_series(const Complex& x);

// Max relative deviation of the dispersion-relation coefficients
// a_l = (-1)^l/(2 pi^{3/2}) sum_j 2^j (-1)^j Gamma(j/2+1/4) Gamma(l+j/2+1/4)/j!
// from weak_coeffs, for l <= L_terms. The alternating j-sum is evaluated
// with the Cohen-Villegas-Zagier acceleration (it diverges termwise for
// l >= 2 but is Abel summable).
Real dispersion_identity_check(int L_terms, int j_terms);

// Partial accelerated sum for a single l (diagnostics / tests).
Real dispersion_coefficient(int l, int j_terms);

// Residual of 16 g^2 Z'' + 4(1+8g) Z' + 3 Z for a callable Z(g), by
// high-order central differences at the working precision.
Real ode_residual(const std::function<Real(const Real&)>& Z, const Real& g);

}  // namespace zerodim
}  // namespace vpt
