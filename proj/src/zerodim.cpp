#include "vpt/zerodim.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <functional>
#include <stdexcept>

namespace vpt {
namespace zerodim {

WeakSeries weak_coeffs(int L) {
    if (L < 0) throw std::invalid_argument("weak_coeffs: L >= 0");
    // closed form a_l = (-1)^l (4l)! / (16^l (2l)! l!)
    std::vector<Rational> closed(static_cast<size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) {
        Integer num(1);
        for (long k = 2 * l + 1; k <= 4 * l; ++k) num *= k;  // (4l)!/(2l)!
        Integer den(1);
        for (long k = 2; k <= l; ++k) den *= k;
        Integer sixteen(16);
        for (int k = 0; k < l; ++k) den *= sixteen;
        Rational a = Rational(num) / Rational(den);
        closed[static_cast<size_t>(l)] = (l % 2 == 0) ? a : -a;
    }
    // recursion a_{l+1} = -(16 l(l+1)+3)/(4(l+1)) a_l
    Rational a(1);
    for (int l = 0; l <= L; ++l) {
        if (a != closed[static_cast<size_t>(l)])
            throw std::logic_error("zerodim weak coefficients: recursion/closed-form mismatch");
        a *= -Rational(16 * static_cast<long>(l) * (l + 1) + 3) / Rational(4 * (static_cast<long>(l) + 1));
    }
    return WeakSeries(std::move(closed), "g", "Z(g), V-measure exp(-x^2/2 - g x^4/4)");
}

std::vector<Real> strong_coeffs(int L) {
    if (L < 0) throw std::invalid_argument("strong_coeffs: L >= 0");
    // rational parts r_l with b_l = r_l * b_parity, dual-generated
    std::vector<Rational> ratio(static_cast<size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) {
        int par = l % 2;
        // Gamma(l/2+1/4)/Gamma(par/2+1/4) via the functional equation
        Rational g(1);
        for (int m = par; m + 2 <= l; m += 2) g *= Rational(2 * m + 1, 4);  // z at (m/2+1/4)
        Integer fact(1);
        for (long k = 2; k <= l; ++k) fact *= k;
        Rational r = g / Rational(fact);
        ratio[static_cast<size_t>(l)] = (l % 2 == 0) ? r : -r;
    }
    // recursion b_{l+2} = (2l+1)/(4(l+1)(l+2)) b_l on the rational parts
    for (int l = 0; l + 2 <= L; ++l) {
        Rational expect = ratio[static_cast<size_t>(l)] * Rational(2 * static_cast<long>(l) + 1) /
                          Rational(4 * (static_cast<long>(l) + 1) * (l + 2));
        if (-expect != ratio[static_cast<size_t>(l) + 2] && expect != ratio[static_cast<size_t>(l) + 2])
            throw std::logic_error("zerodim strong coefficients: recursion mismatch");
        // sign alternates with l; the Gamma form carries (-1)^l while the
        // recursion preserves parity sign, so compare magnitudes above.
    }
    Real sp = sqrt(pi_real());
    Real b0 = boost::math::tgamma(Real(1) / 4) / (2 * sp);
    Real b1 = -boost::math::tgamma(Real(3) / 4) / (2 * sp);
    std::vector<Real> out(static_cast<size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) {
        Real base = (l % 2 == 0) ? b0 : -b1;  // ratio carries the (-1)^l
        out[static_cast<size_t>(l)] = to_real(ratio[static_cast<size_t>(l)]) * base;
    }
    // direct Gamma evaluation as an independent check of the first few
    for (int l = 0; l <= std::min(L, 8); ++l) {
        Real direct = boost::math::tgamma(Real(2 * l + 1) / 4) /
                      (2 * boost::math::tgamma(Real(l + 1)) * sp);
        if (l % 2 != 0) direct = -direct;
        if (abs(direct - out[static_cast<size_t>(l)]) >
            Real("1e-30") * abs(direct))
            throw std::logic_error("zerodim strong coefficients: Gamma cross-check failed");
    }
    return out;
}

Complex zeta_series(const Complex& x) {
    // needs extra precision: zeta(x) ~ exp(x^2/4) while terms peak larger
    Real ax = abs(x);
    unsigned extra = static_cast<unsigned>(static_cast<double>(ax * ax) * 0.37) + 64;
    PrecisionGuard guard(static_cast<unsigned>(Real::default_precision() * 3.33) + extra);
    Complex xx(x.real(), x.imag());
    Real sp = sqrt(pi_real());
    Real b0 = boost::math::tgamma(Real(1) / 4) / (2 * sp);
    Real b1 = -boost::math::tgamma(Real(3) / 4) / (2 * sp);
    Complex acc(0);
    Complex xpow(Real(1));
    Real beven = b0, bodd = b1;
    Real tail_tol = pow(Real(2), -static_cast<long>(Real::default_precision() * 3.2));
    Real peak(0);
    for (int l = 0; l < 100000; ++l) {
        Real b = (l % 2 == 0) ? beven : bodd;
        Complex term = b * xpow;
        acc += term;
        Real m = abs(term);
        if (m > peak) peak = m;
        if (l > 4 && m < tail_tol * peak && m < tail_tol * (abs(acc) + Real(1))) break;
        if (l % 2 == 0)
            beven *= Real(2 * l + 1) / Real(4 * (l + 1) * (l + 2));
        else
            bodd *= Real(2 * l + 1) / Real(4 * (l + 1) * (l + 2));
        xpow *= xx;
    }
    return Complex(acc.real(), acc.imag());
}

namespace {

Real quadrature_Z(const Real& g) {
    boost::math::quadrature::exp_sinh<Real> integrator;
    auto f = [&](const Real& x) { return exp(-x * x / 2 - g * x * x * x * x / 4); };
    Real tol = pow(Real(10), -static_cast<long>(Real::default_precision()) + 6);
    Real err;
    Real Q = integrator.integrate(f, tol, &err);
    return 2 * Q / sqrt(2 * pi_real());
}

Real bessel_Z(const Real& g) {
    Real w = 1 / (8 * g);
    return exp(w) * boost::math::cyl_bessel_k(Real(1) / 4, w) / sqrt(4 * pi_real() * g);
}

}  // namespace

ExactValue exact(const Complex& g) {
    ExactValue out;
    if (g == Complex(0)) {
        out.value = Complex(Real(1));
        out.limit_flag = true;
        out.route = "limit";
        return out;
    }
    const bool real_g = (g.imag() == 0);
    if (real_g && g.real() > 0) {
        Real zb = bessel_Z(g.real());
        Real zq = quadrature_Z(g.real());
        if (abs(zb - zq) > Real("1e-12") * abs(zb))
            throw std::runtime_error("zerodim exact: quadrature/Bessel disagreement");
        out.value = Complex(zb);
        out.route = "quadrature+bessel";
        return out;
    }
    Real mag = abs(g);
    if (real_g && g.real() < 0 && mag < Real("0.3")) {
        // rotated-argument Bessel route on the upper rim:
        // Z(-|g|+i0) = e^{-w} [ K_{1/4}(w)/sqrt(2) + pi I_{1/4}(w) ] / sqrt(4 pi |g|)
        //            - i e^{-w} K_{1/4}(w) / (sqrt(2) sqrt(4 pi |g|)),  w = 1/(8|g|)
        Real w = 1 / (8 * mag);
        Real K = boost::math::cyl_bessel_k(Real(1) / 4, w);
        Real I = boost::math::cyl_bessel_i(Real(1) / 4, w);
        Real denom = sqrt(4 * pi_real() * mag);
        Real s2 = sqrt(Real(2));
        Real re = exp(-w) * (K / s2 + pi_real() * I) / denom;
        Real im = -exp(-w) * K / (s2 * denom);
        out.value = Complex(re, im);
        out.route = "bessel-rotated";
        return out;
    }
    if (mag < Real("0.3"))
        throw std::domain_error("zerodim exact: continuation only on the real axis for |g| < 0.3");
    if (real_g && g.real() < 0) {
        // upper rim g = |g| e^{i pi}: Z = sum_l b_l |g|^{-(2l+1)/4} e^{-i pi (2l+1)/4};
        // the phases reduce to x = -i |g|^{-1/2} and a leading e^{-i pi/4}
        Complex x = Complex(Real(0), Real(-1)) / sqrt(mag);
        Real quarter = pow(mag, Real("-0.25"));
        Real s2 = sqrt(Real(2));
        Complex lead = Complex(quarter / s2, -quarter / s2);  // |g|^{-1/4} e^{-i pi/4}
        out.value = lead * zeta_series(x);
        out.route = "strong-series";
        return out;
    }
    // off-axis complex g: principal-branch continuation
    Complex x = cpow(g, Real("-0.5"));
    out.value = cpow(g, Real("-0.25")) * zeta_series(x);
    out.route = "strong-series";
    return out;
}

namespace {

// Cohen-Villegas-Zagier acceleration for alternating sums sum (-1)^k a_k.
Real cvz_alternating(const std::function<Real(int)>& a, int n) {
    Real d = pow(Real(3) + 2 * sqrt(Real(2)), n);
    d = (d + 1 / d) / 2;
    Real b(-1), c = -d, s(0);
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b *= Real(2 * (k + n)) * (k - n) / Real((2 * k + 1) * (k + 1));
    }
    return s / d;
}

}  // namespace

Real dispersion_coefficient(int l, int j_terms) {
    // a_l = (-1)^l/(2 pi^{3/2}) sum_j (-2)^j Gamma(j/2+1/4) Gamma(l+j/2+1/4) / j!
    unsigned extra = static_cast<unsigned>(j_terms * 2.6) + 64;
    PrecisionGuard guard(static_cast<unsigned>(Real::default_precision() * 3.33) + extra);
    auto term = [&](int j) {
        Real t = pow(Real(2), j) * boost::math::tgamma(Real(2 * j + 1) / 4) *
                 boost::math::tgamma(Real(l) + Real(2 * j + 1) / 4) /
                 boost::math::tgamma(Real(j + 1));
        return t;
    };
    Real s = cvz_alternating(term, j_terms);
    Real val = s / (2 * pi_real() * sqrt(pi_real()));
    if (l % 2 != 0) val = -val;
    return Real(val);
}

Real dispersion_identity_check(int L_terms, int j_terms) {
    WeakSeries w = weak_coeffs(L_terms);
    Real worst(0);
    for (int l = 0; l <= L_terms; ++l) {
        Real ref = w.num(static_cast<size_t>(l));
        Real got = dispersion_coefficient(l, j_terms);
        Real dev = abs(got - ref) / abs(ref);
        if (dev > worst) worst = dev;
    }
    return worst;
}

Real ode_residual(const std::function<Real(const Real&)>& Z, const Real& g) {
    // fourth-order central differences; h tied to the working precision
    long digits = static_cast<long>(Real::default_precision());
    Real h = pow(Real(10), -(digits / 3)) * (abs(g) + Real(1));
    Real zm2 = Z(g - 2 * h), zm1 = Z(g - h), z0 = Z(g), zp1 = Z(g + h), zp2 = Z(g + 2 * h);
    Real d1 = (zm2 - 8 * zm1 + 8 * zp1 - zp2) / (12 * h);
    Real d2 = (-zm2 + 16 * zm1 - 30 * z0 + 16 * zp1 - zp2) / (12 * h * h);
    return 16 * g * g * d2 + 4 * (1 + 8 * g) * d1 + 3 * z0;
}

}  // namespace zerodim
}  // namespace vpt
