#pragma once

// Number tower: exact rationals (GMP) for coefficient recursions,
// dynamic-precision binary floats (MPFR) for optimization and
// root-finding, plain double only at the output boundary.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/complex_adaptor.hpp>
#include <boost/math/constants/constants.hpp>

#include <complex>
#include <stdexcept>
#include <string>

namespace vpt {

namespace mp = boost::multiprecision;

using Integer  = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using Real     = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Complex  = mp::number<mp::complex_adaptor<mp::mpfr_float_backend<0>>, mp::et_off>;

inline constexpr unsigned kDefaultPrecisionBits = 200;

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(bits * 0.30102999566398119521) + 3;
}

inline void set_precision_bits(unsigned bits) {
    Real::default_precision(bits_to_digits10(bits));
}

inline unsigned current_precision_digits() { return Real::default_precision(); }

// Scoped working precision. Values created inside the scope carry the
// scope's precision; keep long-lived state exact (rational) instead.
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned bits)
        : saved_digits_(Real::default_precision()) {
        Real::default_precision(bits_to_digits10(bits));
    }
    ~PrecisionGuard() { Real::default_precision(saved_digits_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_digits_;
};

inline Real pi_real() { return boost::math::constants::pi<Real>(); }

inline Real to_real(const Rational& r) { return Real(r); }

inline Complex to_complex(const Rational& r) { return Complex(Real(r), Real(0)); }
inline Complex to_complex(const Real& x) { return Complex(x, Real(0)); }

inline std::complex<double> to_std_complex(const Complex& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Principal-branch power with arbitrary real exponent.
inline Complex cpow(const Complex& z, const Real& a) {
    if (z == Complex(0)) {
        if (a > 0) return Complex(0);
        throw std::domain_error("cpow: zero base with non-positive exponent");
    }
    return exp(to_complex(a) * log(z));
}

inline Complex cpow_int(Complex z, long n) {
    if (n < 0) return Complex(Real(1)) / cpow_int(z, -n);
    Complex r(Real(1));
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline long to_long(const Rational& q) {
    if (!is_integer(q)) throw std::invalid_argument("to_long: not an integer");
    return static_cast<long>(numerator(q));
}

// "n/d" or "n"; exact round trip for the JSON interchange format.
Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& r);

}  // namespace vpt
