#include "vpt/series.hpp"

#include "vpt/power_series.hpp"
#include "vpt/roots.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

namespace vpt {

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    return Rational(s);
}

std::string format_rational(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

WeakSeries::WeakSeries(std::vector<Rational> coeffs, std::string coupling, std::string note)
    : exact_(true), rat_(std::move(coeffs)), coupling_name_(std::move(coupling)),
      convention_note_(std::move(note)) {
    if (rat_.empty()) throw std::invalid_argument("WeakSeries: needs at least a_0");
}

WeakSeries::WeakSeries(std::vector<Real> coeffs, std::string coupling, std::string note)
    : exact_(false), num_(std::move(coeffs)), coupling_name_(std::move(coupling)),
      convention_note_(std::move(note)) {
    if (num_.empty()) throw std::invalid_argument("WeakSeries: needs at least a_0");
}

const Rational& WeakSeries::rat(size_t l) const {
    if (!exact_) throw std::logic_error("WeakSeries: numeric storage has no exact view");
    return rat_.at(l);
}

Real WeakSeries::num(size_t l) const {
    return exact_ ? to_real(rat_.at(l)) : num_.at(l);
}

const std::vector<Rational>& WeakSeries::rationals() const {
    if (!exact_) throw std::logic_error("WeakSeries: numeric storage has no exact view");
    return rat_;
}

GrowthParams::GrowthParams(Rational p_, Rational q_) : p(std::move(p_)), q(std::move(q_)) {
    if (q <= 0) throw std::invalid_argument("GrowthParams: q must be positive");
}

Rational generalized_binomial(const Rational& x, unsigned k) {
    Rational num(1);
    for (unsigned i = 0; i < k; ++i) num *= x - Rational(static_cast<long>(i));
    Rational den(1);
    for (unsigned i = 2; i <= k; ++i) den *= Rational(static_cast<long>(i));
    return num / den;
}

Real generalized_binomial(const Real& x, unsigned k) {
    Real num(1);
    for (unsigned i = 0; i < k; ++i) num *= x - Real(static_cast<long>(i));
    Real den(1);
    for (unsigned i = 2; i <= k; ++i) den *= Real(static_cast<long>(i));
    return num / den;
}

Rational truncated_binomial(const Rational& r, unsigned k) {
    Rational c = generalized_binomial(r - 1, k);
    return (k % 2 == 0) ? c : -c;
}

Real truncated_binomial(const Real& r, unsigned k) {
    Real c = generalized_binomial(r - Real(1), k);
    return (k % 2 == 0) ? c : -c;
}

Rational truncated_binomial_bruteforce(const Rational& r, unsigned k) {
    Rational acc(0);
    for (unsigned i = 0; i <= k; ++i) {
        Rational term = generalized_binomial(r, i);
        acc += (i % 2 == 0) ? term : -term;
    }
    return acc;
}

namespace {

template <class T, class Fetch>
std::vector<Poly<T>> reexpand_impl(const WeakSeries& s, const GrowthParams& gp, int L,
                                   Fetch fetch) {
    if (L < 0) throw std::invalid_argument("reexpand: negative order");
    if (L > s.order())
        throw std::out_of_range("reexpand: order " + std::to_string(L) +
                                " exceeds available maximum " + std::to_string(s.order()));
    std::vector<Poly<T>> eps(static_cast<size_t>(L) + 1);
    for (int j = 0; j <= L; ++j) {
        Poly<T>& pj = eps[static_cast<size_t>(j)];
        pj.c.assign(static_cast<size_t>(j) + 1, T(0));
        for (int m = 0; m <= j; ++m) {
            int l = j - m;
            T half = fetch.half_exponent(l);  // (p - l q)/2
            T coeff = fetch.a(l) * fetch.binom(half, static_cast<unsigned>(m));
            if (m % 2 != 0) coeff = -coeff;
            pj.c[static_cast<size_t>(m)] = coeff;
        }
    }
    return eps;
}

struct RatFetch {
    const WeakSeries& s;
    const GrowthParams& gp;
    Rational a(int l) const { return s.rat(static_cast<size_t>(l)); }
    Rational half_exponent(int l) const { return (gp.p - Rational(l) * gp.q) / 2; }
    Rational binom(const Rational& x, unsigned k) const { return generalized_binomial(x, k); }
};

struct NumFetch {
    const WeakSeries& s;
    const GrowthParams& gp;
    Real a(int l) const { return s.num(static_cast<size_t>(l)); }
    Real half_exponent(int l) const { return to_real((gp.p - Rational(l) * gp.q) / 2); }
    Real binom(const Real& x, unsigned k) const { return generalized_binomial(x, k); }
};

template <class T, class Fetch>
Poly<T> sigma_poly_impl(const WeakSeries& s, const GrowthParams& gp, int L, Fetch fetch) {
    if (L < 0) throw std::invalid_argument("sigma_polynomial: negative order");
    if (L > s.order())
        throw std::out_of_range("sigma_polynomial: order " + std::to_string(L) +
                                " exceeds available maximum " + std::to_string(s.order()));
    Poly<T> P;
    if (L == 0) return P;  // no stationarity condition at zeroth order
    P.c.assign(static_cast<size_t>(L) + 1, T(0));
    for (int m = 0; m <= L; ++m) {
        int l = L - m;
        T half = fetch.half_exponent(l);
        T weight = T(2) * half + T(2) * T(l) - T(2) * T(L);  // p - lq + 2l - 2L
        T coeff = fetch.a(l) * weight * fetch.binom(half, static_cast<unsigned>(m));
        if (m % 2 != 0) coeff = -coeff;
        P.c[static_cast<size_t>(m)] = coeff;
    }
    return P;
}

}  // namespace

std::vector<Poly<Rational>> reexpand(const WeakSeries& s, const GrowthParams& gp, int L) {
    return reexpand_impl<Rational>(s, gp, L, RatFetch{s, gp});
}

std::vector<Poly<Real>> reexpand_numeric(const WeakSeries& s, const GrowthParams& gp, int L) {
    return reexpand_impl<Real>(s, gp, L, NumFetch{s, gp});
}

Poly<Rational> sigma_polynomial(const WeakSeries& s, const GrowthParams& gp, int L) {
    return sigma_poly_impl<Rational>(s, gp, L, RatFetch{s, gp});
}

Poly<Real> sigma_polynomial_numeric(const WeakSeries& s, const GrowthParams& gp, int L) {
    return sigma_poly_impl<Real>(s, gp, L, NumFetch{s, gp});
}

Complex sigma_of_omega(const Complex& Omega, const Complex& g, const Rational& q) {
    if (g == Complex(0)) throw std::domain_error("sigma_of_omega: g = 0");
    Complex qm2;
    if (is_integer(q))
        qm2 = cpow_int(Omega, to_long(q) - 2);
    else
        qm2 = cpow(Omega, to_real(q - 2));
    return qm2 * (Omega * Omega - Complex(1)) / g;
}

Complex variational_value(const WeakSeries& s, const GrowthParams& gp, int L, const Complex& g,
                          const Complex& Omega) {
    if (Omega == Complex(0)) throw std::domain_error("variational_value: Omega = 0");
    Complex sigma = sigma_of_omega(Omega, g, gp.q);
    std::vector<Complex> eps_vals(static_cast<size_t>(L) + 1);
    if (s.exact()) {
        auto eps = reexpand(s, gp, L);
        for (int j = 0; j <= L; ++j)
            eps_vals[static_cast<size_t>(j)] = to_complex_poly(eps[static_cast<size_t>(j)]).eval(sigma);
    } else {
        auto eps = reexpand_numeric(s, gp, L);
        for (int j = 0; j <= L; ++j)
            eps_vals[static_cast<size_t>(j)] = to_complex_poly(eps[static_cast<size_t>(j)]).eval(sigma);
    }
    Complex ratio;
    if (is_integer(gp.q))
        ratio = g / cpow_int(Omega, to_long(gp.q));
    else
        ratio = g / cpow(Omega, to_real(gp.q));
    Complex acc(0), pow_ratio(Real(1));
    for (int j = 0; j <= L; ++j) {
        acc += eps_vals[static_cast<size_t>(j)] * pow_ratio;
        pow_ratio *= ratio;
    }
    Complex lead = is_integer(gp.p) ? cpow_int(Omega, to_long(gp.p)) : cpow(Omega, to_real(gp.p));
    return lead * acc;
}

namespace {

// Branch Omega(s) of Omega^q - Omega^{q-2} = s continuously connected to
// Omega = 1 at s = 0. For integer q every root of the degree-q polynomial
// is tracked simultaneously along the straight path so the branch cannot
// hop sheets near a close encounter; steps are halved until each root
// moves by a fraction of the minimal pairwise separation.
Complex trace_branch_int(const Complex& target_s, long ql) {
    auto newton_all = [&](std::vector<Complex>& w, const Complex& s, const Real& eps) {
        for (auto& wi : w) {
            for (int it = 0; it < 80; ++it) {
                Complex f = cpow_int(wi, ql) - cpow_int(wi, ql - 2) - s;
                Complex d = Real(ql) * cpow_int(wi, ql - 1) - Real(ql - 2) * cpow_int(wi, ql - 3);
                if (d == Complex(0)) return false;
                Complex step = f / d;
                wi -= step;
                if (abs(step) < eps * (Real(1) + abs(wi))) break;
                if (it == 79) return false;
            }
        }
        return true;
    };
    const Real eps = pow(Real(2), -static_cast<long>(Real::default_precision() * 3.2) + 8);

    // start the homotopy at a small s in the target direction where the
    // roots are already well separated: Omega ~ 1 + s/2, -1 + s/2 and the
    // (q-2)-fold cluster (-s)^{1/(q-2)} around the origin
    Real mag = abs(target_s);
    if (mag == 0) return Complex(Real(1));
    Real t0 = std::min(Real("0.01"), Real("0.01") / mag);
    Complex dir = target_s / mag;
    Complex s0 = target_s * t0;
    std::vector<Complex> w;
    w.push_back(Complex(Real(1)) + s0 / 2);
    w.push_back(Complex(Real(-1)) + s0 / 2);
    for (long k = 0; k < ql - 2; ++k) {
        Real angle = (2 * pi_real() * Real(k) + arg(-s0)) / Real(ql - 2);
        Real r = pow(abs(s0), Real(1) / Real(ql - 2));
        w.push_back(Complex(r * cos(angle), r * sin(angle)));
    }
    if (!newton_all(w, s0, eps)) throw std::runtime_error("omega branch: seed newton failed");
    size_t branch = 0;  // w[0] is the Omega(0)=1 branch

    Real t = t0;
    Real dt = t0;
    int safety = 0;
    while (t < 1) {
        if (++safety > 200000) throw std::runtime_error("omega branch: too many steps");
        Real tn = t + dt;
        if (tn > 1) tn = Real(1);
        std::vector<Complex> wn = w;
        bool ok = newton_all(wn, target_s * tn, eps);
        if (ok) {
            // minimal pairwise separation before the step
            Real sep(-1);
            for (size_t i = 0; i < w.size(); ++i)
                for (size_t j = i + 1; j < w.size(); ++j) {
                    Real d = abs(w[i] - w[j]);
                    if (sep < 0 || d < sep) sep = d;
                }
            Real maxmove(0);
            for (size_t i = 0; i < w.size(); ++i) {
                Real mv = abs(wn[i] - w[i]);
                if (mv > maxmove) maxmove = mv;
            }
            if (maxmove > sep / 4) ok = false;
        }
        if (ok) {
            w = wn;
            t = tn;
            dt *= 2;
        } else {
            dt /= 2;
            if (dt < Real("1e-60")) throw std::runtime_error("omega branch: step underflow");
        }
    }
    return w[branch];
}

Complex trace_branch_frac(const Complex& target_s, const Rational& q) {
    const Real rq = to_real(q);
    auto F = [&](const Complex& ww, const Complex& s) {
        return cpow(ww, rq) - cpow(ww, rq - 2) - s;
    };
    auto dF = [&](const Complex& ww) {
        return to_complex(rq) * cpow(ww, rq - 1) - to_complex(rq - 2) * cpow(ww, rq - 3);
    };
    const Real eps = pow(Real(2), -static_cast<long>(Real::default_precision() * 3.2) + 8);
    Complex w(Real(1));
    Real t(0), dt("0.125");
    int safety = 0;
    while (t < 1) {
        if (++safety > 100000) throw std::runtime_error("omega branch: too many steps");
        Real tn = t + dt;
        if (tn > 1) tn = Real(1);
        Complex s = target_s * tn;
        Complex wn = w;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            Complex d = dF(wn);
            if (d == Complex(0)) break;
            Complex step = F(wn, s) / d;
            wn -= step;
            if (abs(step) < eps * (Real(1) + abs(wn))) {
                ok = true;
                break;
            }
        }
        if (ok && abs(wn - w) < Real("0.25") * (Real(1) + abs(w))) {
            w = wn;
            t = tn;
            dt *= 2;
            if (dt > Real("0.125")) dt = Real("0.125");
        } else {
            dt /= 2;
            if (dt < Real("1e-40")) throw std::runtime_error("omega branch: step underflow");
        }
    }
    return w;
}

}  // namespace

Complex omega_branch(const Complex& sigma, const Complex& g, const Rational& q) {
    Complex s = sigma * g;
    if (is_integer(q) && to_long(q) >= 3) return trace_branch_int(s, to_long(q));
    return trace_branch_frac(s, q);
}

StrongCouplingResult strong_coupling_coefficients(const WeakSeries& s, const GrowthParams& gp,
                                                  int L, const Complex& sigma_star) {
    if (sigma_star == Complex(0))
        throw std::domain_error("strong_coupling_coefficients: sigma* = 0, reversion breaks down");
    const size_t n = static_cast<size_t>(L) + 1;
    const Real rq = to_real(gp.q);
    const Real rp = to_real(gp.p);

    // Solve y(t)^q - t y(t)^{q-2} = sigma* as a series in t = g^{-2/q}:
    // fixed point y = (sigma* + t y^{q-2})^{1/q}, one order per pass.
    Series<Complex> y(n, Complex(0));
    y[0] = cpow(sigma_star, Real(1) / rq);
    for (int pass = 0; pass <= L; ++pass) {
        Series<Complex> w = series_pow(y, rq - 2);
        Series<Complex> rhs(n, Complex(0));
        rhs[0] = sigma_star;
        for (size_t i = 1; i < n; ++i) rhs[i] = w[i - 1];
        y = series_pow(rhs, Real(1) / rq);
    }

    std::vector<Complex> eps_vals(n);
    if (s.exact()) {
        auto eps = reexpand(s, gp, L);
        for (size_t j = 0; j < n; ++j) eps_vals[j] = to_complex_poly(eps[j]).eval(sigma_star);
    } else {
        auto eps = reexpand_numeric(s, gp, L);
        for (size_t j = 0; j < n; ++j) eps_vals[j] = to_complex_poly(eps[j]).eval(sigma_star);
    }

    // g^{-p/q} W_L = y^p sum_j eps_j(sigma*) (y^{-q})^j
    Series<Complex> z = series_pow(y, -rq);
    Series<Complex> acc(n, Complex(0));
    Series<Complex> zj(n, Complex(0));
    zj[0] = Complex(Real(1));
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) acc[i] += eps_vals[j] * zj[i];
        if (j + 1 < n) zj = series_mul(zj, z);
    }
    Series<Complex> F = series_mul(series_pow(y, rp), acc);

    StrongCouplingResult out;
    out.b.assign(F.begin(), F.end());
    out.order_L = L;
    out.sigma_star = sigma_star;
    out.omega_used = Real(2) / rq;
    out.provenance = "reversion of sigma constraint at fixed sigma*";
    return out;
}

OmegaSolutions sigma_to_omega(const Complex& sigma, const Complex& g, const Rational& q) {
    if (g == Complex(0)) throw std::domain_error("sigma_to_omega: g = 0");
    OmegaSolutions out;
    if (!is_integer(q) || to_long(q) < 1) {
        out.principal_only = true;
        out.all.push_back(omega_branch(sigma, g, q));
        out.branch_index = 0;
        return out;
    }
    // Polynomial Omega^q - Omega^{q-2} - sigma g = 0 (times Omega for q=1).
    long ql = to_long(q);
    Poly<Complex> pol;
    if (ql == 1) {
        pol.c = {Complex(Real(-1)), -sigma * g, Complex(Real(1))};
    } else {
        pol.c.assign(static_cast<size_t>(ql) + 1, Complex(0));
        pol.c[0] = -sigma * g;
        pol.c[static_cast<size_t>(ql - 2)] += Complex(Real(-1));
        pol.c[static_cast<size_t>(ql)] += Complex(Real(1));
    }
    auto rs = all_roots(pol);
    out.all = rs.roots;
    Complex branch = omega_branch(sigma, g, q);
    Real best(-1);
    for (size_t i = 0; i < out.all.size(); ++i) {
        Real d = abs(out.all[i] - branch);
        if (best < 0 || d < best) {
            best = d;
            out.branch_index = static_cast<int>(i);
        }
    }
    return out;
}

std::string series_to_json(const WeakSeries& s, const GrowthParams* gp) {
    nlohmann::ordered_json j;
    j["coeffs"] = nlohmann::ordered_json::array();
    if (s.exact()) {
        for (size_t l = 0; l < s.size(); ++l) j["coeffs"].push_back(format_rational(s.rat(l)));
    } else {
        for (size_t l = 0; l < s.size(); ++l) {
            std::ostringstream os;
            os.precision(static_cast<int>(current_precision_digits()));
            os << s.num(l);
            j["coeffs"].push_back(os.str());
        }
    }
    if (gp) {
        j["p"] = format_rational(gp->p);
        j["q"] = format_rational(gp->q);
    }
    if (!s.coupling_name().empty()) j["coupling"] = s.coupling_name();
    if (!s.convention_note().empty()) j["note"] = s.convention_note();
    return j.dump();
}

SeriesBundle series_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty())
        throw std::invalid_argument("series_from_json: missing coeffs");
    bool exact = true;
    for (const auto& c : j["coeffs"]) {
        std::string t = c.get<std::string>();
        if (t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
            t.find('E') != std::string::npos)
            exact = false;
    }
    SeriesBundle out{WeakSeries(std::vector<Rational>{Rational(0)}), std::nullopt};
    std::string coupling = j.value("coupling", std::string("g"));
    std::string note = j.value("note", std::string(""));
    if (exact) {
        std::vector<Rational> cs;
        for (const auto& c : j["coeffs"]) cs.push_back(parse_rational(c.get<std::string>()));
        out.series = WeakSeries(std::move(cs), coupling, note);
    } else {
        std::vector<Real> cs;
        for (const auto& c : j["coeffs"]) cs.push_back(Real(c.get<std::string>()));
        out.series = WeakSeries(std::move(cs), coupling, note);
    }
    if (j.contains("p") && j.contains("q"))
        out.growth = GrowthParams(parse_rational(j["p"].get<std::string>()),
                                  parse_rational(j["q"].get<std::string>()));
    return out;
}

}  // namespace vpt
