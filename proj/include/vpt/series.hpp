#pragma once

// Truncated weak-coupling series and the variational re-expansion that
// turns them into strong-coupling approximants.
//
// Conventions, used throughout:
//   f(g) ~ sum_l a_l g^l           divergent expansion around g = 0
//   f(g) ~ g^{p/q} sum_l b_l g^{-2l/q}   convergent for large |g|
//   sigma = Omega^{q-2} (Omega^2 - 1) / g  combined variational variable
// The stationarity condition in Omega reduces to a g-independent
// polynomial P_L(sigma); picking one of its zeros sigma* fixes the
// optimal Omega(g) branch and the strong-coupling coefficients.

#include "vpt/numeric.hpp"
#include "vpt/polynomial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vpt {

class WeakSeries {
public:
    WeakSeries() = default;
    explicit WeakSeries(std::vector<Rational> coeffs, std::string coupling = "g",
                        std::string note = "");
    explicit WeakSeries(std::vector<Real> coeffs, std::string coupling = "g",
                        std::string note = "");

    bool exact() const { return exact_; }
    size_t size() const { return exact_ ? rat_.size() : num_.size(); }
    int order() const { return static_cast<int>(size()) - 1; }

    const Rational& rat(size_t l) const;
    Real num(size_t l) const;  // converts at the current working precision

    const std::vector<Rational>& rationals() const;

    const std::string& coupling_name() const { return coupling_name_; }
    const std::string& convention_note() const { return convention_note_; }

private:
    bool exact_ = true;
    std::vector<Rational> rat_;
    std::vector<Real> num_;
    std::string coupling_name_ = "g";
    std::string convention_note_;
};

struct GrowthParams {
    Rational p;  // leading strong-coupling power is p/q
    Rational q;  // q = 2/omega

    GrowthParams(Rational p_, Rational q_);
    Rational omega() const { return Rational(2) / q; }
};

struct StrongCouplingResult {
    std::vector<Complex> b;  // b_0 ... b_L, coefficients of g^{-2l/q}
    int order_L = 0;
    Complex sigma_star;
    Real omega_used;
    std::string provenance;
};

// Generalized binomial coefficient x(x-1)...(x-k+1)/k!.
Rational generalized_binomial(const Rational& x, unsigned k);
Real generalized_binomial(const Real& x, unsigned k);

// Truncated binomial expansion of (1-1)^r after the k-th term:
// sum_{i<=k} C(r,i)(-1)^i = (-1)^k C(r-1,k).
Rational truncated_binomial(const Rational& r, unsigned k);
Real truncated_binomial(const Real& r, unsigned k);
Rational truncated_binomial_bruteforce(const Rational& r, unsigned k);

// Re-expansion coefficients eps_j(sigma), j = 0..L, as polynomials in
// sigma: eps_j(sigma) = sum_{l<=j} a_l C((p-lq)/2, j-l) (-sigma)^{j-l}.
std::vector<Poly<Rational>> reexpand(const WeakSeries& s, const GrowthParams& gp, int L);
std::vector<Poly<Real>> reexpand_numeric(const WeakSeries& s, const GrowthParams& gp, int L);

// Stationarity polynomial
// P_L(sigma) = sum_l a_l (p - lq + 2l - 2L) C((p-lq)/2, L-l) (-sigma)^{L-l}.
Poly<Rational> sigma_polynomial(const WeakSeries& s, const GrowthParams& gp, int L);
Poly<Real> sigma_polynomial_numeric(const WeakSeries& s, const GrowthParams& gp, int L);

// W_L(g, Omega) = Omega^p sum_j (g Omega^{-q})^j eps_j(sigma(Omega, g)).
Complex variational_value(const WeakSeries& s, const GrowthParams& gp, int L,
                          const Complex& g, const Complex& Omega);

// sigma evaluated from (Omega, g).
Complex sigma_of_omega(const Complex& Omega, const Complex& g, const Rational& q);

struct OmegaSolutions {
    std::vector<Complex> all;     // every solution of Omega^{q-2}(Omega^2-1) = sigma g
    int branch_index = -1;        // index of the branch connected to Omega = 1 at g = 0
    bool principal_only = false;  // non-integer q: iterative principal-branch solve only
};

OmegaSolutions sigma_to_omega(const Complex& sigma, const Complex& g, const Rational& q);

// Just the branch connected to Omega=1; cheaper than enumerating all roots.
Complex omega_branch(const Complex& sigma, const Complex& g, const Rational& q);

// Strong-coupling coefficients b_0..b_L obtained by expanding
// g^{-p/q} W_L(g, Omega(g)) in powers of t = g^{-2/q} at fixed sigma*.
StrongCouplingResult strong_coupling_coefficients(const WeakSeries& s, const GrowthParams& gp,
                                                  int L, const Complex& sigma_star);

// JSON interchange: {"coeffs": ["1/2","3/4"], "p": "1", "q": "3", ...}.
struct SeriesBundle {
    WeakSeries series;
    std::optional<GrowthParams> growth;
};
std::string series_to_json(const WeakSeries& s, const GrowthParams* gp);
SeriesBundle series_from_json(const std::string& json_text);

}  // namespace vpt
