#pragma once

// Anharmonic oscillator suite: Rayleigh-Schroedinger ground-state
// coefficients for even polynomial potentials (Bender-Wu recursion),
// variational strong-coupling energies, tunneling imaginary parts for
// g < 0, and the large-order recurrence -> ODE -> bubble coefficients
// machinery.
//
// Canonical convention: V(x) = x^2/2 + g x^4 (hbar = M = 1), ground
// state energy E(g) = sum a_l g^l with a = (1/2, 3/4, -21/8, ...).
// An even potential with couplings eps[k] on x^{2k} enters at order
// g^{k-1}, so the quartic term is first order and x^{2k} joins at
// g^{k-1}; this matches the multi-coupling series used by the membrane
// free energy.

#include "vpt/numeric.hpp"
#include "vpt/roots.hpp"
#include "vpt/series.hpp"

#include <map>
#include <optional>
#include <vector>

namespace vpt {
namespace oscillator {

struct EvenPotential {
    // couplings[k] multiplies x^{2k} (k >= 2); the x^2/2 term is fixed
    std::map<int, Rational> couplings;

    static EvenPotential quartic(const Rational& eps = Rational(1)) {
        EvenPotential p;
        p.couplings[2] = eps;
        return p;
    }
};

inline GrowthParams growth() { return GrowthParams(Rational(1), Rational(3)); }

// Ground-state energy coefficients a_0..a_L, exact rationals.
WeakSeries bender_wu_coeffs(const EvenPotential& pot, int L);

// Pure-quartic series, cached across calls (the recursion is the cost).
const WeakSeries& quartic_series(int L);

enum class RootRule { Real, Cluster, Smooth };

struct VptEnergy {
    Complex value;
    Complex sigma_star;
    SelectionRule rule;
};

// Variational ground-state energy at order L with (p=1, q=3).
// Real rule for g > 0; for g < 0 the smoothness rule scores the
// normalized imaginary part on `smooth_grid` (a default window is used
// when empty).
VptEnergy vpt_energy(int L, const Complex& g, RootRule rule,
                     const std::optional<Complex>& previous_sigma = std::nullopt,
                     const std::vector<Real>& smooth_grid = {});

// sigma* chosen by the rule only (no evaluation); previous_sigma feeds
// the continuity tie-break of the real rule.
SelectionReport select_sigma(int L, RootRule rule, const std::optional<Complex>& previous_sigma,
                             const std::vector<Real>& smooth_grid = {});

// Energy at a fixed sigma* (branch Omega(g) connected to Omega=1).
Complex energy_at_sigma(int L, const Complex& sigma_star, const Complex& g);

// Strong-coupling coefficient chain b_0^{(L)} along real-rule roots.
struct StrongChainEntry {
    int L;
    Complex sigma_star;
    Complex b0;
    SelectionRule rule;
};
std::vector<StrongChainEntry> strong_b0_chain(int L_max);

// Units adapter for the V = w^2 x^2/2 + g2 x^4 convention:
// E_w(g2) = w * E_canonical(g2 / (4 w^3)) with the series in g2/(4 w^3).
Complex scaled_energy_quartic(const Real& w, const Complex& g2, int L, RootRule rule);

// Default scoring grid for the smoothness rule: reaches toward the
// singularity as far as order L supports, [-0.05, -0.25/L] clamped.
std::vector<Real> smooth_scoring_grid(int L);

// Fit window endpoints: the full-mode window starts at -0.0229; the
// most-negative usable endpoint shrinks with the order.
double tunneling_window_end(int L);

// log(sqrt(-pi g/2) |Im E_var^{(L)}(g)|) - 1/(3g) for g < 0.
struct TunnelingPoint {
    Real g;
    Real value;      // normalized log
    Real im_energy;  // signed Im E
};
struct TunnelingCurve {
    std::vector<TunnelingPoint> points;
    Complex sigma_star;
    int im_sign = 0;  // sign of Im E on the window (recorded once)
};
TunnelingCurve tunneling_imag(int L, const std::vector<Real>& g_window);

// Polynomial fit f(g) ~ b1 g - b2 g^2 + b3 g^3 - ... on a window of
// negative g. Degree 4 keeps the O(g^4) tail from biasing b1.
struct TunnelingFit {
    Real b1, b2, b3;
};
TunnelingFit tunneling_fit(const TunnelingCurve& curve, int degree = 4);

// Least-squares fit of a_l/a_{l-1} = -sum_{j=-1}^{J} beta_j l^{-j} on an
// l-window, carried out in exact rational arithmetic.
struct LargeOrderFit {
    std::vector<Rational> beta;  // beta_{-1}, beta_0, ..., beta_J
    double condition_estimate = 0;
};
LargeOrderFit large_order_ratios(const WeakSeries& a, int l_min, int l_max, int J);

struct BubbleExpansion {
    Rational alpha;            // prefactor power, -1/2 for the x^4 oscillator
    std::vector<Rational> b;   // b_1..b_K of exp(1/3g - sum b_k (-g)^k)
};

// Substitutes E(g) = g^alpha exp(1/3g - sum_k b_k (-g)^k) into the ODE
// built from the beta_j recurrence and matches orders. beta holds
// beta_{-1}..beta_J exactly.
BubbleExpansion bubble_from_recurrence(const std::vector<Rational>& beta, int K);

// Same pipeline with inexact (fitted) beta_j, at working precision.
struct BubbleExpansionNumeric {
    Real alpha;
    std::vector<Real> b;
};
BubbleExpansionNumeric bubble_from_recurrence_numeric(const std::vector<Real>& beta, int K);

}  // namespace oscillator
}  // namespace vpt
