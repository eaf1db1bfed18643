#pragma once

// Complex root finding for the sigma polynomials plus the root-selection
// rules: real stationary points, cluster middle, minimal oscillation.

#include "vpt/numeric.hpp"
#include "vpt/polynomial.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vpt {

struct RootFindOptions {
    unsigned max_iterations = 400;
    // Residual acceptance threshold relative to the coefficient norm;
    // defaults to a small multiple of the working epsilon.
    Real tolerance = Real(0);
    bool polish = true;
};

struct RootSet {
    std::vector<Complex> roots;
    std::vector<Real> residuals;  // |p(z)| / scale per root
    bool converged = true;
};

// All complex roots by Aberth-Ehrlich simultaneous iteration with a
// double-precision companion-matrix fallback for initial guesses and
// Newton polishing. Throws on empty/constant input; reports partial
// results through RootSet::converged.
RootSet all_roots(const Poly<Complex>& p, const RootFindOptions& opt = {});
RootSet all_roots(const Poly<Real>& p, const RootFindOptions& opt = {});

enum class RootKind { RealFirstDerivative, RealSecondDerivative, ComplexPair };

struct RootCandidate {
    Complex sigma;
    RootKind kind = RootKind::ComplexPair;
    int order_L = 0;
    Real residual;
};

enum class SelectionRule { RealExtremum, RealTurningPoint, ClusterMiddle, MinOscillation };

struct SelectionReport {
    RootCandidate chosen;
    std::vector<RootCandidate> all_candidates;
    SelectionRule rule_applied = SelectionRule::RealExtremum;
    // One metric per candidate: |sigma - previous| for the real rules,
    // summed in-cluster distance, or the oscillation score.
    std::vector<Real> diagnostics;
    std::vector<std::string> notes;
};

// Classified candidates for order L: roots of P (first-derivative kind)
// and of dP/dsigma (second-derivative kind). Complex candidates are
// normalized to Im sigma >= 0.
std::vector<RootCandidate> classify_candidates(const Poly<Complex>& P, int order_L);

// Real stationary points first, then real turning points; among several,
// continuity in L (nearest to previous choice, smallest |sigma| at the
// first order). Returns nullopt when only complex candidates exist.
std::optional<SelectionReport> select_real_extremum(const std::vector<RootCandidate>& candidates,
                                                    const std::optional<Complex>& previous_sigma);

// Medoid of the densest neighborhood, radius = median pairwise distance.
SelectionReport select_cluster_middle(const std::vector<RootCandidate>& candidates);

struct OscillationScore {
    Real score;
    double monotone_from = 0;  // most-negative end of the largest monotone prefix
    double monotone_to = 0;
    bool failed = false;
    std::string note;
};

// Minimal-oscillation rule for the cut side: for each candidate evaluate
// the normalized imaginary part on a grid of negative couplings sorted
// toward 0- and pick the candidate with the least oscillation excess
// past the onset of curvature sign flips.
SelectionReport select_min_oscillation(
    const std::vector<RootCandidate>& candidates,
    const std::function<Complex(const Complex& sigma, const Real& g)>& evaluator,
    const std::vector<Real>& g_grid, const std::function<Real(const Real& g)>& normalizer);

OscillationScore oscillation_score(const std::vector<Real>& y, const std::vector<Real>& g);

std::string selection_report_to_json(const SelectionReport& r);

// 60 log-spaced points from g_from to g_to (both negative), sorted toward 0-.
std::vector<Real> default_oscillation_grid(double g_from, double g_to, int n = 60);

}  // namespace vpt
