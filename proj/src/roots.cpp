#include "vpt/roots.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace vpt {

namespace {

Real default_tolerance() {
    // ~10 ulps at working precision, relative to the coefficient scale
    long digits = static_cast<long>(Real::default_precision());
    return pow(Real(10), -(digits - 1));
}

// Horner evaluation returning p(z) and p'(z).
void eval_with_derivative(const std::vector<Complex>& c, const Complex& z, Complex& p,
                          Complex& dp) {
    p = Complex(0);
    dp = Complex(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
}

// Initial guesses on circles whose radii come from the upper convex hull
// of (k, log|c_k|) (Bini's heuristic).
std::vector<Complex> initial_guesses(const std::vector<Complex>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> lc(c.size());
    for (size_t k = 0; k < c.size(); ++k) {
        Real a = abs(c[k]);
        lc[k] = (a == 0) ? -1e300 : static_cast<double>(log(a));
    }
    std::vector<int> hull;  // indices of the upper convex hull
    for (int k = 0; k <= n; ++k) {
        if (lc[static_cast<size_t>(k)] <= -1e299) continue;
        while (hull.size() >= 2) {
            int i = hull[hull.size() - 2], j = hull[hull.size() - 1];
            double cross = (lc[j] - lc[i]) * (k - i) - (lc[static_cast<size_t>(k)] - lc[i]) * (j - i);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    std::vector<Complex> z;
    z.reserve(static_cast<size_t>(n));
    const Real two_pi = 2 * pi_real();
    int placed = 0;
    for (size_t h = 0; h + 1 < hull.size(); ++h) {
        int i = hull[h], j = hull[h + 1];
        double r = std::exp((lc[i] - lc[j]) / (j - i));
        if (!std::isfinite(r) || r <= 0) r = 1.0;
        for (int m = 0; m < j - i; ++m) {
            Real theta = two_pi * Real(placed) / Real(n) + Real("0.3930") + Real(h);
            z.push_back(Complex(Real(r) * cos(theta), Real(r) * sin(theta)));
            ++placed;
        }
    }
    while (placed < n) {  // degenerate hull; fall back to the unit circle
        Real theta = two_pi * Real(placed) / Real(n) + Real("0.3930");
        z.push_back(Complex(cos(theta), sin(theta)));
        ++placed;
    }
    return z;
}

// Eigenvalues of the balanced companion matrix in double precision,
// used as fresh starting points when the simultaneous iteration stalls.
std::vector<Complex> companion_guesses(const std::vector<Complex>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    // scale roots by s to tame the coefficient range: c_k -> c_k s^k
    double lc0 = static_cast<double>(log(abs(c[0]) + Real("1e-300")));
    double lcn = static_cast<double>(log(abs(c.back())));
    double ls = (lcn - lc0) / n;  // log(1/s)
    std::vector<std::complex<double>> sc(c.size());
    for (size_t k = 0; k < c.size(); ++k) {
        Real m = abs(c[k]);
        double lm = (m == 0) ? -1e300 : static_cast<double>(log(m)) + ls * static_cast<double>(k) - lcn;
        double mag = (lm < -700) ? 0.0 : std::exp(lm);
        if (m == 0) {
            sc[k] = 0.0;
        } else {
            Complex u = c[k] / m;
            sc[k] = std::complex<double>(static_cast<double>(u.real()), static_cast<double>(u.imag())) * mag;
        }
    }
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) M(i, n - 1) = -sc[static_cast<size_t>(i)] / sc[static_cast<size_t>(n)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Complex> z;
    z.reserve(static_cast<size_t>(n));
    double s = std::exp(-ls);
    for (int i = 0; i < n; ++i) {
        std::complex<double> w = es.eigenvalues()(i);
        z.push_back(Complex(Real(w.real() * s), Real(w.imag() * s)));
    }
    return z;
}

// Evaluation-error scale sum_k |c_k| |z|^k; a root is converged once
// |p(z)| falls below tol times this bound.
Real eval_bound(const std::vector<Complex>& c, const Complex& z) {
    Real az = abs(z), b(0), zp(1);
    for (const auto& a : c) {
        b += abs(a) * zp;
        zp *= az;
    }
    return b;
}

bool aberth(const std::vector<Complex>& c, std::vector<Complex>& z, unsigned max_it,
            const Real& tol) {
    const size_t n = z.size();
    for (unsigned it = 0; it < max_it; ++it) {
        bool done = true;
        for (size_t i = 0; i < n; ++i) {
            Complex p, dp;
            eval_with_derivative(c, z[i], p, dp);
            if (abs(p) <= tol * eval_bound(c, z[i])) continue;
            Complex newton = (dp == Complex(0)) ? Complex(Real("0.1")) : p / dp;
            Complex sum(0);
            for (size_t j = 0; j < n; ++j)
                if (j != i) {
                    Complex d = z[i] - z[j];
                    if (d == Complex(0)) d = Complex(Real("1e-30"));
                    sum += Complex(Real(1)) / d;
                }
            Complex denom = Complex(Real(1)) - newton * sum;
            Complex w = (denom == Complex(0)) ? newton : newton / denom;
            z[i] -= w;
            if (abs(w) > tol * (Real(1) + abs(z[i]))) done = false;
        }
        if (done) return true;
    }
    return false;
}

}  // namespace

RootSet all_roots(const Poly<Complex>& poly, const RootFindOptions& opt) {
    std::vector<Complex> c = poly.c;
    while (!c.empty() && abs(c.back()) == 0) c.pop_back();
    if (c.size() <= 1) throw std::invalid_argument("all_roots: degree must be >= 1");

    RootSet out;
    // roots at the origin
    size_t zero_count = 0;
    while (zero_count < c.size() - 1 && abs(c[zero_count]) == 0) ++zero_count;
    if (zero_count > 0) c.erase(c.begin(), c.begin() + static_cast<long>(zero_count));
    for (size_t i = 0; i < zero_count; ++i) {
        out.roots.push_back(Complex(0));
        out.residuals.push_back(Real(0));
    }
    if (c.size() <= 1) return out;

    Real tol = (opt.tolerance > 0) ? opt.tolerance : default_tolerance();
    std::vector<Complex> z = initial_guesses(c);
    bool ok = aberth(c, z, opt.max_iterations, tol);
    if (!ok) {
        z = companion_guesses(c);
        ok = aberth(c, z, opt.max_iterations, tol);
    }

    Real norm(0);
    for (const auto& a : c)
        if (abs(a) > norm) norm = abs(a);

    if (opt.polish) {
        for (auto& zi : z) {
            for (int it = 0; it < 4; ++it) {
                Complex p, dp;
                eval_with_derivative(c, zi, p, dp);
                if (dp == Complex(0)) break;
                zi -= p / dp;
            }
        }
    }

    // conjugate symmetry for (numerically) real input
    bool real_input = true;
    for (const auto& a : c)
        if (abs(a.imag()) > tol * norm) real_input = false;
    if (real_input) {
        std::vector<bool> used(z.size(), false);
        for (size_t i = 0; i < z.size(); ++i) {
            if (used[i]) continue;
            if (abs(z[i].imag()) <= tol * (Real(1) + abs(z[i])) * 100) {
                z[i] = Complex(z[i].real(), Real(0));
                used[i] = true;
                continue;
            }
            size_t best = i;
            Real bd(-1);
            for (size_t j = i + 1; j < z.size(); ++j) {
                if (used[j]) continue;
                Real d = abs(z[j] - conj(z[i]));
                if (bd < 0 || d < bd) {
                    bd = d;
                    best = j;
                }
            }
            if (best != i) {
                Complex a = (z[i] + conj(z[best])) / Real(2);
                z[i] = a;
                z[best] = conj(a);
                used[i] = used[best] = true;
            }
        }
    }

    std::sort(z.begin(), z.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    for (const auto& zi : z) {
        Complex p, dp;
        eval_with_derivative(c, zi, p, dp);
        out.roots.push_back(zi);
        out.residuals.push_back(abs(p) / eval_bound(c, zi));
    }
    out.converged = ok;
    if (!ok) {
        // partial results are still returned; callers decide
        for (const auto& r : out.residuals)
            if (r > sqrt(tol)) throw std::runtime_error("all_roots: iteration did not converge");
    }
    return out;
}

RootSet all_roots(const Poly<Real>& p, const RootFindOptions& opt) {
    return all_roots(to_complex_poly(p), opt);
}

std::vector<RootCandidate> classify_candidates(const Poly<Complex>& P, int order_L) {
    Poly<Complex> Pp = P.derivative();
    RootSet rp = all_roots(P);
    std::vector<RootCandidate> cands;
    Real norm(0);
    for (const auto& a : P.c) norm = std::max(norm, abs(a), [](const Real& x, const Real& y) { return x < y; });
    Real real_tol = default_tolerance() * 1000;
    std::vector<bool> taken(rp.roots.size(), false);
    for (size_t i = 0; i < rp.roots.size(); ++i) {
        if (taken[i]) continue;
        const Complex& z = rp.roots[i];
        RootCandidate c;
        c.order_L = order_L;
        c.residual = rp.residuals[i];
        if (abs(z.imag()) <= real_tol * (Real(1) + abs(z))) {
            c.sigma = Complex(z.real(), Real(0));
            c.kind = RootKind::RealFirstDerivative;
        } else {
            c.sigma = (z.imag() >= 0) ? z : conj(z);
            c.kind = RootKind::ComplexPair;
            // drop the mirror partner conj(z)
            size_t partner = i;
            Real bd(-1);
            for (size_t j = i + 1; j < rp.roots.size(); ++j) {
                if (taken[j]) continue;
                Real d = abs(rp.roots[j] - conj(z));
                if (bd < 0 || d < bd) {
                    bd = d;
                    partner = j;
                }
            }
            if (partner != i && bd <= Real("1e-6") * (Real(1) + abs(c.sigma))) taken[partner] = true;
        }
        cands.push_back(c);
    }
    if (Pp.degree() >= 1) {
        RootSet rq = all_roots(Pp);
        for (size_t i = 0; i < rq.roots.size(); ++i) {
            const Complex& z = rq.roots[i];
            if (abs(z.imag()) <= real_tol * (Real(1) + abs(z))) {
                RootCandidate c;
                c.order_L = order_L;
                c.residual = rq.residuals[i];
                c.sigma = Complex(z.real(), Real(0));
                c.kind = RootKind::RealSecondDerivative;
                cands.push_back(c);
            }
        }
    }
    return cands;
}

namespace {

RootCandidate pick_by_continuity(const std::vector<RootCandidate>& pool,
                                 const std::optional<Complex>& previous_sigma,
                                 std::vector<Real>* metrics) {
    RootCandidate best = pool.front();
    Real bm(-1);
    for (const auto& c : pool) {
        Real m = previous_sigma ? abs(c.sigma - *previous_sigma) : abs(c.sigma);
        if (metrics) metrics->push_back(m);
        if (bm < 0 || m < bm) {
            bm = m;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::optional<SelectionReport> select_real_extremum(const std::vector<RootCandidate>& candidates,
                                                    const std::optional<Complex>& previous_sigma) {
    std::vector<RootCandidate> first, second;
    for (const auto& c : candidates) {
        if (c.kind == RootKind::RealFirstDerivative) first.push_back(c);
        if (c.kind == RootKind::RealSecondDerivative) second.push_back(c);
    }
    SelectionReport rep;
    rep.all_candidates = candidates;
    if (!first.empty()) {
        rep.rule_applied = SelectionRule::RealExtremum;
        rep.chosen = pick_by_continuity(first, previous_sigma, &rep.diagnostics);
        return rep;
    }
    if (!second.empty()) {
        rep.rule_applied = SelectionRule::RealTurningPoint;
        rep.chosen = pick_by_continuity(second, previous_sigma, &rep.diagnostics);
        return rep;
    }
    return std::nullopt;  // only complex candidates: use the complex rules
}

SelectionReport select_cluster_middle(const std::vector<RootCandidate>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("select_cluster_middle: empty candidate list");
    SelectionReport rep;
    rep.all_candidates = candidates;
    rep.rule_applied = SelectionRule::ClusterMiddle;
    const size_t n = candidates.size();
    if (n == 1) {
        rep.chosen = candidates[0];
        rep.diagnostics.push_back(Real(0));
        return rep;
    }
    std::vector<Real> pair_d;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            pair_d.push_back(abs(candidates[i].sigma - candidates[j].sigma));
    std::sort(pair_d.begin(), pair_d.end());
    Real radius = (pair_d.size() % 2 == 1)
                      ? pair_d[pair_d.size() / 2]
                      : (pair_d[pair_d.size() / 2 - 1] + pair_d[pair_d.size() / 2]) / 2;

    // densest neighborhood
    size_t center = 0, best_count = 0;
    for (size_t i = 0; i < n; ++i) {
        size_t count = 0;
        for (size_t j = 0; j < n; ++j)
            if (abs(candidates[i].sigma - candidates[j].sigma) <= radius) ++count;
        bool better = count > best_count;
        if (count == best_count && best_count > 0) {
            const Complex &a = candidates[i].sigma, &b = candidates[center].sigma;
            if (abs(a.imag()) < abs(b.imag()) ||
                (abs(a.imag()) == abs(b.imag()) && abs(a) < abs(b)))
                better = true;
        }
        if (better) {
            best_count = count;
            center = i;
        }
    }
    std::vector<size_t> cluster;
    for (size_t j = 0; j < n; ++j)
        if (abs(candidates[center].sigma - candidates[j].sigma) <= radius) cluster.push_back(j);

    // medoid of the cluster
    size_t chosen = cluster.front();
    Real best_sum(-1);
    rep.diagnostics.assign(n, Real(-1));
    for (size_t i : cluster) {
        Real sum(0);
        for (size_t j : cluster) sum += abs(candidates[i].sigma - candidates[j].sigma);
        rep.diagnostics[i] = sum;
        bool better = best_sum < 0 || sum < best_sum;
        if (best_sum >= 0 && sum == best_sum) {
            const Complex &a = candidates[i].sigma, &b = candidates[chosen].sigma;
            if (abs(a.imag()) < abs(b.imag()) ||
                (abs(a.imag()) == abs(b.imag()) && abs(a) < abs(b)))
                better = true;
        }
        if (better) {
            best_sum = sum;
            chosen = i;
        }
    }
    rep.chosen = candidates[chosen];
    return rep;
}

OscillationScore oscillation_score(const std::vector<Real>& y, const std::vector<Real>& g) {
    OscillationScore out{Real(0), 0, 0, false, ""};
    const size_t n = y.size();
    if (n < 3) return out;

    // monotone prefix from the most-negative end
    size_t mono_end = 1;
    int dir = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        Real d = y[i + 1] - y[i];
        int s = (d > 0) ? 1 : ((d < 0) ? -1 : 0);
        if (dir == 0) dir = s;
        if (s != 0 && dir != 0 && s != dir) break;
        mono_end = i + 1;
    }
    out.monotone_from = static_cast<double>(g.front());
    out.monotone_to = static_cast<double>(g[mono_end]);

    // onset = first sign change of the second difference
    size_t onset = n;
    int curv = 0;
    for (size_t i = 1; i + 1 < n; ++i) {
        Real d2 = y[i + 1] - 2 * y[i] + y[i - 1];
        int s = (d2 > 0) ? 1 : ((d2 < 0) ? -1 : 0);
        if (s == 0) continue;
        if (curv == 0) {
            curv = s;
        } else if (s != curv) {
            onset = i;
            break;
        }
    }
    if (onset == n) return out;  // no curvature flip: score stays 0

    // oscillation excess: total variation past onset minus the net drift
    Real tv(0), net(0);
    for (size_t i = onset; i + 1 < n; ++i) {
        Real d = y[i + 1] - y[i];
        tv += abs(d);
        net += d;
    }
    out.score = tv - abs(net);
    return out;
}

SelectionReport select_min_oscillation(
    const std::vector<RootCandidate>& candidates,
    const std::function<Complex(const Complex& sigma, const Real& g)>& evaluator,
    const std::vector<Real>& g_grid, const std::function<Real(const Real& g)>& normalizer) {
    if (candidates.empty())
        throw std::invalid_argument("select_min_oscillation: empty candidate list");
    SelectionReport rep;
    rep.all_candidates = candidates;
    rep.rule_applied = SelectionRule::MinOscillation;
    rep.diagnostics.assign(candidates.size(), Real(-1));

    int best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
        std::vector<Real> y;
        y.reserve(g_grid.size());
        bool failed = false;
        for (const auto& g : g_grid) {
            try {
                Complex v = evaluator(candidates[i].sigma, g);
                y.push_back(v.imag() * normalizer(g));
            } catch (const std::exception& e) {
                failed = true;
                rep.notes.push_back("candidate " + std::to_string(i) +
                                    " disqualified: " + e.what());
                break;
            }
        }
        if (failed) continue;
        OscillationScore sc = oscillation_score(y, g_grid);
        rep.diagnostics[i] = sc.score;
        if (best < 0 || sc.score < rep.diagnostics[static_cast<size_t>(best)])
            best = static_cast<int>(i);
    }
    if (best < 0) throw std::runtime_error("select_min_oscillation: every candidate failed");

    // Near-ties (several curves equally smooth on the grid) go to the
    // middle of the tied cluster; |Im|, |sigma| break what remains.
    Real min_score = rep.diagnostics[static_cast<size_t>(best)];
    Real tie_eps = min_score * Real("1e-6") + Real("1e-30");
    std::vector<RootCandidate> tied;
    for (size_t i = 0; i < candidates.size(); ++i)
        if (rep.diagnostics[i] >= 0 && rep.diagnostics[i] <= min_score + tie_eps)
            tied.push_back(candidates[i]);
    if (tied.size() > 1) {
        SelectionReport sub = select_cluster_middle(tied);
        rep.chosen = sub.chosen;
        rep.notes.push_back(std::to_string(tied.size()) +
                            " candidates tied on the oscillation score; middle of the tied "
                            "cluster chosen");
    } else {
        rep.chosen = candidates[static_cast<size_t>(best)];
    }
    return rep;
}

std::vector<Real> default_oscillation_grid(double g_from, double g_to, int n) {
    if (!(g_from < 0 && g_to < 0 && g_from < g_to))
        throw std::invalid_argument("oscillation grid wants g_from < g_to < 0");
    std::vector<Real> g;
    g.reserve(static_cast<size_t>(n));
    double la = std::log(-g_from), lb = std::log(-g_to);
    for (int i = 0; i < n; ++i) {
        double t = la + (lb - la) * i / (n - 1);
        g.push_back(-exp(Real(t)));
    }
    return g;  // ascending: from most negative toward 0-
}

std::string selection_report_to_json(const SelectionReport& r) {
    nlohmann::ordered_json j;
    auto cand = [](const RootCandidate& c) {
        nlohmann::ordered_json o;
        o["sigma_re"] = static_cast<double>(c.sigma.real());
        o["sigma_im"] = static_cast<double>(c.sigma.imag());
        switch (c.kind) {
            case RootKind::RealFirstDerivative: o["kind"] = "real-first-derivative"; break;
            case RootKind::RealSecondDerivative: o["kind"] = "real-second-derivative"; break;
            case RootKind::ComplexPair: o["kind"] = "complex-pair"; break;
        }
        o["order_L"] = c.order_L;
        o["residual"] = static_cast<double>(c.residual);
        return o;
    };
    j["chosen"] = cand(r.chosen);
    switch (r.rule_applied) {
        case SelectionRule::RealExtremum: j["rule_applied"] = "real-extremum"; break;
        case SelectionRule::RealTurningPoint: j["rule_applied"] = "real-turning-point"; break;
        case SelectionRule::ClusterMiddle: j["rule_applied"] = "cluster-middle"; break;
        case SelectionRule::MinOscillation: j["rule_applied"] = "min-oscillation"; break;
    }
    j["all_candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : r.all_candidates) j["all_candidates"].push_back(cand(c));
    j["diagnostics"] = nlohmann::ordered_json::array();
    for (const auto& d : r.diagnostics) j["diagnostics"].push_back(static_cast<double>(d));
    for (const auto& n : r.notes) j["notes"].push_back(n);
    return j.dump();
}

}  // namespace vpt
