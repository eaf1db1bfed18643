#include "vpt/oscillator.hpp"

#include "vpt/fitting.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace vpt {
namespace oscillator {

WeakSeries bender_wu_coeffs(const EvenPotential& pot, int L) {
    if (L < 0) throw std::invalid_argument("bender_wu_coeffs: L >= 0");
    for (const auto& [k, eps] : pot.couplings)
        if (k < 2) throw std::invalid_argument("bender_wu_coeffs: couplings start at x^4 (k=2)");

    // psi = exp(-x^2/2) sum_n g^n sum_m A[n][m] x^{2m}; the x^{2k}
    // coupling eps_k enters at order g^{k-1}. Matching powers gives
    //   2M A[n][M] = (M+1)(2M+1) A[n][M+1] - sum_k eps_k A[n-k+1][M-k]
    //                + sum_{j=1}^{n-1} E_j A[n-j][M],
    // with A[n][0] = 0 for n >= 1 and E_n = -A[n][1].
    std::vector<std::vector<Rational>> A(static_cast<size_t>(L) + 1);
    std::vector<Rational> E(static_cast<size_t>(L) + 1, Rational(0));
    A[0] = {Rational(1)};
    E[0] = Rational(1, 2);

    std::vector<Rational> coeffs(static_cast<size_t>(L) + 1);
    coeffs[0] = Rational(1, 2);
    for (int n = 1; n <= L; ++n) {
        size_t mmax = static_cast<size_t>(2 * n);
        A[static_cast<size_t>(n)].assign(mmax + 2, Rational(0));
        auto at = [&](int nn, long mm) -> Rational {
            if (nn < 0 || mm < 0) return Rational(0);
            const auto& row = A[static_cast<size_t>(nn)];
            if (static_cast<size_t>(mm) >= row.size()) return Rational(0);
            return row[static_cast<size_t>(mm)];
        };
        for (long M = static_cast<long>(mmax); M >= 1; --M) {
            Rational acc = Rational((M + 1) * (2 * M + 1)) * at(n, M + 1);
            for (const auto& [k, eps] : pot.couplings) acc -= eps * at(n - k + 1, M - k);
            for (int j = 1; j < n; ++j) acc += E[static_cast<size_t>(j)] * at(n - j, M);
            A[static_cast<size_t>(n)][static_cast<size_t>(M)] = acc / Rational(2 * M);
        }
        E[static_cast<size_t>(n)] = -A[static_cast<size_t>(n)][1];
        coeffs[static_cast<size_t>(n)] = E[static_cast<size_t>(n)];
    }
    return WeakSeries(std::move(coeffs), "g", "V = x^2/2 + interaction, ground state");
}

const WeakSeries& quartic_series(int L) {
    static std::mutex mu;
    static std::vector<Rational> cache;
    static std::map<int, WeakSeries> views;
    std::lock_guard<std::mutex> lock(mu);
    if (static_cast<size_t>(L) + 1 > cache.size()) {
        WeakSeries s = bender_wu_coeffs(EvenPotential::quartic(), L);
        cache = s.rationals();
        views.clear();
    }
    auto it = views.find(L);
    if (it == views.end()) {
        std::vector<Rational> pre(cache.begin(), cache.begin() + L + 1);
        it = views.emplace(L, WeakSeries(std::move(pre), "g", "V = x^2/2 + g x^4, ground state")).first;
    }
    return it->second;
}

namespace {

// log2 of the largest coefficient magnitude, for precision budgeting
double series_log2_max(const WeakSeries& s) {
    double m = 0;
    for (size_t l = 0; l < s.size(); ++l) {
        double v;
        if (s.exact()) {
            const Rational& r = s.rat(l);
            if (r == 0) continue;
            v = static_cast<double>(msb(abs(numerator(r))) + 1) -
                static_cast<double>(msb(denominator(r)) + 1);
        } else {
            Real a = abs(s.num(l));
            if (a == 0) continue;
            v = static_cast<double>(log(a)) * 1.4426950408889634;
        }
        if (v > m) m = v;
    }
    return m;
}

unsigned eval_bits(const WeakSeries& s, int L, double sigma_mag, double cut_g) {
    double bits = 3.33 * current_precision_digits();
    bits += series_log2_max(s);
    bits += L * std::log2(2.0 + sigma_mag);
    if (cut_g < 0) bits += 1.4427 / (3.0 * -cut_g);
    return static_cast<unsigned>(bits) + 64;
}

}  // namespace

Complex energy_at_sigma(int L, const Complex& sigma_star, const Complex& g) {
    const WeakSeries& s = quartic_series(L);
    double cut = (g.imag() == 0 && g.real() < 0) ? static_cast<double>(g.real()) : 0.0;
    PrecisionGuard guard(eval_bits(s, L, static_cast<double>(abs(sigma_star)), cut));
    Complex gg(g.real(), g.imag());
    Complex sig(sigma_star.real(), sigma_star.imag());
    Complex Omega = omega_branch(sig, gg, Rational(3));
    return variational_value(s, growth(), L, gg, Omega);
}

SelectionReport select_sigma(int L, RootRule rule, const std::optional<Complex>& previous_sigma,
                             const std::vector<Real>& smooth_grid) {
    const WeakSeries& s = quartic_series(L);
    PrecisionGuard guard(static_cast<unsigned>(3.33 * current_precision_digits() +
                                               series_log2_max(s)) + 64);
    Poly<Rational> P = sigma_polynomial(s, growth(), L);
    auto cands = classify_candidates(to_complex_poly(P), L);
    if (rule == RootRule::Real) {
        auto rep = select_real_extremum(cands, previous_sigma);
        if (!rep) throw std::runtime_error("select_sigma: no real stationary or turning point");
        return *rep;
    }
    std::vector<RootCandidate> complex_only;
    for (const auto& c : cands)
        if (c.kind == RootKind::ComplexPair) complex_only.push_back(c);
    if (complex_only.empty())
        throw std::runtime_error("select_sigma: no complex candidates for the cut-side rules");
    if (rule == RootRule::Cluster) return select_cluster_middle(complex_only);

    std::vector<Real> grid = smooth_grid;
    if (grid.empty()) grid = smooth_scoring_grid(L);
    // Score the normalized log curve log(sqrt(-pi g/2)|Im E|) - 1/(3g):
    // past the oscillation onset it backtracks by O(1) per wiggle, so the
    // total-variation excess ranks candidates by how close to g = 0- they
    // stay smooth, independent of the post-breakdown amplitudes.
    auto evaluator = [L](const Complex& sigma, const Real& gneg) {
        Complex E = energy_at_sigma(L, sigma, Complex(gneg, Real(0)));
        Real aim = abs(E.imag());
        Real y = (aim == 0) ? Real(10) / (3 * gneg)
                            : log(sqrt(-pi_real() * gneg / 2) * aim);
        return Complex(Real(0), y - 1 / (3 * gneg));
    };
    auto normalizer = [](const Real&) { return Real(1); };
    return select_min_oscillation(complex_only, evaluator, grid, normalizer);
}

VptEnergy vpt_energy(int L, const Complex& g, RootRule rule,
                     const std::optional<Complex>& previous_sigma,
                     const std::vector<Real>& smooth_grid) {
    SelectionReport rep = select_sigma(L, rule, previous_sigma, smooth_grid);
    VptEnergy out;
    out.sigma_star = rep.chosen.sigma;
    out.rule = rep.rule_applied;
    out.value = energy_at_sigma(L, out.sigma_star, g);
    return out;
}

std::vector<StrongChainEntry> strong_b0_chain(int L_max) {
    std::vector<StrongChainEntry> chain;
    std::optional<Complex> prev;
    for (int L = 1; L <= L_max; ++L) {
        SelectionReport rep = select_sigma(L, RootRule::Real, prev);
        const WeakSeries& s = quartic_series(L);
        PrecisionGuard guard(eval_bits(s, L, static_cast<double>(abs(rep.chosen.sigma)), 0.0));
        Complex sig(rep.chosen.sigma.real(), rep.chosen.sigma.imag());
        auto sc = strong_coupling_coefficients(s, growth(), L, sig);
        chain.push_back({L, rep.chosen.sigma, sc.b[0], rep.rule_applied});
        prev = rep.chosen.sigma;
    }
    return chain;
}

Complex scaled_energy_quartic(const Real& w, const Complex& g2, int L, RootRule rule) {
    Complex gc = g2 / (4 * w * w * w);
    return to_complex(w) * vpt_energy(L, gc, rule).value;
}

double tunneling_window_end(int L) {
    if (L >= 64) return -0.006;
    if (L >= 24) return -0.010;
    return -0.014;
}

std::vector<Real> smooth_scoring_grid(int L) {
    // a dense grid reaching slightly past the usable fit window, so that
    // candidates breaking inside the window show their oscillation onset
    return default_oscillation_grid(-0.05, 0.75 * tunneling_window_end(L), 150);
}

TunnelingCurve tunneling_imag(int L, const std::vector<Real>& g_window) {
    if (g_window.empty()) throw std::invalid_argument("tunneling_imag: empty window");
    for (const auto& g : g_window)
        if (!(g < 0)) throw std::domain_error("tunneling_imag: window must be negative");

    SelectionReport rep = select_sigma(L, RootRule::Smooth, std::nullopt);
    TunnelingCurve out;
    out.sigma_star = rep.chosen.sigma;

    // fix the sign convention Im E < 0 (decay rate on the chosen rim)
    Complex probe = energy_at_sigma(L, out.sigma_star, Complex(g_window.front(), Real(0)));
    if (probe.imag() > 0) out.sigma_star = conj(out.sigma_star);

    for (const auto& g : g_window) {
        Complex E = energy_at_sigma(L, out.sigma_star, Complex(g, Real(0)));
        Real im = E.imag();
        int sgn = (im > 0) ? 1 : ((im < 0) ? -1 : 0);
        if (out.im_sign == 0) out.im_sign = sgn;
        Real norm = sqrt(-pi_real() * g / 2) * abs(im);
        if (norm <= 0) throw std::runtime_error("tunneling_imag: vanishing imaginary part at g=" +
                                                std::to_string(static_cast<double>(g)));
        out.points.push_back({g, log(norm) - 1 / (3 * g), im});
    }
    return out;
}

TunnelingFit tunneling_fit(const TunnelingCurve& curve, int degree) {
    if (degree < 3) throw std::invalid_argument("tunneling_fit: degree >= 3");
    std::vector<std::vector<Real>> X;
    std::vector<Real> y;
    for (const auto& p : curve.points) {
        std::vector<Real> row;
        Real pw = p.g;
        for (int d = 1; d <= degree; ++d) {
            row.push_back(pw);
            pw *= p.g;
        }
        X.push_back(std::move(row));
        y.push_back(p.value);
    }
    auto c = least_squares(X, y);
    return TunnelingFit{c[0], -c[1], c[2]};
}

LargeOrderFit large_order_ratios(const WeakSeries& a, int l_min, int l_max, int J) {
    if (!a.exact()) throw std::invalid_argument("large_order_ratios: exact coefficients required");
    if (l_max > a.order() || l_min < 1 || l_min >= l_max)
        throw std::invalid_argument("large_order_ratios: bad window");
    // model: -a_l/a_{l-1} = sum_{j=-1}^{J} beta_j l^{-j}; exact LS
    std::vector<std::vector<Rational>> X;
    std::vector<Rational> y;
    for (int l = l_min; l <= l_max; ++l) {
        std::vector<Rational> row;
        Rational lj(static_cast<long>(l));
        row.push_back(lj);  // j = -1
        Rational p(1);
        for (int j = 0; j <= J; ++j) {
            row.push_back(p);
            p /= lj;
        }
        X.push_back(std::move(row));
        y.push_back(-a.rat(static_cast<size_t>(l)) / a.rat(static_cast<size_t>(l) - 1));
    }
    LargeOrderFit out;
    try {
        out.beta = least_squares(X, y);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("large_order_ratios: ill-conditioned fit (singular normal matrix)");
    }
    // rough condition estimate of the normal matrix, in double
    {
        size_t cols = X[0].size();
        std::vector<std::vector<double>> N(cols, std::vector<double>(cols, 0));
        for (const auto& row : X)
            for (size_t i = 0; i < cols; ++i)
                for (size_t j = 0; j < cols; ++j)
                    N[i][j] += static_cast<double>(row[i]) * static_cast<double>(row[j]);
        double dmax = 0, dmin = 1e300;
        for (size_t i = 0; i < cols; ++i) {
            dmax = std::max(dmax, N[i][i]);
            dmin = std::min(dmin, N[i][i]);
        }
        out.condition_estimate = (dmin > 0) ? dmax / dmin : 1e300;
    }
    return out;
}

namespace {

// Laurent series sum_{n >= lo} c[n-lo] g^n, truncated above at hi.
template <class T>
struct Laurent {
    int lo = 0;
    std::vector<T> c;  // c[i] multiplies g^{lo+i}

    T at(int n) const {
        int i = n - lo;
        if (i < 0 || static_cast<size_t>(i) >= c.size()) return T(0);
        return c[static_cast<size_t>(i)];
    }
};

template <class T>
Laurent<T> laurent_trunc(const Laurent<T>& a, int hi) {
    Laurent<T> r = a;
    int len = hi - r.lo + 1;
    if (len < 0) len = 0;
    if (r.c.size() > static_cast<size_t>(len)) r.c.resize(static_cast<size_t>(len));
    return r;
}

template <class T>
Laurent<T> laurent_add(const Laurent<T>& a, const Laurent<T>& b) {
    Laurent<T> r;
    r.lo = std::min(a.lo, b.lo);
    int hi = std::max(a.lo + static_cast<int>(a.c.size()), b.lo + static_cast<int>(b.c.size())) - 1;
    r.c.assign(static_cast<size_t>(hi - r.lo + 1), T(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[static_cast<size_t>(a.lo + static_cast<int>(i) - r.lo)] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[static_cast<size_t>(b.lo + static_cast<int>(i) - r.lo)] += b.c[i];
    return r;
}

template <class T>
Laurent<T> laurent_mul(const Laurent<T>& a, const Laurent<T>& b, int hi) {
    Laurent<T> r;
    r.lo = a.lo + b.lo;
    int len = hi - r.lo + 1;
    if (len <= 0) {
        r.c.clear();
        return r;
    }
    r.c.assign(static_cast<size_t>(len), T(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == T(0)) continue;
        for (size_t j = 0; j < b.c.size(); ++j) {
            int n = a.lo + static_cast<int>(i) + b.lo + static_cast<int>(j);
            if (n > hi) break;
            r.c[static_cast<size_t>(n - r.lo)] += a.c[i] * b.c[j];
        }
    }
    return r;
}

// theta = g d/dg acting on a Laurent series
template <class T>
Laurent<T> laurent_theta(const Laurent<T>& a) {
    Laurent<T> r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] *= T(r.lo + static_cast<int>(i));
    return r;
}

// Coefficient of g^{target} in the operator residual
//   T_K + g sum_{j=-1}^{K} beta_j U_{K-j},
// where T_m = E^{-1} theta^m E, U_m = E^{-1} (theta+1)^m E for the ansatz
// E = g^alpha exp(1/(beta_{-1} g) - sum_k b_k (-g)^k), so that
// E^{-1} theta E = R := alpha - 1/(beta_{-1} g) - sum_k k b_k (-g)^k.
template <class T>
T bubble_residual_coeff(const std::vector<T>& beta, const T& alpha, const std::vector<T>& b,
                        int target) {
    const int K = static_cast<int>(beta.size()) - 2;  // beta_{-1}..beta_K
    // intermediate stages T_m, U_m sit at orders >= -m, so they need
    // content up to target + (K - m); one global bound covers all stages
    const int hi = target + K + 2;
    Laurent<T> R;
    R.lo = -1;
    int rlen = std::max({hi + 2, static_cast<int>(b.size()) + 2, 2});
    R.c.assign(static_cast<size_t>(rlen), T(0));
    R.c[0] = -T(1) / beta[0];
    R.c[1] = alpha;
    for (size_t k = 1; k <= b.size(); ++k) {
        int n = static_cast<int>(k);
        if (n + 1 < static_cast<int>(R.c.size())) {
            T v = -T(static_cast<long>(k)) * b[k - 1];
            if (k % 2 != 0) v = -v;  // (-g)^k
            R.c[static_cast<size_t>(n + 1)] = v;
        }
    }
    Laurent<T> Rp1 = R;
    Rp1.c[1] += T(1);  // R + 1

    auto advance = [&](const Laurent<T>& prev, const Laurent<T>& gen) {
        return laurent_trunc(laurent_add(laurent_theta(prev), laurent_mul(prev, gen, hi)), hi);
    };
    Laurent<T> one;
    one.lo = 0;
    one.c = {T(1)};

    Laurent<T> Tk = one;
    for (int m = 0; m < K; ++m) Tk = advance(Tk, R);

    Laurent<T> acc = Tk;
    Laurent<T> U = one;
    // j runs K down to -1 so U_m is built incrementally, m = K - j
    for (int j = K; j >= -1; --j) {
        // term g * beta_j * U_{K-j}; beta index j+1
        Laurent<T> term = U;
        term.lo += 1;
        for (auto& x : term.c) x *= beta[static_cast<size_t>(j + 1)];
        acc = laurent_trunc(laurent_add(acc, term), hi);
        if (j >= 0) U = advance(U, Rp1);
    }
    return acc.at(target);
}

template <class T>
void solve_bubble(const std::vector<T>& beta, int K_want, T& alpha, std::vector<T>& b,
                  const std::function<bool(const T&)>& is_zero) {
    const int K = static_cast<int>(beta.size()) - 2;
    if (K < 1) throw std::invalid_argument("bubble_from_recurrence: need beta_{-1}..beta_1");
    if (K_want > K)
        throw std::invalid_argument("bubble_from_recurrence: only " + std::to_string(K) +
                                    " coefficients are determined by the given beta set");
    alpha = T(0);
    b.clear();

    // consistency at the lowest order (fixed entirely by beta_{-1})
    T r_low = bubble_residual_coeff(beta, T(0), b, -K);
    if (!is_zero(r_low))
        throw std::runtime_error("bubble_from_recurrence: leading order does not close");

    // alpha from order -K+1 (affine dependence)
    {
        T r0 = bubble_residual_coeff(beta, T(0), b, -K + 1);
        T r1 = bubble_residual_coeff(beta, T(1), b, -K + 1);
        T slope = r1 - r0;
        if (is_zero(slope))
            throw std::runtime_error("bubble_from_recurrence: no alpha solves the leading order");
        alpha = -r0 / slope;
    }
    for (int k = 1; k <= K_want; ++k) {
        b.push_back(T(0));
        T r0 = bubble_residual_coeff(beta, alpha, b, -K + 1 + k);
        b.back() = T(1);
        T r1 = bubble_residual_coeff(beta, alpha, b, -K + 1 + k);
        T slope = r1 - r0;
        if (is_zero(slope))
            throw std::runtime_error("bubble_from_recurrence: order " + std::to_string(k) +
                                     " does not determine b_k");
        b.back() = -r0 / slope;
    }
}

}  // namespace

BubbleExpansion bubble_from_recurrence(const std::vector<Rational>& beta, int K) {
    BubbleExpansion out;
    std::function<bool(const Rational&)> is_zero = [](const Rational& x) { return x == 0; };
    solve_bubble<Rational>(beta, K, out.alpha, out.b, is_zero);
    return out;
}

BubbleExpansionNumeric bubble_from_recurrence_numeric(const std::vector<Real>& beta, int K) {
    BubbleExpansionNumeric out;
    Real tol = pow(Real(10), -static_cast<long>(current_precision_digits()) / 2);
    std::function<bool(const Real&)> is_zero = [tol](const Real& x) { return abs(x) < tol; };
    solve_bubble<Real>(beta, K, out.alpha, out.b, is_zero);
    return out;
}

}  // namespace oscillator
}  // namespace vpt
