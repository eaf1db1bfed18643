#include "vpt/fitting.hpp"

namespace vpt {

LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need 2+ points");
    Real sx(0), sy(0);
    const Real n(static_cast<long>(x.size()));
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    Real mx = sx / n, my = sy / n;
    Real sxx(0), sxy(0);
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::runtime_error("fit_line: degenerate abscissae");
    LineFit f{my - sxy / sxx * mx, sxy / sxx};
    return f;
}

PowerLawFit fit_power_law(const std::vector<Real>& L, const std::vector<Real>& y) {
    if (L.size() != y.size() || L.size() < 3)
        throw std::invalid_argument("fit_power_law: need 3+ points");
    Real A = y.back(), kappa(1);
    Real B = (y.front() - A) * pow(L.front(), kappa);
    PowerLawFit out{A, B, kappa, false};
    for (int it = 0; it < 200; ++it) {
        // residuals r_i = y_i - A - B L^-k; Jacobian wrt (A, B, k)
        std::vector<std::vector<Real>> J(L.size(), std::vector<Real>(3));
        std::vector<Real> r(L.size());
        for (size_t i = 0; i < L.size(); ++i) {
            Real lk = pow(L[i], -kappa);
            r[i] = y[i] - A - B * lk;
            J[i][0] = Real(1);
            J[i][1] = lk;
            J[i][2] = -B * lk * log(L[i]);  // d/dk (A + B L^-k)
        }
        std::vector<Real> step = least_squares(J, r);
        A += step[0];
        B += step[1];
        kappa += step[2];
        Real sz = abs(step[0]) + abs(step[1]) + abs(step[2]);
        if (sz < Real("1e-25") * (Real(1) + abs(A) + abs(B) + abs(kappa))) {
            out.converged = true;
            break;
        }
        if (kappa < Real("0.01")) kappa = Real("0.01");
        if (kappa > Real(20)) kappa = Real(20);
    }
    out.A = A;
    out.B = B;
    out.kappa = kappa;
    return out;
}

ExpFit fit_exponential(const std::vector<Real>& L, const std::vector<Real>& y) {
    std::vector<Real> ly;
    ly.reserve(y.size());
    for (const auto& v : y) {
        if (v <= 0) throw std::domain_error("fit_exponential: non-positive value");
        ly.push_back(log(v));
    }
    LineFit f = fit_line(L, ly);
    return ExpFit{f.intercept, f.slope};
}

}  // namespace vpt
