#include "vaxsir/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vaxsir/equilibria.hpp"

namespace vaxsir {

double det_lu(const Mat& A) {
    int n = A.n;
    std::array<double, 64> a = A.a;
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a[n * k + k]);
        for (int i = k + 1; i < n; ++i) {
            double cand = std::abs(a[n * i + k]);
            if (cand > best) { best = cand; piv = i; }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a[n * k + j], a[n * piv + j]);
            det = -det;
        }
        double pivval = a[n * k + k];
        det *= pivval;
        for (int i = k + 1; i < n; ++i) {
            double f = a[n * i + k] / pivval;
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a[n * i + j] -= f * a[n * k + j];
        }
    }
    return det;
}

Poly charpoly_via_minors(const Mat& A) {
    int n = A.n;
    if (n < 1 || n > 8)
        throw std::invalid_argument("charpoly_via_minors: order must lie in [1,8]");
    std::array<double, 9> sums{};
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        int idx[8], m = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) idx[m++] = i;
        Mat sub;
        sub.n = m;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sub.at(i, j) = A.at(idx[i], idx[j]);
        sums[m] += det_lu(sub);
    }
    Poly p;
    p.n = n;
    p.c[0] = 1.0;
    double sign = -1.0;
    for (int m = 1; m <= n; ++m) {
        p.c[m] = sign * sums[m];
        sign = -sign;
    }
    return p;
}

StabilityVerdict routh_verdict(const Poly& p) {
    int n = p.n;
    StabilityVerdict v;
    v.method = VerdictMethod::routh;
    if (n < 1 || n > 8)
        throw std::invalid_argument("routh_verdict: degree must lie in [1,8]");
    if (p.c[0] != 1.0)
        throw std::invalid_argument("routh_verdict: polynomial must be monic");

    int width = n / 2 + 1;
    std::vector<std::vector<double>> rows(n + 1, std::vector<double>(width + 1, 0.0));
    for (int j = 0; 2 * j <= n; ++j) rows[0][j] = p.c[2 * j];
    for (int j = 0; 2 * j + 1 <= n; ++j) rows[1][j] = p.c[2 * j + 1];

    for (int i = 2; i <= n; ++i) {
        double pivot = rows[i - 1][0];
        double scale = 0.0;
        for (double e : rows[i - 1]) scale = std::max(scale, std::abs(e));
        if (pivot == 0.0) {
            pivot = 1e-30;
            rows[i - 1][0] = pivot;
            v.boundary = true;
        } else if (std::abs(pivot) < 1e-12 * scale) {
            v.boundary = true;
        }
        for (int j = 0; j + 1 <= width; ++j)
            rows[i][j] = (pivot * rows[i - 2][j + 1] - rows[i - 2][0] * rows[i - 1][j + 1]) / pivot;
    }

    v.stable = true;
    for (int i = 0; i <= n; ++i) {
        v.margins.push_back(rows[i][0]);
        if (!(rows[i][0] > 0.0)) v.stable = false;
    }
    return v;
}

StabilityVerdict eigen_verdict(const Mat& A) {
    Poly p = charpoly_via_minors(A);
    auto roots = polyroots(p);
    double max_re = -std::numeric_limits<double>::infinity();
    for (auto& z : roots) max_re = std::max(max_re, z.real());
    StabilityVerdict v;
    v.method = VerdictMethod::eigenvalue;
    v.stable = max_re < 0.0;
    v.boundary = std::abs(max_re) < tol::eigen_boundary;
    v.margins = {-max_re};
    return v;
}

Mat jacobian_dfe(const ModelParams& mp, const AttitudePolicy& pol) {
    EquilibriumRecord rec = dfe_state(mp, pol);
    Mat J;
    J.n = 6;
    auto arr = rhs_jacobian(mp, pol, rec.state.to_array());
    for (int i = 0; i < 36; ++i) J.a[i] = arr[i];
    return J;
}

Mat jacobian_ede(const ModelParams& mp, const AttitudePolicy& pol, double Y) {
    double g = pol.omega(Y) - omega_star(mp, pol.Sigma, mp.R0 * Y);
    if (std::abs(g) > tol::equilibrium)
        throw NotAnEquilibrium("jacobian_ede: Y is not an endemic equilibrium");
    ScaledState s = ede_state(mp, pol, Y);
    Mat J;
    J.n = 6;
    auto arr = rhs_jacobian(mp, pol, s.to_array());
    for (int i = 0; i < 36; ++i) J.a[i] = arr[i];
    return J;
}

StabilityVerdict dfe_stability(const ModelParams& mp, const AttitudePolicy& pol) {
    double Rv = reproduction_number(mp, pol);

    /* The slow 4x4 factor of the DFE spectrum is (lambda+1) times a cubic
     * with c1*c2 > c3, so it never destabilizes; verify the coefficients. */
    Groupings g = grouped(mp, pol, 0.0);
    double w0 = pol.omega(0.0), psi0 = pol.psi(0.0);
    double zbar = g.zeta + 1.0;
    double c1 = g.eta + zbar;
    double c2 = g.zeta + g.eta * zbar + mp.v * w0 + mp.h * psi0;
    double c3 = g.eta * g.zeta + mp.v * w0 * g.eta + mp.h * psi0 * g.zeta;
    if (!(c1 * c2 > c3))
        throw std::logic_error("dfe_stability: slow cubic lost its Hurwitz property");

    StabilityVerdict v;
    v.method = VerdictMethod::dfe_threshold;
    v.stable = Rv < 1.0;
    v.boundary = std::abs(1.0 - Rv) < tol::dfe_boundary;
    v.margins = {1.0 - Rv};
    return v;
}

namespace {

void check_chain(double lhs, double rhs, const char* what) {
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (std::abs(lhs - rhs) > tol::chain_identity * scale)
        throw std::logic_error(std::string("ede_chain: identity failed: ") + what);
}

} // namespace

CriteriaChain ede_chain(const ModelParams& mp, const AttitudePolicy& pol, double Y) {
    if (!(Y > 0.0))
        throw std::domain_error("ede_chain: Y must be positive");
    const double y = mp.R0 * Y;
    const double Sigma = pol.Sigma;
    const double Sigma_bar = Sigma + 1.0;
    const double zeta = Sigma_bar + mp.v;
    const double eta = Sigma_bar + mp.h;
    const double chi = zeta + y;
    const double r = mp.r();
    const double rho = Sigma_bar * (mp.v + r * mp.h) + mp.R0 * mp.h * mp.v;

    CriteriaChain c{};
    c.y = y;
    c.p = p_of_y(mp, Sigma, y);
    c.x = r + c.p - mp.R0 * chi * c.p / Sigma_bar;

    const double wp = pol.omega_prime(Y);
    const double psip = pol.psi_prime(Y);
    c.A = wp / mp.R0 - c.p;
    c.B = 1.0 + (r / mp.R0) * psip;

    c.w1 = mp.h * (1.0 - c.p) + mp.v * c.p + y + 1.0;
    c.w2 = chi - (mp.v - mp.h) * c.p;

    c.k2 = (chi + 1.0) + (eta + 1.0) + 2.0 * y;
    c.k4 = (mp.v * c.A - mp.h * c.B + (chi + mp.h * c.p + eta + 1.0)) * y;
    c.k6 = ((mp.v * eta + mp.h * y) * c.A - mp.h * chi * c.B + chi * (mp.h * c.p + eta)) * y;
    c.k5 = c.k4 + c.k6 - y;

    c.q1 = c.k2 - y;
    c.q2 = y * c.q1 - c.k4;
    c.q3 = c.k5 * c.q1 - c.k6;
    c.q4 = (c.k4 * c.q3 - c.k6 * c.q2) / c.q1;

    check_chain(c.q4, (c.k4 + c.k6) * (c.k4 - y), "q4 = (k4+k6)(k4-y)");
    check_chain(c.q4, c.k4 * c.k5 - y * c.k6, "q4 = k4*k5 - y*k6");

    /* Margins through the chain, cross-checked against the direct forms. */
    c.m1 = mp.R0 * c.q2 / y;
    c.m2 = mp.R0 * (c.k4 - y) / y;
    c.m3 = mp.R0 * c.k6 / y;
    check_chain(c.m1, mp.R0 * c.w1 - (mp.v * wp - mp.h * r * psip), "m1 direct form");
    check_chain(c.m2, mp.R0 * (Sigma_bar + c.w2) + (mp.v * wp - mp.h * r * psip),
                "m2 direct form");
    check_chain(c.m3,
                mp.R0 * Sigma_bar * c.w2 + ((mp.v * eta + mp.h * y) * wp - r * mp.h * chi * psip),
                "m3 direct form");
    check_chain(c.w2, (kappa(mp, Sigma) + 2.0 * rho * y + mp.R0 * mp.h * y * y) /
                          (rho + mp.R0 * mp.h * y),
                "w2 rational form");

    return c;
}

StabilityVerdict asymptotic_ede_criteria(const ModelParams& mp, const AttitudePolicy& pol,
                                         double Y) {
    double g = pol.omega(Y) - omega_star(mp, pol.Sigma, mp.R0 * Y);
    if (std::abs(g) > tol::equilibrium)
        throw NotAnEquilibrium("asymptotic_ede_criteria: Y is not an endemic equilibrium");
    CriteriaChain c = ede_chain(mp, pol, Y);
    StabilityVerdict v;
    v.method = VerdictMethod::asymptotic;
    v.stable = c.m1 > 0.0 && c.m2 > 0.0 && c.m3 > 0.0;
    v.margins = {c.m1, c.m2, c.m3};
    /* Boundary test in slope units so the 0.05 tolerance is comparable
     * across the three inequalities. */
    double rho_y = (pol.Sigma + 1.0) * (mp.v + mp.r() * mp.h) + mp.R0 * mp.h * mp.v +
                   mp.R0 * mp.h * c.y;
    double scale12 = mp.v + mp.r() * mp.h;
    double nm1 = c.m1 / scale12;
    double nm2 = c.m2 / scale12;
    double nm3 = c.m3 / rho_y;
    v.boundary = std::min({std::abs(nm1), std::abs(nm2), std::abs(nm3)}) < tol::boundary_margin;
    return v;
}

StabilityVerdict simplified_criterion(const ModelParams& mp, const AttitudePolicy& pol,
                                      double Y) {
    if (pol.sigma_prime(Y) != 0.0)
        throw std::invalid_argument("simplified_criterion: requires constant total rate Sigma");
    double y = mp.R0 * Y;
    double g = pol.omega(Y) - omega_star(mp, pol.Sigma, y);
    if (std::abs(g) > tol::equilibrium)
        throw NotAnEquilibrium("simplified_criterion: Y is not an endemic equilibrium");
    double wp = pol.omega_prime(Y);
    double lower = wp - mp.R0 * omega_star_prime(mp, pol.Sigma, y);
    double upper = mp.R0 * upsilon1(mp, pol.Sigma, y) - wp;
    StabilityVerdict v;
    v.method = VerdictMethod::simplified;
    v.stable = lower > 0.0 && upper > 0.0;
    v.boundary = std::min(std::abs(lower), std::abs(upper)) < tol::boundary_margin;
    v.margins = {lower, upper};
    return v;
}

double upsilon1(const ModelParams& mp, double Sigma, double y) {
    double denom = mp.v + mp.r() * mp.h;
    if (denom <= 0.0)
        throw std::domain_error("upsilon1: v + r*h must be positive");
    double p = p_of_y(mp, Sigma, y);
    double w1 = mp.h * (1.0 - p) + mp.v * p + y + 1.0;
    return w1 / denom;
}

double upsilon2(const ModelParams& mp, double Sigma, double y) {
    double denom = mp.v + mp.r() * mp.h;
    if (denom <= 0.0)
        throw std::domain_error("upsilon2: v + r*h must be positive");
    double p = p_of_y(mp, Sigma, y);
    double Sigma_bar = Sigma + 1.0;
    double zeta = Sigma_bar + mp.v;
    double w2 = (zeta + y) - (mp.v - mp.h) * p;
    return (Sigma_bar + w2) / denom;
}

double upsilon3(const ModelParams& mp, double Sigma, double y) {
    return -omega_star_prime(mp, Sigma, y);
}

} // namespace vaxsir
