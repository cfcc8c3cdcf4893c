#include "vaxsir/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vaxsir {

namespace {

struct BranchParams {
    double Sigma_bar, zeta, rho;
};

BranchParams branch(const ModelParams& mp, double Sigma) {
    BranchParams b;
    b.Sigma_bar = Sigma + 1.0;
    b.zeta = b.Sigma_bar + mp.v;
    b.rho = b.Sigma_bar * (mp.v + mp.r() * mp.h) + mp.R0 * mp.h * mp.v;
    return b;
}

/* Brent's method on a sign-changing bracket; stops when |f| <= ftol or the
 * bracket collapses to machine width. */
template <typename F>
double brent_root(F f, double a, double b, double fa, double fb, double ftol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::logic_error("brent_root: bracket does not straddle a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5e-15;
        double m = 0.5 * (c - b);
        if (std::abs(fb) <= ftol || std::abs(m) <= tol) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;
        } else {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                double r = fb / fc, t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                q = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; e = d = b - a; }
    }
    return b;
}

} // namespace

double reproduction_number(const ModelParams& mp, const AttitudePolicy& pol) {
    Groupings g = grouped(mp, pol, 0.0);
    double w0 = pol.omega(0.0);
    return mp.R0 * (g.zeta * g.xi) / (g.zeta * g.xi + mp.v * w0 * g.eta);
}

double omega_cr(const ModelParams& mp, double Sigma) {
    BranchParams b = branch(mp, Sigma);
    if (b.rho <= 0.0)
        throw std::domain_error("omega_cr: rho vanishes (v = 0 with r*h = 0)");
    return mp.r() * mp.hbar() * b.Sigma_bar * b.zeta / b.rho;
}

double omega_cr(const ModelParams& mp, const AttitudePolicy& pol) {
    return omega_cr(mp, pol.sigma(0.0));
}

EquilibriumRecord dfe_state(const ModelParams& mp, const AttitudePolicy& pol) {
    Groupings g = grouped(mp, pol, 0.0);
    double w0 = pol.omega(0.0);
    double psi0 = pol.psi(0.0);
    double S = g.zeta * g.xi / (g.zeta * g.xi + mp.v * w0 * g.eta);
    double R = 1.0 - S;
    ScaledState s{0.0, 0.0, S, (w0 / g.zeta) * S, R, (psi0 / g.eta) * R};
    auto f = rhs_scaled(mp, pol, s);
    double res = 0.0;
    for (double c : f) res = std::max(res, std::abs(c));
    return {EquilibriumKind::DFE, 0.0, s, res, 0.0, 0.0};
}

double p_of_y(const ModelParams& mp, double Sigma, double y) {
    double ymax = mp.r() * mp.hbar();
    if (y < 0.0 || y > ymax)
        throw std::domain_error("p_of_y: y must lie in [0, r*hbar]");
    BranchParams b = branch(mp, Sigma);
    double den = b.rho + mp.R0 * mp.h * y;
    if (den <= 0.0)
        throw std::domain_error("p_of_y: degenerate denominator (v = 0 with h = 0)");
    return b.Sigma_bar * (ymax - y) / den;
}

double omega_star(const ModelParams& mp, double Sigma, double y) {
    BranchParams b = branch(mp, Sigma);
    return (b.zeta + y) * p_of_y(mp, Sigma, y);
}

double omega_star_prime(const ModelParams& mp, double Sigma, double y) {
    double ymax = mp.r() * mp.hbar();
    if (y < 0.0 || y > ymax)
        throw std::domain_error("omega_star_prime: y must lie in [0, r*hbar]");
    BranchParams b = branch(mp, Sigma);
    double den = b.rho + mp.R0 * mp.h * y;
    if (den <= 0.0)
        throw std::domain_error("omega_star_prime: degenerate denominator");
    double k = kappa(mp, Sigma);
    return -b.Sigma_bar * (k + 2.0 * b.rho * y + mp.R0 * mp.h * y * y) / (den * den);
}

double kappa(const ModelParams& mp, double Sigma) {
    BranchParams b = branch(mp, Sigma);
    return b.zeta * b.rho - b.Sigma_bar * mp.r() * mp.hbar() * (mp.v - mp.h);
}

double y_max(const ModelParams& mp) {
    return (1.0 - 1.0 / mp.R0) * mp.hbar();
}

EdeScan find_ede_roots(const ModelParams& mp, const AttitudePolicy& pol, int grid_n) {
    if (grid_n < 64)
        throw std::invalid_argument("find_ede_roots: grid_n must be at least 64");
    EdeScan scan;
    scan.near_zero_root = false;
    double Ymax = y_max(mp);
    if (Ymax <= 0.0) return scan;

    auto g = [&](double Y) {
        return pol.omega(Y) - omega_star(mp, pol.Sigma, mp.R0 * Y);
    };

    /* Virtual endpoints just inside the open interval keep the policy and
     * branch evaluations in-domain while still bracketing roots that hug
     * either end. */
    std::vector<double> Ys(grid_n + 2);
    std::vector<double> gs(grid_n + 2);
    Ys.front() = Ymax * 1e-12;
    Ys.back() = Ymax * (1.0 - 1e-12);
    for (int i = 1; i <= grid_n; ++i) Ys[i] = Ymax * i / (grid_n + 1.0);
    double gmax = 0.0;
    for (size_t i = 0; i < Ys.size(); ++i) {
        gs[i] = g(Ys[i]);
        gmax = std::max(gmax, std::abs(gs[i]));
    }

    const double ftol = 1e-12;
    for (size_t i = 0; i + 1 < Ys.size(); ++i) {
        double root, blo = Ys[i], bhi = Ys[i + 1];
        if (gs[i] == 0.0) {
            root = Ys[i];
            blo = bhi = Ys[i];
        } else if (gs[i] * gs[i + 1] < 0.0) {
            root = brent_root(g, Ys[i], Ys[i + 1], gs[i], gs[i + 1], ftol);
        } else {
            continue;
        }
        if (root < 1e-9) {
            scan.near_zero_root = true;
            continue;
        }
        EquilibriumRecord rec = ede_record(mp, pol, root);
        rec.bracket_lo = blo;
        rec.bracket_hi = bhi;
        scan.roots.push_back(rec);
    }
    if (gs.back() == 0.0) {
        EquilibriumRecord rec = ede_record(mp, pol, Ys.back());
        rec.bracket_lo = rec.bracket_hi = Ys.back();
        scan.roots.push_back(rec);
    }

    for (size_t i = 1; i + 1 < Ys.size(); ++i) {
        double ai = std::abs(gs[i]);
        if (gs[i - 1] * gs[i] > 0.0 && gs[i] * gs[i + 1] > 0.0 &&
            ai < std::abs(gs[i - 1]) && ai < std::abs(gs[i + 1]) &&
            ai < 1e-3 * gmax) {
            scan.suspect_Y.push_back(Ys[i]);
        }
    }

    std::sort(scan.roots.begin(), scan.roots.end(),
              [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
                  return a.Y < b.Y;
              });
    return scan;
}

ScaledState ede_state(const ModelParams& mp, const AttitudePolicy& pol, double Y) {
    double Ymax = y_max(mp);
    if (!(Y > 0.0 && Y < Ymax))
        throw std::domain_error("ede_state: Y must lie in (0, Y_max)");
    double y = mp.R0 * Y;
    double Sigma = pol.Sigma;
    BranchParams b = branch(mp, Sigma);
    double p = p_of_y(mp, Sigma, y);
    double chi = b.zeta + y;
    double x = mp.r() + p - mp.R0 * chi * p / b.Sigma_bar;
    double S = 1.0 / mp.R0;
    return {Y, y * p / mp.R0, S, p / mp.R0, mp.r() / mp.R0, x / mp.R0};
}

EquilibriumRecord ede_record(const ModelParams& mp, const AttitudePolicy& pol, double Y) {
    ScaledState s = ede_state(mp, pol, Y);
    Groupings g = grouped(mp, pol, Y);
    /* Slow-equation residuals of the epsilon-free system; the S, R, X
     * balances hold by construction, the P balance carries the root error. */
    double r3 = 1.0 - s.S - mp.v * s.P + mp.h * s.X - mp.R0 * s.S * Y;
    double r4 = pol.omega(Y) * s.S - g.zeta * s.P - mp.R0 * s.P * Y;
    double r5 = Y + mp.v * s.P - s.R - mp.h * s.X;
    double r6 = (Y - s.Z) + pol.psi(Y) * s.R - g.eta * s.X;
    double res = std::max(std::max(std::abs(r3), std::abs(r4)),
                          std::max(std::abs(r5), std::abs(r6)));
    return {EquilibriumKind::EDE, Y, s, res, 0.0, 0.0};
}

EquilibriumRecord ede_refined(const ModelParams& mp, const AttitudePolicy& pol,
                              double Y_leading) {
    double Ymax = y_max(mp);
    if (!(Y_leading > 0.0 && Y_leading < Ymax))
        throw std::domain_error("ede_refined: Y must lie in (0, Y_max)");
    const double S = 1.0 / mp.R0;
    const double eps = mp.epsilon;

    auto P_of = [&](double Y) {
        double zeta = pol.Sigma + 1.0 + mp.v;
        return pol.omega(Y) * S / (zeta + mp.R0 * Y);
    };
    /* Scalar equilibrium condition in Y after eliminating R and X. */
    auto F = [&](double Y) {
        double P = P_of(Y);
        double Z = mp.R0 * P * Y;
        double eta = pol.Sigma + 1.0 + mp.h;
        if (mp.h > 0.0) {
            double X = (Y - (1.0 - S) + mp.v * P) / mp.h;
            double R = (1.0 - eps) * Y + mp.v * P - mp.h * X;
            return (1.0 - eps) * (Y - Z) + pol.psi(Y) * R - eta * X;
        }
        /* h = 0: the S balance itself closes the Y equation. */
        return 1.0 - S - mp.v * P - Y;
    };

    double f0 = F(Y_leading);
    double step = std::max(1e-8, 64.0 * eps * std::max(1.0, Y_leading));
    double lo = Y_leading, hi = Y_leading, flo = f0, fhi = f0;
    for (int k = 0; k < 60 && flo * fhi > 0.0; ++k) {
        lo = std::max(Y_leading - (k + 1) * step, 1e-12);
        hi = std::min(Y_leading + (k + 1) * step, Ymax * (1.0 - 1e-12));
        flo = F(lo);
        fhi = F(hi);
    }
    double Yr = Y_leading;
    if (flo * fhi <= 0.0) Yr = brent_root(F, lo, hi, flo, fhi, 1e-15);

    double P = P_of(Yr);
    double Z = mp.R0 * P * Yr;
    double eta = pol.Sigma + 1.0 + mp.h;
    double R, X;
    if (mp.h > 0.0) {
        X = (Yr - (1.0 - S) + mp.v * P) / mp.h;
        R = (1.0 - eps) * Yr + mp.v * P - mp.h * X;
    } else {
        R = (1.0 - eps) * Yr + mp.v * P;
        X = ((1.0 - eps) * (Yr - Z) + pol.psi(Yr) * R) / eta;
    }
    ScaledState s{Yr, Z, S, P, R, X};
    auto f = rhs_scaled(mp, pol, s);
    double res = 0.0;
    for (double c : f) res = std::max(res, std::abs(c));
    return {EquilibriumKind::EDE, Yr, s, res, 0.0, 0.0};
}

} // namespace vaxsir
