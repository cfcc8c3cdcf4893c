#include "vaxsir/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vaxsir {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void require_domain(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error(msg);
}

} // namespace

ModelParams::ModelParams(double R0_, double v_, double h_, double epsilon_)
    : R0(R0_), v(v_), h(h_), epsilon(epsilon_) {
    require(std::isfinite(R0) && R0 > 0.0, "ModelParams: R0 must be positive");
    require(std::isfinite(v) && v >= 0.0, "ModelParams: v must be nonnegative");
    require(std::isfinite(h) && h >= 0.0, "ModelParams: h must be nonnegative");
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0,
            "ModelParams: epsilon must lie in (0,1)");
}

ModelParams nondimensionalize(const DimensionalParams& dp) {
    if (!(std::isfinite(dp.mu) && dp.mu > 0.0))
        throw std::invalid_argument("nondimensionalize: mu must be positive");
    if (!(std::isfinite(dp.gamma) && dp.gamma + dp.mu > 0.0))
        throw std::invalid_argument("nondimensionalize: gamma + mu must be positive");
    double fast = dp.gamma + dp.mu;
    return ModelParams(dp.beta / fast, dp.phi / dp.mu, dp.theta / dp.mu, dp.mu / fast);
}

AttitudePolicy AttitudePolicy::constant(double Sigma, double omega0) {
    require(std::isfinite(Sigma) && Sigma >= 0.0, "AttitudePolicy: Sigma must be nonnegative");
    require(std::isfinite(omega0) && omega0 >= 0.0 && omega0 <= Sigma,
            "AttitudePolicy: omega0 must lie in [0, Sigma]");
    return {PolicyFamily::constant, Sigma, 0.0, 0.0, omega0};
}

AttitudePolicy AttitudePolicy::monotone(double Sigma, double a) {
    require(std::isfinite(Sigma) && Sigma >= 0.0, "AttitudePolicy: Sigma must be nonnegative");
    require(std::isfinite(a) && a > 0.0, "AttitudePolicy: a must be positive");
    return {PolicyFamily::monotone_exp, Sigma, a, 0.0, 0.0};
}

AttitudePolicy AttitudePolicy::peaked(double Sigma, double a, double d) {
    require(std::isfinite(Sigma) && Sigma >= 0.0, "AttitudePolicy: Sigma must be nonnegative");
    require(std::isfinite(a) && a > 0.0, "AttitudePolicy: a must be positive");
    require(std::isfinite(d) && d > 0.0 && d <= 1.0,
            "AttitudePolicy: d must lie in (0,1]");
    return {PolicyFamily::peaked, Sigma, a, d, 0.0};
}

double AttitudePolicy::omega_unchecked(double Y) const {
    switch (family) {
        case PolicyFamily::constant: return omega0;
        case PolicyFamily::monotone_exp: return Sigma * (1.0 - std::exp(-a * Y));
        case PolicyFamily::peaked: return Sigma * d * a * Y * std::exp(1.0 - a * Y);
    }
    return 0.0;
}

double AttitudePolicy::omega(double Y) const {
    require_domain(Y >= 0.0, "AttitudePolicy::omega: Y must be nonnegative");
    return omega_unchecked(Y);
}

double AttitudePolicy::omega_prime_unchecked(double Y) const {
    switch (family) {
        case PolicyFamily::constant: return 0.0;
        case PolicyFamily::monotone_exp: return Sigma * a * std::exp(-a * Y);
        case PolicyFamily::peaked: return Sigma * d * a * std::exp(1.0 - a * Y) * (1.0 - a * Y);
    }
    return 0.0;
}

double AttitudePolicy::omega_prime(double Y) const {
    require_domain(Y >= 0.0, "AttitudePolicy::omega_prime: Y must be nonnegative");
    return omega_prime_unchecked(Y);
}

double AttitudePolicy::psi(double Y) const {
    double w = omega(Y);
    double p = Sigma - w;
    /* omega can exceed Sigma by roundoff near its peak; clamp tiny negatives. */
    if (p < 0.0 && p > -1e-12) p = 0.0;
    require_domain(p >= 0.0, "AttitudePolicy::psi: omega exceeds Sigma");
    return p;
}

double AttitudePolicy::psi_prime(double Y) const {
    return -omega_prime(Y);
}

std::string AttitudePolicy::family_name() const {
    switch (family) {
        case PolicyFamily::constant: return "constant";
        case PolicyFamily::monotone_exp: return "monotone_exp";
        case PolicyFamily::peaked: return "peaked";
    }
    return "?";
}

Groupings grouped(const ModelParams& mp, const AttitudePolicy& pol, double Y) {
    Groupings g;
    g.Sigma_bar = pol.sigma(Y) + 1.0;
    g.zeta = g.Sigma_bar + mp.v;
    g.eta = g.Sigma_bar + mp.h;
    g.xi = g.Sigma_bar + mp.h * (pol.psi(Y) + 1.0);
    g.rho = g.Sigma_bar * (mp.v + mp.r() * mp.h) + mp.R0 * mp.h * mp.v;
    g.chi = g.zeta + mp.R0 * Y;
    return g;
}

std::array<double, 6> rhs_unchecked(const ModelParams& mp, const AttitudePolicy& pol,
                                    const std::array<double, 6>& s) {
    const double Y = s[0], Z = s[1], S = s[2], P = s[3], R = s[4], X = s[5];
    const double G = mp.gamma_scale();
    const double w = pol.omega_unchecked(Y);
    const double psi = pol.Sigma - w;
    const double zeta = pol.Sigma + 1.0 + mp.v;
    const double eta = pol.Sigma + 1.0 + mp.h;
    const double one_m_eps = 1.0 - mp.epsilon;
    return {
        G * ((mp.R0 * S - 1.0) * Y),
        G * (mp.R0 * P * Y - Z),
        1.0 - S - mp.v * P + mp.h * X - mp.R0 * S * Y,
        w * S - zeta * P - mp.R0 * P * Y,
        one_m_eps * Y + mp.v * P - R - mp.h * X,
        one_m_eps * (Y - Z) + psi * R - eta * X,
    };
}

std::array<double, 6> rhs_scaled(const ModelParams& mp, const AttitudePolicy& pol,
                                 const ScaledState& s) {
    auto arr = s.to_array();
    for (double c : arr)
        require_domain(std::isfinite(c) && c >= 0.0,
                       "rhs_scaled: state must be finite and nonnegative");
    return rhs_unchecked(mp, pol, arr);
}

std::array<double, 36> rhs_jacobian(const ModelParams& mp, const AttitudePolicy& pol,
                                    const std::array<double, 6>& s) {
    const double Y = s[0], S = s[2], P = s[3], R = s[4], X = s[5];
    const double G = mp.gamma_scale();
    const double w = pol.omega_unchecked(Y);
    const double wp = pol.omega_prime_unchecked(Y);
    const double psip = -wp;
    const double zeta = pol.Sigma + 1.0 + mp.v;
    const double eta = pol.Sigma + 1.0 + mp.h;
    const double psi = pol.Sigma - w;
    const double one_m_eps = 1.0 - mp.epsilon;

    std::array<double, 36> J{};
    auto at = [&J](int i, int j) -> double& { return J[6 * i + j]; };

    at(0, 0) = G * (mp.R0 * S - 1.0);
    at(0, 2) = G * mp.R0 * Y;

    at(1, 0) = G * mp.R0 * P;
    at(1, 1) = -G;
    at(1, 3) = G * mp.R0 * Y;

    at(2, 0) = -mp.R0 * S;
    at(2, 2) = -1.0 - mp.R0 * Y;
    at(2, 3) = -mp.v;
    at(2, 5) = mp.h;

    at(3, 0) = wp * S - mp.R0 * P;
    at(3, 2) = w;
    at(3, 3) = -zeta - mp.R0 * Y;

    at(4, 0) = one_m_eps;
    at(4, 3) = mp.v;
    at(4, 4) = -1.0;
    at(4, 5) = -mp.h;

    at(5, 0) = one_m_eps + psip * R;
    at(5, 1) = -one_m_eps;
    at(5, 4) = psi;
    at(5, 5) = -eta;

    return J;
}

double conservation_defect(const ModelParams& mp, const ScaledState& s) {
    return s.S + mp.epsilon * s.Y + s.R - 1.0;
}

double attitude_aggregate(const ModelParams& mp, const ScaledState& s) {
    return (s.S - s.P) + mp.epsilon * (s.Y - s.Z) + s.X;
}

void check_initial_state(const ScaledState& s) {
    auto arr = s.to_array();
    static const char* names[6] = {"Y", "Z", "S", "P", "R", "X"};
    for (int i = 0; i < 6; ++i) {
        if (!std::isfinite(arr[i]))
            throw std::invalid_argument(std::string("initial state: ") + names[i] +
                                        " is not finite");
        if (arr[i] < 0.0)
            throw std::invalid_argument(std::string("initial state: ") + names[i] +
                                        " is negative");
    }
    if (s.Z > s.Y) throw std::invalid_argument("initial state: Z must not exceed Y");
    if (s.S > 1.0) throw std::invalid_argument("initial state: S must not exceed 1");
    if (s.P > s.S) throw std::invalid_argument("initial state: P must not exceed S");
    if (s.R > 1.0) throw std::invalid_argument("initial state: R must not exceed 1");
    if (s.X > s.R) throw std::invalid_argument("initial state: X must not exceed R");
}

} // namespace vaxsir
