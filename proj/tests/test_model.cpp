#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "testutil.hpp"
#include "vaxsir/model.hpp"

using namespace vaxsir;
using testutil::rel_close;

TEST_CASE("parameter validation rejects out-of-range inputs") {
    CHECK_THROWS_AS(ModelParams(0.0, 50, 10, 5e-4), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(-1.0, 50, 10, 5e-4), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(4, -0.1, 10, 5e-4), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(4, 50, -0.1, 5e-4), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(4, 50, 10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(4, 50, 10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(4, 50, 10, std::nan("")), std::invalid_argument);

    ModelParams mp(4, 50, 10, 5e-4);
    CHECK(mp.r() == doctest::Approx(3.0));
    CHECK(mp.hbar() == doctest::Approx(11.0));
    CHECK(mp.gamma_scale() == doctest::Approx(2000.0));
}

TEST_CASE("nondimensionalization follows the rate ratios") {
    DimensionalParams dp{0.8, 0.1, 0.002, 0.0002, 0.01};
    ModelParams mp = nondimensionalize(dp);
    double fast = dp.gamma + dp.mu;
    CHECK(mp.R0 == doctest::Approx(dp.beta / fast).epsilon(1e-14));
    CHECK(mp.v == doctest::Approx(dp.phi / dp.mu).epsilon(1e-14));
    CHECK(mp.h == doctest::Approx(dp.theta / dp.mu).epsilon(1e-14));
    CHECK(mp.epsilon == doctest::Approx(dp.mu / fast).epsilon(1e-14));

    CHECK_THROWS_AS(nondimensionalize({0.8, 0.1, 0.002, 0.0, 0.01}), std::invalid_argument);
    CHECK_THROWS_AS(nondimensionalize({0.8, -0.2, 0.002, 0.0002, 0.01}),
                    std::invalid_argument);
    /* beta = 0 gives R0 = 0, rejected downstream by ModelParams. */
    CHECK_THROWS_AS(nondimensionalize({0.0, 0.1, 0.002, 0.0002, 0.01}),
                    std::invalid_argument);
}

TEST_CASE("policy factories validate their parameters") {
    CHECK_THROWS_AS(AttitudePolicy::constant(5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::constant(5, 5.1), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::constant(-1, 0), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::monotone(5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::monotone(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::peaked(5, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::peaked(5, 1.0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(AttitudePolicy::peaked(5, -1.0, 0.5), std::invalid_argument);

    CHECK(AttitudePolicy::constant(5, 5).family_name() == "constant");
    CHECK(AttitudePolicy::monotone(5, 1).family_name() == "monotone_exp");
    CHECK(AttitudePolicy::peaked(5, 1, 0.5).family_name() == "peaked");
}

TEST_CASE("policy values match their closed forms") {
    auto cst = AttitudePolicy::constant(5, 2.5);
    CHECK(cst.omega(0.0) == doctest::Approx(2.5));
    CHECK(cst.omega(7.3) == doctest::Approx(2.5));
    CHECK(cst.omega_prime(7.3) == 0.0);
    CHECK(cst.psi(7.3) == doctest::Approx(2.5));

    auto mon = AttitudePolicy::monotone(5, 1.2);
    CHECK(mon.omega(0.0) == 0.0);
    CHECK(mon.omega_prime(0.0) == doctest::Approx(5 * 1.2));
    CHECK(mon.omega(2.0) == doctest::Approx(5 * (1 - std::exp(-2.4))).epsilon(1e-14));
    /* saturates at Sigma */
    CHECK(mon.omega(50.0) == doctest::Approx(5.0).epsilon(1e-12));

    auto pk = AttitudePolicy::peaked(10, 0.6, 0.73);
    /* maximum Sigma*d at aY = 1, zero slope there */
    double Ypk = 1.0 / 0.6;
    CHECK(pk.omega(Ypk) == doctest::Approx(10 * 0.73).epsilon(1e-14));
    CHECK(pk.omega_prime(Ypk) == doctest::Approx(0.0));
    CHECK(pk.omega(0.0) == 0.0);
    CHECK(pk.omega(3.0) ==
          doctest::Approx(10 * 0.73 * 0.6 * 3.0 * std::exp(1 - 1.8)).epsilon(1e-14));
}

TEST_CASE("psi is the exact complement and its slope mirrors omega") {
    testutil::Rng rng(71);
    auto mon = AttitudePolicy::monotone(5, 1.2);
    auto pk = AttitudePolicy::peaked(10, 0.6, 1.0);
    for (int i = 0; i < 200; ++i) {
        double Y = rng.uniform(0.0, 8.0);
        for (const auto& pol : {mon, pk}) {
            CHECK(pol.psi(Y) + pol.omega(Y) == doctest::Approx(pol.Sigma).epsilon(1e-13));
            CHECK(pol.psi(Y) >= 0.0);
            CHECK(pol.psi_prime(Y) == -pol.omega_prime(Y));
            CHECK(pol.sigma_prime(Y) == 0.0);
        }
    }
    /* d = 1 puts the peak exactly at Sigma; psi there is zero, not negative */
    CHECK(pk.psi(1.0 / 0.6) == 0.0);
}

TEST_CASE("policy slopes agree with finite differences") {
    testutil::Rng rng(72);
    auto mon = AttitudePolicy::monotone(5, 1.2);
    auto pk = AttitudePolicy::peaked(10, 0.6, 0.73);
    for (int i = 0; i < 200; ++i) {
        double Y = rng.uniform(0.01, 8.0);
        for (const auto& pol : {mon, pk}) {
            double step = 1e-6 * std::max(1.0, Y);
            double fd = (pol.omega(Y + step) - pol.omega(Y - step)) / (2 * step);
            CHECK(rel_close(pol.omega_prime(Y), fd, 1e-7));
        }
    }
}

TEST_CASE("negative prevalence is rejected by the checked policy calls") {
    auto pk = AttitudePolicy::peaked(10, 0.6, 0.73);
    CHECK_THROWS_AS(pk.omega(-0.1), std::domain_error);
    CHECK_THROWS_AS(pk.omega_prime(-0.1), std::domain_error);
    CHECK_THROWS_AS(pk.psi(-0.1), std::domain_error);
    CHECK_THROWS_AS(pk.psi_prime(-0.1), std::domain_error);
    /* unchecked variant continues smoothly */
    CHECK(std::isfinite(pk.omega_unchecked(-0.1)));
    CHECK(pk.omega_unchecked(-0.1) < 0.0);
}

TEST_CASE("parameter groupings at a frozen parameter point") {
    ModelParams mp(4, 50, 10, 5e-4);
    auto mon = AttitudePolicy::monotone(5, 1.0);
    Groupings g = grouped(mp, mon, 0.0);
    CHECK(g.Sigma_bar == doctest::Approx(6.0));
    CHECK(g.zeta == doctest::Approx(56.0));
    CHECK(g.eta == doctest::Approx(16.0));
    /* psi(0) = Sigma for the monotone family */
    CHECK(g.xi == doctest::Approx(6.0 + 10.0 * 6.0));
    CHECK(g.rho == doctest::Approx(6.0 * (50 + 3 * 10) + 4.0 * 10 * 50));
    CHECK(grouped(mp, mon, 1.0).chi == doctest::Approx(60.0));
}

TEST_CASE("right-hand side matches the component equations") {
    ModelParams mp(4, 50, 10, 5e-4);
    auto pol = AttitudePolicy::peaked(10, 0.6, 0.73);
    ScaledState s{5, 0.05, 0.25, 0.01, 0.75, 0.44};
    auto f = rhs_scaled(mp, pol, s);
    double G = 1.0 / mp.epsilon;
    double w = pol.omega(s.Y), ps = pol.psi(s.Y);
    double zeta = pol.Sigma + 1 + mp.v, eta = pol.Sigma + 1 + mp.h;
    CHECK(f[0] == doctest::Approx(G * (mp.R0 * s.S - 1) * s.Y).epsilon(1e-13));
    CHECK(f[1] == doctest::Approx(G * (mp.R0 * s.P * s.Y - s.Z)).epsilon(1e-13));
    CHECK(f[2] ==
          doctest::Approx(1 - s.S - mp.v * s.P + mp.h * s.X - mp.R0 * s.S * s.Y)
              .epsilon(1e-13));
    CHECK(f[3] ==
          doctest::Approx(w * s.S - zeta * s.P - mp.R0 * s.P * s.Y).epsilon(1e-13));
    CHECK(f[4] ==
          doctest::Approx((1 - mp.epsilon) * s.Y + mp.v * s.P - s.R - mp.h * s.X)
              .epsilon(1e-13));
    CHECK(f[5] == doctest::Approx((1 - mp.epsilon) * (s.Y - s.Z) + ps * s.R - eta * s.X)
                      .epsilon(1e-13));
}

TEST_CASE("total population drives the right-hand side toward 1 - N") {
    testutil::Rng rng(73);
    ModelParams mp(4, 50, 10, 5e-4);
    auto pol = AttitudePolicy::monotone(5, 1.0);
    for (int i = 0; i < 100; ++i) {
        ScaledState s{rng.uniform(0, 6), rng.uniform(0, 1), rng.uniform(0, 1),
                      rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
        auto f = rhs_scaled(mp, pol, s);
        double Ndot = f[2] + mp.epsilon * f[0] + f[4];
        double N = s.S + mp.epsilon * s.Y + s.R;
        CHECK(rel_close(Ndot, 1.0 - N, 1e-12));
        CHECK(conservation_defect(mp, s) == doctest::Approx(N - 1.0).epsilon(1e-14));
    }
}

TEST_CASE("right-hand side rejects invalid states") {
    ModelParams mp(4, 50, 10, 5e-4);
    auto pol = AttitudePolicy::monotone(5, 1.0);
    CHECK_THROWS_AS(rhs_scaled(mp, pol, {-0.01, 0, 0.3, 0, 0.5, 0}), std::domain_error);
    CHECK_THROWS_AS(rhs_scaled(mp, pol, {1, -0.01, 0.3, 0, 0.5, 0}), std::domain_error);
    CHECK_THROWS_AS(rhs_scaled(mp, pol, {1, 0, std::nan(""), 0, 0.5, 0}),
                    std::domain_error);
    CHECK_NOTHROW(rhs_scaled(mp, pol, {0, 0, 0, 0, 0, 0}));
}

TEST_CASE("analytic Jacobian agrees with central differences") {
    testutil::Rng rng(74);
    ModelParams mp(4, 50, 10, 5e-4);
    auto mon = AttitudePolicy::monotone(5, 1.0);
    auto pk = AttitudePolicy::peaked(10, 0.6, 0.73);
    auto cst = AttitudePolicy::constant(5, 3.0);
    for (int i = 0; i < 50; ++i) {
        std::array<double, 6> s{rng.uniform(0, 6),  rng.uniform(0, 1), rng.uniform(0, 1),
                                rng.uniform(0, 1),  rng.uniform(0, 1), rng.uniform(0, 1)};
        for (const auto& pol : {mon, pk, cst}) {
            auto J = rhs_jacobian(mp, pol, s);
            auto F = testutil::fd_rhs_jacobian(mp, pol, s);
            for (int k = 0; k < 36; ++k) CHECK(rel_close(J[k], F[k], 1e-6));
        }
    }
}

TEST_CASE("attitude aggregate at a frozen state") {
    ModelParams mp(4, 50, 10, 5e-4);
    ScaledState s{5, 0.05, 0.25, 0.01, 0.75, 0.44};
    /* (S-P) + eps(Y-Z) + X = 0.24 + 5e-4*4.95 + 0.44 */
    CHECK(attitude_aggregate(mp, s) == doctest::Approx(0.682475).epsilon(1e-14));
}

TEST_CASE("initial-state checks enforce subclass ordering and bounds") {
    CHECK_NOTHROW(check_initial_state({5, 0.05, 0.25, 0.01, 0.75, 0.44}));
    CHECK_NOTHROW(check_initial_state({0, 0, 1, 0, 0, 0}));
    CHECK_THROWS_AS(check_initial_state({5, 5.1, 0.25, 0.01, 0.75, 0.44}),
                    std::invalid_argument); /* Z > Y */
    CHECK_THROWS_AS(check_initial_state({5, 0.05, 0.25, 0.3, 0.75, 0.44}),
                    std::invalid_argument); /* P > S */
    CHECK_THROWS_AS(check_initial_state({5, 0.05, 0.25, 0.01, 0.75, 0.8}),
                    std::invalid_argument); /* X > R */
    CHECK_THROWS_AS(check_initial_state({5, 0.05, 1.25, 0.01, 0.75, 0.44}),
                    std::invalid_argument); /* S > 1 */
    CHECK_THROWS_AS(check_initial_state({-1, 0, 0.25, 0.01, 0.75, 0.44}),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_initial_state({5, 0.05, std::nan(""), 0.01, 0.75, 0.44}),
                    std::invalid_argument);
}
