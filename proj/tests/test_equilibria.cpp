#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "testutil.hpp"
#include "vaxsir/equilibria.hpp"
#include "vaxsir/model.hpp"

using namespace vaxsir;
using testutil::rel_close;

namespace {

const ModelParams kBase(4, 50, 10, 5e-4);

double max_abs_rhs(const ModelParams& mp, const AttitudePolicy& pol,
                   const ScaledState& s) {
    auto f = rhs_scaled(mp, pol, s);
    double m = 0.0;
    for (double c : f) m = std::max(m, std::fabs(c));
    return m;
}

} // namespace

TEST_CASE("critical switching level at frozen parameter points") {
    /* r*hbar*Sigma_bar*zeta/rho with h = 0, Sigma = 0: 3*1*1*51/50 */
    ModelParams h0(4, 50, 0, 5e-4);
    CHECK(omega_cr(h0, 0.0) == doctest::Approx(3.06).epsilon(1e-14));
    /* h = 10, Sigma = 5: 3*11*6*56/2480 */
    CHECK(omega_cr(kBase, 5.0) == doctest::Approx(11088.0 / 2480.0).epsilon(1e-14));
    /* the policy overload reads Sigma from the policy */
    auto mon = AttitudePolicy::monotone(5, 1.0);
    CHECK(omega_cr(kBase, mon) == doctest::Approx(omega_cr(kBase, 5.0)));
    /* rho = 0 has no finite threshold */
    ModelParams nov(4, 0, 0, 5e-4);
    CHECK_THROWS_AS(omega_cr(nov, 5.0), std::domain_error);
}

TEST_CASE("reduced reproduction number at a frozen constant policy") {
    auto pol = AttitudePolicy::constant(5, 5);
    /* zeta*xi = 56*16, v*omega0*eta = 50*5*16 */
    CHECK(reproduction_number(kBase, pol) ==
          doctest::Approx(3584.0 / 4896.0).epsilon(1e-14));
    /* omega(0) = 0 leaves the full R0 */
    auto mon = AttitudePolicy::monotone(5, 1.0);
    CHECK(reproduction_number(kBase, mon) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("reduced reproduction number crosses 1 exactly at the critical level") {
    testutil::Rng rng(81);
    int checked = 0;
    while (checked < 200) {
        ModelParams mp(rng.uniform(1.1, 8), rng.uniform(0, 100), rng.uniform(0, 20),
                       5e-4);
        double Sigma = rng.uniform(0, 20);
        double w0 = rng.uniform(0, Sigma);
        auto pol = AttitudePolicy::constant(Sigma, w0);
        double Rv = reproduction_number(mp, pol);
        if (std::fabs(Rv - 1.0) <= 1e-10) continue;
        double wc = omega_cr(mp, Sigma);
        CHECK((Rv < 1.0) == (w0 > wc));
        ++checked;
    }
}

TEST_CASE("disease-free state solves the system") {
    testutil::Rng rng(82);
    for (int i = 0; i < 50; ++i) {
        ModelParams mp(rng.uniform(1.1, 8), rng.uniform(0, 100), rng.uniform(0, 20),
                       5e-4);
        double Sigma = rng.uniform(0, 20);
        auto pol = AttitudePolicy::constant(Sigma, rng.uniform(0, Sigma));
        EquilibriumRecord rec = dfe_state(mp, pol);
        CHECK(rec.kind == EquilibriumKind::DFE);
        CHECK(rec.Y == 0.0);
        CHECK(rec.state.Y == 0.0);
        CHECK(rec.state.Z == 0.0);
        CHECK(rec.state.S + rec.state.R == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(rec.residual <= 1e-12);
        CHECK(max_abs_rhs(mp, pol, rec.state) <= 1e-11);
    }
    /* frozen point: S = zeta*xi/(zeta*xi + v*omega0*eta), all hesitancy at X = 0 */
    auto pol = AttitudePolicy::constant(5, 5);
    auto rec = dfe_state(kBase, pol);
    CHECK(rec.state.S == doctest::Approx(896.0 / 4896.0).epsilon(1e-14));
    CHECK(rec.state.P == doctest::Approx((5.0 / 56.0) * 896.0 / 4896.0).epsilon(1e-13));
    CHECK(rec.state.X == 0.0);
}

TEST_CASE("endemic branch ingredients at frozen points") {
    /* p(0) = Sigma_bar*r*hbar/rho */
    CHECK(p_of_y(kBase, 5.0, 0.0) == doctest::Approx(198.0 / 2480.0).epsilon(1e-14));
    CHECK(p_of_y(kBase, 5.0, 33.0) == 0.0);
    CHECK_THROWS_AS(p_of_y(kBase, 5.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(p_of_y(kBase, 5.0, 33.1), std::domain_error);

    /* omega*(0) equals the critical level; omega*(r*hbar) = 0 */
    for (double Sigma : {0.0, 2.0, 5.0, 10.0}) {
        CHECK(rel_close(omega_star(kBase, Sigma, 0.0), omega_cr(kBase, Sigma), 1e-14));
        CHECK(std::fabs(omega_star(kBase, Sigma, 33.0)) <= 1e-14);
    }
    /* frozen interior value, Sigma = 2: (53+8.25)*3*(33-8.25)/2570 */
    CHECK(omega_star(kBase, 2.0, 8.25) ==
          doctest::Approx(61.25 * 74.25 / 2570.0).epsilon(1e-14));

    CHECK(kappa(kBase, 5.0) == doctest::Approx(130960.0).epsilon(1e-14));

    CHECK(y_max(kBase) == doctest::Approx(8.25).epsilon(1e-15));
    ModelParams h0(4, 50, 0, 5e-4);
    CHECK(y_max(h0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("branch slope matches finite differences and stays negative when kappa > 0") {
    testutil::Rng rng(83);
    for (int i = 0; i < 100; ++i) {
        ModelParams mp(rng.uniform(1.5, 8), rng.uniform(1, 100), rng.uniform(0, 20),
                       5e-4);
        double Sigma = rng.uniform(0, 20);
        double ymax = mp.r() * mp.hbar();
        double y = rng.uniform(0.02 * ymax, 0.98 * ymax);
        double step = 1e-6 * std::max(1.0, y);
        double fd =
            (omega_star(mp, Sigma, y + step) - omega_star(mp, Sigma, y - step)) /
            (2 * step);
        CHECK(rel_close(omega_star_prime(mp, Sigma, y), fd, 1e-6));
        if (kappa(mp, Sigma) > 0.0) CHECK(omega_star_prime(mp, Sigma, y) < 0.0);
    }
}

TEST_CASE("root scan finds the single monotone-family equilibrium") {
    auto pol = AttitudePolicy::monotone(2, 1.0);
    EdeScan scan = find_ede_roots(kBase, pol);
    REQUIRE(scan.roots.size() == 1);
    const auto& rec = scan.roots[0];
    CHECK(rec.kind == EquilibriumKind::EDE);
    CHECK(rec.Y > 1.5);
    CHECK(rec.Y < 2.5);
    CHECK(std::fabs(pol.omega(rec.Y) - omega_star(kBase, 2.0, 4 * rec.Y)) <= 1e-12);
    CHECK(rec.bracket_lo <= rec.Y);
    CHECK(rec.bracket_hi >= rec.Y);
    CHECK(scan.suspect_Y.empty());
    CHECK_FALSE(scan.near_zero_root);

    /* grid refinement does not move the root */
    EdeScan coarse = find_ede_roots(kBase, pol, 512);
    EdeScan fine = find_ede_roots(kBase, pol, 2048);
    REQUIRE(coarse.roots.size() == 1);
    REQUIRE(fine.roots.size() == 1);
    CHECK(std::fabs(coarse.roots[0].Y - fine.roots[0].Y) <= 1e-9);

    auto pol5 = AttitudePolicy::monotone(5, 1.0);
    EdeScan scan5 = find_ede_roots(kBase, pol5);
    REQUIRE(scan5.roots.size() == 1);
    CHECK(scan5.roots[0].Y > 1.0);
    CHECK(scan5.roots[0].Y < 1.8);

    CHECK_THROWS_AS(find_ede_roots(kBase, pol, 63), std::invalid_argument);
}

TEST_CASE("root scan resolves all three equilibria of a peaked policy") {
    auto pol = AttitudePolicy::peaked(10, 0.6, 0.73);
    EdeScan scan = find_ede_roots(kBase, pol);
    REQUIRE(scan.roots.size() == 3);
    CHECK(scan.roots[0].Y > 0.8);
    CHECK(scan.roots[0].Y < 1.4);
    CHECK(scan.roots[1].Y > 4.0);
    CHECK(scan.roots[1].Y < 5.0);
    CHECK(scan.roots[2].Y > 6.5);
    CHECK(scan.roots[2].Y < 7.4);
    for (const auto& r : scan.roots) {
        CHECK(r.residual <= 1e-12);
        CHECK(r.state.S == doctest::Approx(0.25).epsilon(1e-15));
    }
    CHECK(scan.roots[0].Y < scan.roots[1].Y);
    CHECK(scan.roots[1].Y < scan.roots[2].Y);
}

TEST_CASE("root scan separates vanishing roots from genuine small ones") {
    double wc = omega_cr(kBase, 5.0);
    /* a root pinned O(1e-10) from zero only raises the near-zero flag */
    auto hug = AttitudePolicy::constant(5, wc * (1.0 - 1e-10));
    EdeScan scan = find_ede_roots(kBase, hug);
    CHECK(scan.roots.empty());
    CHECK(scan.near_zero_root);
    /* a root at O(1e-5) is kept */
    auto near = AttitudePolicy::constant(5, wc * (1.0 - 1e-6));
    EdeScan scan2 = find_ede_roots(kBase, near);
    REQUIRE(scan2.roots.size() == 1);
    CHECK(scan2.roots[0].Y > 1e-9);
    CHECK(scan2.roots[0].Y < 1e-4);
    CHECK_FALSE(scan2.near_zero_root);
    /* above the critical level the branch is out of reach */
    auto high = AttitudePolicy::constant(5, std::min(5.0, wc * 1.01));
    CHECK(find_ede_roots(kBase, high).roots.empty());
}

TEST_CASE("no endemic range without growth") {
    ModelParams sub(0.9, 50, 10, 5e-4);
    CHECK(y_max(sub) < 0.0);
    EdeScan scan = find_ede_roots(sub, AttitudePolicy::monotone(5, 1.0));
    CHECK(scan.roots.empty());
    CHECK(scan.suspect_Y.empty());
    CHECK_FALSE(scan.near_zero_root);
}

TEST_CASE("endemic state reconstruction solves the slow equations") {
    auto pol = AttitudePolicy::peaked(10, 0.6, 0.73);
    EdeScan scan = find_ede_roots(kBase, pol);
    REQUIRE(scan.roots.size() == 3);
    for (const auto& rec : scan.roots) {
        const ScaledState& s = rec.state;
        double Y = rec.Y;
        /* S and R pin the epidemic balance */
        CHECK(s.S == doctest::Approx(1.0 / 4).epsilon(1e-15));
        CHECK(s.R == doctest::Approx(3.0 / 4).epsilon(1e-14));
        CHECK(s.Z == doctest::Approx(4 * s.P * Y).epsilon(1e-13));
        /* epsilon-free susceptible balance: 1 - S - vP + hX - R0*S*Y = 0 */
        double r3 = 1 - s.S - 50 * s.P + 10 * s.X - 4 * s.S * Y;
        CHECK(std::fabs(r3) <= 1e-12);
        /* epsilon-free removed balance: Y + vP - R - hX = 0 */
        double r5 = Y + 50 * s.P - s.R - 10 * s.X;
        CHECK(std::fabs(r5) <= 1e-12);
        /* epsilon-free hesitant-removed balance */
        double r6 = (Y - s.Z) + pol.psi(Y) * s.R - (10 + 1 + 10) * s.X;
        CHECK(std::fabs(r6) <= 1e-11);
        CHECK(s.P >= 0.0);
        CHECK(s.X >= 0.0);
    }
    CHECK_THROWS_AS(ede_state(kBase, pol, -0.1), std::domain_error);
    CHECK_THROWS_AS(ede_state(kBase, pol, y_max(kBase) / 4 * 4.1), std::domain_error);
}

TEST_CASE("continued equilibrium absorbs the order-epsilon shift") {
    auto pol = AttitudePolicy::monotone(2, 1.0);
    EdeScan scan = find_ede_roots(kBase, pol);
    REQUIRE(scan.roots.size() == 1);
    double Y0 = scan.roots[0].Y;

    EquilibriumRecord fine = ede_refined(kBase, pol, Y0);
    CHECK(fine.kind == EquilibriumKind::EDE);
    CHECK(max_abs_rhs(kBase, pol, fine.state) <= 1e-8);
    CHECK(fine.residual <= 1e-8);
    /* the shift is order epsilon: visible at 5e-4, gone at 1e-7 */
    CHECK(std::fabs(fine.Y - Y0) > 1e-5);
    CHECK(std::fabs(fine.Y - Y0) < 0.05);
    ModelParams tiny(4, 50, 10, 1e-7);
    EquilibriumRecord fine2 = ede_refined(tiny, pol, Y0);
    CHECK(std::fabs(fine2.Y - Y0) < 1e-5);

    /* the refined state still satisfies the exact sub-relations */
    CHECK(fine.state.S == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(fine.state.Z == doctest::Approx(4 * fine.state.P * fine.state.Y)
                              .epsilon(1e-13));
    /* N = S + eps*Y + R = 1 at any true equilibrium */
    CHECK(std::fabs(conservation_defect(kBase, fine.state)) <= 1e-10);
}

TEST_CASE("continued equilibrium handles the h = 0 branch") {
    ModelParams h0(4, 50, 0, 5e-4);
    auto pol = AttitudePolicy::monotone(1.5, 4.0);
    EdeScan scan = find_ede_roots(h0, pol);
    REQUIRE(scan.roots.size() == 1);
    EquilibriumRecord fine = ede_refined(h0, pol, scan.roots[0].Y);
    CHECK(max_abs_rhs(h0, pol, fine.state) <= 1e-8);
    CHECK(std::fabs(conservation_defect(h0, fine.state)) <= 1e-10);
}
