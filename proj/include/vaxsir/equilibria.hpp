#ifndef VAXSIR_EQUILIBRIA_HPP
#define VAXSIR_EQUILIBRIA_HPP

#include <vector>

#include "vaxsir/model.hpp"

/* Equilibria of the scaled system in the fast-epidemic limit.
 *
 * The disease-free equilibrium (DFE) exists for all parameters; its local
 * stability is governed by the vaccination-reduced reproduction number
 *   R_v = R0 * zeta*xi / (zeta*xi + v*omega(0)*eta),
 * with R_v < 1 exactly when omega(0) exceeds the threshold
 *   omega_cr = r*hbar*Sigma_bar*zeta / rho.
 *
 * Endemic equilibria (EDE) sit on the leading-order branch S = 1/R0.  In
 * terms of y = R0*Y the hesitant fraction is
 *   p(y) = Sigma_bar*(r*hbar - y) / (rho + R0*h*y),
 * and an equilibrium requires the policy to satisfy omega(Y) = omega*(R0*Y)
 * where omega*(y) = (zeta + y)*p(y).  omega* decreases from omega_cr at
 * y = 0 to zero at y = r*hbar, so Y_max = (1 - 1/R0)*hbar bounds the
 * endemic range.
 */

namespace vaxsir {

enum class EquilibriumKind { DFE, EDE };

struct EquilibriumRecord {
    EquilibriumKind kind;
    double Y;
    ScaledState state;
    double residual;   /* max abs slow-equation residual at the state */
    double bracket_lo; /* grid bracket that isolated the root (EDE) */
    double bracket_hi;
};

double reproduction_number(const ModelParams& mp, const AttitudePolicy& pol);

/* Threshold level of omega(0); depends on the policy only through Sigma. */
double omega_cr(const ModelParams& mp, double Sigma);
double omega_cr(const ModelParams& mp, const AttitudePolicy& pol);

EquilibriumRecord dfe_state(const ModelParams& mp, const AttitudePolicy& pol);

/* Endemic branch ingredients as functions of y = R0*Y on [0, r*hbar]. */
double p_of_y(const ModelParams& mp, double Sigma, double y);
double omega_star(const ModelParams& mp, double Sigma, double y);
double omega_star_prime(const ModelParams& mp, double Sigma, double y);

/* kappa = zeta*rho - Sigma_bar*r*hbar*(v - h); omega* is strictly
 * decreasing on the whole branch when kappa >= 0. */
double kappa(const ModelParams& mp, double Sigma);

double y_max(const ModelParams& mp);

struct EdeScan {
    std::vector<EquilibriumRecord> roots; /* ascending in Y */
    std::vector<double> suspect_Y;        /* |g| dips without sign change */
    bool near_zero_root; /* a refined root merged with the DFE */
};

/* Root scan of g(Y) = omega(Y) - omega*(R0*Y) on (0, Y_max): uniform grid,
 * bracketed sign changes refined by Brent to |g| <= 1e-12.  Grid minima of
 * |g| below 1e-3 of the grid maximum without a sign change are reported as
 * suspect (near-tangency).  Refined roots below 1e-9 in Y only set
 * near_zero_root.  grid_n >= 64.
 */
EdeScan find_ede_roots(const ModelParams& mp, const AttitudePolicy& pol,
                       int grid_n = 1024);

/* Leading-order EDE state at a root Y in (0, Y_max).  The reconstruction
 * satisfies the epsilon-free slow equations exactly except for the P
 * balance, whose residual is (omega(Y) - omega*(R0*Y))/R0. */
ScaledState ede_state(const ModelParams& mp, const AttitudePolicy& pol, double Y);

EquilibriumRecord ede_record(const ModelParams& mp, const AttitudePolicy& pol, double Y);

/* Full-epsilon equilibrium continued from a leading-order root: S = 1/R0,
 * P = omega(Y)S/(zeta + R0 Y) and Z = R0 P Y hold exactly; Y shifts by
 * O(epsilon) and R picks up the -epsilon*Y correction.  Used to test
 * trajectory convergence.  Returns kind EDE with residual from the full
 * right-hand side. */
EquilibriumRecord ede_refined(const ModelParams& mp, const AttitudePolicy& pol,
                              double Y_leading);

} // namespace vaxsir

#endif
