#ifndef VAXSIR_MODEL_HPP
#define VAXSIR_MODEL_HPP

#include <array>
#include <string>

/* Scaled six-compartment epidemic model with a prevalence-responsive
 * vaccination attitude.  State components, in fixed order:
 *
 *   Y  scaled infectious density
 *   Z  scaled infection pressure felt by the hesitant pool
 *   S  susceptible, vaccine-accepting
 *   P  susceptible, vaccine-hesitant
 *   R  removed, accepting
 *   X  removed, hesitant
 *
 * Time is measured in demographic units; epsilon is the ratio of the
 * demographic to the epidemiological time scale, so 1/epsilon multiplies
 * the fast (Y, Z) equations.
 */

namespace vaxsir {

struct ModelParams {
    double R0;      /* basic reproduction number, > 0 */
    double v;       /* scaled vaccination rate, >= 0 */
    double h;       /* scaled waning rate of hesitancy-protection, >= 0 */
    double epsilon; /* time-scale ratio, in (0,1) */

    ModelParams(double R0_, double v_, double h_, double epsilon_);

    double r() const { return R0 - 1.0; }
    double hbar() const { return h + 1.0; }
    double gamma_scale() const { return 1.0 / epsilon; }
};

/* Dimensional rates; nondimensionalize() maps them onto ModelParams via
 *   R0 = beta/(gamma+mu), v = phi/mu, h = theta/mu, epsilon = mu/(gamma+mu).
 */
struct DimensionalParams {
    double beta;  /* transmission */
    double gamma; /* recovery */
    double theta; /* return-to-susceptibility of hesitant removed */
    double mu;    /* demographic turnover */
    double phi;   /* vaccination */
};

ModelParams nondimensionalize(const DimensionalParams& dp);

enum class PolicyFamily { constant, monotone_exp, peaked };

/* Attitude policy: splits the total attitude-switching rate Sigma into a
 * prevalence-dependent hesitant->accepting rate omega(Y) and its complement
 * psi(Y) = Sigma - omega(Y).  Families:
 *
 *   constant      omega = omega0
 *   monotone_exp  omega = Sigma (1 - exp(-aY))
 *   peaked        omega = Sigma d aY exp(1 - aY), maximum Sigma d at aY = 1
 *
 * Derivatives are analytic.  Evaluation at Y < 0 is a contract violation.
 */
struct AttitudePolicy {
    PolicyFamily family;
    double Sigma;  /* total switching rate, >= 0 */
    double a;      /* responsiveness, > 0 for the non-constant families */
    double d;      /* peak fraction, in (0,1] for the peaked family */
    double omega0; /* constant-family level, in [0, Sigma] */

    static AttitudePolicy constant(double Sigma, double omega0);
    static AttitudePolicy monotone(double Sigma, double a);
    static AttitudePolicy peaked(double Sigma, double a, double d);

    double omega(double Y) const;
    double omega_prime(double Y) const;
    double psi(double Y) const;
    double psi_prime(double Y) const;
    double sigma(double /*Y*/) const { return Sigma; }
    double sigma_prime(double /*Y*/) const { return 0.0; }

    /* No domain check; smooth continuation used inside the integrator. */
    double omega_unchecked(double Y) const;
    double omega_prime_unchecked(double Y) const;

    std::string family_name() const;
};

struct ScaledState {
    double Y, Z, S, P, R, X;

    std::array<double, 6> to_array() const { return {Y, Z, S, P, R, X}; }
    static ScaledState from_array(const std::array<double, 6>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }
};

/* Recurring parameter groupings at a state with infectious level Y.
 * zeta, eta, xi depend on the policy split at Y; chi = zeta + R0*Y.
 */
struct Groupings {
    double Sigma_bar; /* Sigma + 1 */
    double zeta;      /* Sigma_bar + v */
    double eta;       /* Sigma_bar + h */
    double xi;        /* Sigma_bar + h*(psi+1) */
    double rho;       /* Sigma_bar*(v + r*h) + R0*h*v */
    double chi;       /* zeta + R0*Y */
};

Groupings grouped(const ModelParams& mp, const AttitudePolicy& pol, double Y);

/* Right-hand side of the scaled system, d/dT of (Y,Z,S,P,R,X):
 *
 *   eps Y' = (R0 S - 1) Y
 *   eps Z' = R0 P Y - Z
 *       S' = 1 - S - vP + hX - R0 S Y
 *       P' = omega(Y) S - zeta P - R0 P Y
 *       R' = (1-eps) Y + vP - R - hX
 *       X' = (1-eps)(Y - Z) + psi(Y) R - eta X
 *
 * Requires a finite, component-wise nonnegative state.
 */
std::array<double, 6> rhs_scaled(const ModelParams& mp, const AttitudePolicy& pol,
                                 const ScaledState& s);

/* Same evaluation without the domain check (integrator internals). */
std::array<double, 6> rhs_unchecked(const ModelParams& mp, const AttitudePolicy& pol,
                                    const std::array<double, 6>& s);

/* Exact Jacobian of rhs_scaled with respect to the state, row-major 6x6. */
std::array<double, 36> rhs_jacobian(const ModelParams& mp, const AttitudePolicy& pol,
                                    const std::array<double, 6>& s);

/* N = S + eps*Y + R obeys N' = 1 - N; defect is N - 1. */
double conservation_defect(const ModelParams& mp, const ScaledState& s);

/* Recovered-attitude aggregate U = (S - P) + eps*(Y - Z) + X. */
double attitude_aggregate(const ModelParams& mp, const ScaledState& s);

/* Bounds check for user-supplied initial states: finite, all components
 * nonnegative, Z <= Y, P <= S <= 1, X <= R <= 1.  Throws on violation.
 */
void check_initial_state(const ScaledState& s);

} // namespace vaxsir

#endif
