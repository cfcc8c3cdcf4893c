#ifndef VAXSIR_H
#define VAXSIR_H

/* C interface to the vaxsir library: a scaled six-compartment epidemic
 * model with a prevalence-responsive vaccination attitude, its equilibria,
 * linear stability machinery, fold/tangency analysis, and stiff time
 * integration.
 *
 * All functions returning int give VAXSIR_OK on success and a VAXSIR_ERR_*
 * code otherwise; vaxsir_last_error() holds the failing call's message for
 * the current thread.  State vectors are length-6 arrays ordered
 * (Y, Z, S, P, R, X); matrices are row-major.
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32 || defined __CYGWIN__
#define VAXSIR_API __declspec(dllexport)
#else
#define VAXSIR_API __attribute__((visibility("default")))
#endif

enum {
    VAXSIR_OK = 0,
    VAXSIR_ERR_INVALID = 1,         /* argument or parameter validation failed */
    VAXSIR_ERR_DOMAIN = 2,          /* evaluation outside the mathematical domain */
    VAXSIR_ERR_NOT_EQUILIBRIUM = 3, /* Y does not satisfy the branch equation */
    VAXSIR_ERR_INTEGRATION = 4,     /* time integration aborted */
    VAXSIR_ERR_BUFFER = 5,          /* caller-supplied capacity too small */
    VAXSIR_ERR_INTERNAL = 6
};

typedef struct vaxsir_model_s vaxsir_model;
typedef struct vaxsir_traj_s vaxsir_traj;

VAXSIR_API const char* vaxsir_strerror(int code);
VAXSIR_API const char* vaxsir_last_error(void);

/* family is "constant" (uses Sigma, omega0), "monotone_exp" (Sigma, a) or
 * "peaked" (Sigma, a, d); the unused shape arguments are ignored. */
VAXSIR_API int vaxsir_model_create(double R0, double v, double h, double epsilon,
                                   const char* family, double Sigma, double a,
                                   double d, double omega0, vaxsir_model** out);

/* Builds the scaled parameters from dimensional rates:
 * R0 = beta/(gamma+mu), v = phi/mu, h = theta/mu, epsilon = mu/(gamma+mu). */
VAXSIR_API int vaxsir_model_create_dimensional(double beta, double gamma, double theta,
                                               double mu, double phi, const char* family,
                                               double Sigma, double a, double d,
                                               double omega0, vaxsir_model** out);

VAXSIR_API void vaxsir_model_free(vaxsir_model* m);

/* out_params receives R0, v, h, epsilon. */
VAXSIR_API int vaxsir_params_get(const vaxsir_model* m, double out_params[4]);

VAXSIR_API int vaxsir_omega(const vaxsir_model* m, double Y, double* out);
VAXSIR_API int vaxsir_omega_prime(const vaxsir_model* m, double Y, double* out);
VAXSIR_API int vaxsir_psi(const vaxsir_model* m, double Y, double* out);
VAXSIR_API int vaxsir_psi_prime(const vaxsir_model* m, double Y, double* out);

VAXSIR_API int vaxsir_rhs(const vaxsir_model* m, const double state[6], double out[6]);
VAXSIR_API int vaxsir_rhs_jacobian(const vaxsir_model* m, const double state[6],
                                   double out[36]);
VAXSIR_API int vaxsir_conservation_defect(const vaxsir_model* m, const double state[6],
                                          double* out);
VAXSIR_API int vaxsir_attitude_aggregate(const vaxsir_model* m, const double state[6],
                                         double* out);

VAXSIR_API int vaxsir_reproduction_number(const vaxsir_model* m, double* out);
VAXSIR_API int vaxsir_omega_cr(const vaxsir_model* m, double* out);
VAXSIR_API int vaxsir_dfe_state(const vaxsir_model* m, double out_state[6],
                                double* residual);
VAXSIR_API int vaxsir_y_max(const vaxsir_model* m, double* out);

/* Endemic-branch functions of y = R0*Y on [0, r*(h+1)]. */
VAXSIR_API int vaxsir_p_of_y(const vaxsir_model* m, double y, double* out);
VAXSIR_API int vaxsir_omega_star(const vaxsir_model* m, double y, double* out);
VAXSIR_API int vaxsir_omega_star_prime(const vaxsir_model* m, double y, double* out);

/* grid_n <= 0 selects the default scan resolution.  Y_out receives up to
 * cap roots ascending; n_found the number available (VAXSIR_ERR_BUFFER if
 * cap is too small); suspect is set when |g| dips near zero without a sign
 * change (possible tangency). */
VAXSIR_API int vaxsir_find_ede_roots(const vaxsir_model* m, int grid_n, double* Y_out,
                                     int cap, int* n_found, int* suspect);
VAXSIR_API int vaxsir_ede_state(const vaxsir_model* m, double Y, double out_state[6],
                                double* residual);

VAXSIR_API int vaxsir_jacobian_dfe(const vaxsir_model* m, double out[36]);
VAXSIR_API int vaxsir_jacobian_ede(const vaxsir_model* m, double Y, double out[36]);

/* Characteristic polynomial of the n x n matrix A (n <= 8) as monic
 * descending coefficients, coeffs_out[0] = 1, length n+1. */
VAXSIR_API int vaxsir_charpoly(const double* A, int n, double coeffs_out[9]);

/* Roots of a monic degree-n polynomial (coeffs descending, coeffs[0]=1),
 * written to re_out/im_out (length n), sorted by real then imaginary. */
VAXSIR_API int vaxsir_polyroots(const double* coeffs, int n, double* re_out,
                                double* im_out);

/* Routh array verdict; margins_out receives the first column (n+1 values). */
VAXSIR_API int vaxsir_routh(const double* coeffs, int n, int* stable, int* boundary,
                            double* margins_out, int margins_cap, int* n_margins);

/* Hurwitz verdict from the eigenvalues of A; margin = -max Re. */
VAXSIR_API int vaxsir_eigen_verdict(const double* A, int n, int* stable, int* boundary,
                                    double* margin);

VAXSIR_API int vaxsir_dfe_stability(const vaxsir_model* m, int* stable, double* margin);
VAXSIR_API int vaxsir_asymptotic_criteria(const vaxsir_model* m, double Y, int* stable,
                                          int* boundary, double margins_out[3]);
VAXSIR_API int vaxsir_simplified_criterion(const vaxsir_model* m, double Y, int* stable,
                                           int* boundary, double margins_out[2]);

VAXSIR_API int vaxsir_tangency_from_Y(const vaxsir_model* m, double Y, double* a,
                                      double* d, int* model_valid);
VAXSIR_API int vaxsir_tangency_d_values(const vaxsir_model* m, double a, double* d_out,
                                        double* Y_out, int cap, int* n_found);
VAXSIR_API int vaxsir_classify_regions(const vaxsir_model* m, char* buf, int buflen);
VAXSIR_API int vaxsir_peaked_level_d(const vaxsir_model* m, double Y, double a,
                                     double* d);
VAXSIR_API int vaxsir_critical_a_values(const vaxsir_model* m, double a_min,
                                        double a_max, int scan_n, int log_scale,
                                        double* a_out, int cap, int* n_found);

/* Monotone-family stability map; output arrays hold n_Sigma*n_a nodes,
 * Sigma-major.  threads <= 0 selects a hardware-based default. */
VAXSIR_API int vaxsir_stability_map(const vaxsir_model* m, double Sigma_min,
                                    double Sigma_max, int n_Sigma, int Sigma_log,
                                    double a_min, double a_max, int n_a, int a_log,
                                    int threads, double* Y_out,
                                    unsigned char* stable_out, double* margin_out);

VAXSIR_API int vaxsir_simulate(const vaxsir_model* m, const double initial[6],
                               double T_end, double rtol, double atol,
                               double record_stride, vaxsir_traj** out);
VAXSIR_API long vaxsir_traj_samples(const vaxsir_traj* tr);
VAXSIR_API const double* vaxsir_traj_times(const vaxsir_traj* tr);
VAXSIR_API const double* vaxsir_traj_states(const vaxsir_traj* tr);
VAXSIR_API const double* vaxsir_traj_aggregate(const vaxsir_traj* tr);
VAXSIR_API double vaxsir_traj_drift(const vaxsir_traj* tr);
VAXSIR_API long vaxsir_traj_steps(const vaxsir_traj* tr);
VAXSIR_API void vaxsir_traj_free(vaxsir_traj* tr);

/* Time at which the last VAXSIR_ERR_INTEGRATION in this thread occurred. */
VAXSIR_API double vaxsir_error_time(void);

/* kind: 0 converged to an endemic equilibrium, 1 limit cycle, 2 undecided. */
VAXSIR_API int vaxsir_classify(const vaxsir_model* m, const vaxsir_traj* tr, int* kind,
                               double* target_Y, double* period, double* amplitude);

#ifdef __cplusplus
}
#endif

#endif
