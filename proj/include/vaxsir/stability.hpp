#ifndef VAXSIR_STABILITY_HPP
#define VAXSIR_STABILITY_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "vaxsir/model.hpp"

/* Linear stability machinery: exact Jacobians at the equilibria, a
 * characteristic polynomial built from sums of principal minors, a Routh
 * array, an Aberth-Ehrlich polynomial root finder, and the asymptotic
 * (epsilon -> 0) endemic stability chain with its simplified two-sided
 * criterion on the policy slope.
 */

namespace vaxsir {

/* Dense row-major matrix of order n <= 8. */
struct Mat {
    int n = 0;
    std::array<double, 64> a{};

    double& at(int i, int j) { return a[n * i + j]; }
    double at(int i, int j) const { return a[n * i + j]; }
};

/* Monic polynomial c[0] lambda^n + ... + c[n] with c[0] = 1. */
struct Poly {
    int n = 0;
    std::array<double, 9> c{};
};

enum class VerdictMethod { dfe_threshold, routh, asymptotic, simplified, eigenvalue };

/* Thrown when an operation that assumes an endemic equilibrium is handed a
 * Y whose branch residual exceeds tol::equilibrium. */
struct NotAnEquilibrium : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StabilityVerdict {
    bool stable = false;
    bool boundary = false; /* within tolerance of a stability boundary */
    VerdictMethod method = VerdictMethod::routh;
    std::vector<double> margins; /* positive entries favour stability */
};

/* det(A) by LU with partial pivoting; A of order n <= 8. */
double det_lu(const Mat& A);

/* Characteristic polynomial det(lambda I - A): coefficient of lambda^(n-m)
 * is (-1)^m times the sum of order-m principal minors.  n <= 8. */
Poly charpoly_via_minors(const Mat& A);

/* All roots by Aberth-Ehrlich iteration, Newton-polygon initial circles.
 * Sorted by (real, imag).  max_backward_error reports |P(z)| against the
 * coefficient magnitude scale at each root. */
std::vector<std::complex<double>> polyroots(const Poly& p,
                                            double* max_backward_error = nullptr);

/* Routh array of a monic polynomial.  margins holds the first column.
 * An exactly zero pivot is replaced by +1e-30 and boundary is set; a pivot
 * below 1e-12 of its row scale also sets boundary. */
StabilityVerdict routh_verdict(const Poly& p);

/* Hurwitz verdict from the eigenvalues of A: stable iff max Re < 0;
 * margins = { -max Re }; boundary when |max Re| < 1e-8. */
StabilityVerdict eigen_verdict(const Mat& A);

Mat jacobian_dfe(const ModelParams& mp, const AttitudePolicy& pol);

/* Jacobian at the leading-order EDE state; Y must satisfy
 * |omega(Y) - omega*(R0 Y)| <= 1e-8. */
Mat jacobian_ede(const ModelParams& mp, const AttitudePolicy& pol, double Y);

/* DFE verdict via the R_v threshold; margins = { 1 - R_v }. */
StabilityVerdict dfe_stability(const ModelParams& mp, const AttitudePolicy& pol);

/* Intermediate quantities of the asymptotic endemic criteria chain at
 * y = R0*Y.  The k/q recursion comes from the slow 4x4 block; the chain
 * identities q4 = (k4+k6)(k4-y) and k5 = k4+k6-y are asserted, as are the
 * proportionality relations q2 = y*m1/R0, k4-y = y*m2/R0, k6 = y*m3/R0
 * tying the Routh-style chain to the margin forms m1..m3. */
struct CriteriaChain {
    double y, p, x;
    double A, B;     /* policy-slope couplings in the P and X rows */
    double w1, w2;
    double k2, k4, k5, k6;
    double q1, q2, q3, q4;
    double m1, m2, m3; /* margins of the three inequalities */
};

CriteriaChain ede_chain(const ModelParams& mp, const AttitudePolicy& pol, double Y);

/* Three-margin asymptotic verdict at an endemic root. */
StabilityVerdict asymptotic_ede_criteria(const ModelParams& mp, const AttitudePolicy& pol,
                                         double Y);

/* Slope-window form for constant-Sigma policies:
 *   R0 * omega*'(R0 Y) < omega'(Y) < R0 * Upsilon1(R0 Y)
 * margins = { omega'(Y) - R0 omega*'(R0 Y), R0 Upsilon1(R0 Y) - omega'(Y) }. */
StabilityVerdict simplified_criterion(const ModelParams& mp, const AttitudePolicy& pol,
                                      double Y);

/* Slope bounds entering the simplified criterion, as functions of y = R0*Y. */
double upsilon1(const ModelParams& mp, double Sigma, double y);
double upsilon2(const ModelParams& mp, double Sigma, double y);
double upsilon3(const ModelParams& mp, double Sigma, double y); /* = -omega*'(y) */

namespace tol {
inline constexpr double equilibrium = 1e-8;   /* |g(Y)| accepted as a root */
inline constexpr double boundary_margin = 0.05;
inline constexpr double eigen_boundary = 1e-8;
inline constexpr double chain_identity = 1e-10;
inline constexpr double dfe_boundary = 1e-10;
} // namespace tol

} // namespace vaxsir

#endif
