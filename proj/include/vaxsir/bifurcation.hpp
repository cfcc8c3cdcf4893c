#ifndef VAXSIR_BIFURCATION_HPP
#define VAXSIR_BIFURCATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vaxsir/model.hpp"

/* Parameter-plane structure for the responsive policy families: fold
 * (tangency) curves of the peaked family in the (a,d) plane, root-pattern
 * region labels, and stability maps for the monotone family.
 */

namespace vaxsir {

/* Point where the peaked policy curve touches the endemic branch
 * tangentially: omega(Y) = omega*(R0 Y) and omega'(Y) = R0 omega*'(R0 Y).
 * Solving the slope condition for the shape gives a*Y = 1 - Y*L with
 * L = R0 omega*'/omega*, then d follows from the value condition.
 * model_valid marks d <= 1. */
struct TangencyPoint {
    double Y;
    double a;
    double d;
    double resid_value; /* omega(Y) - omega*(R0 Y) at the point */
    double resid_slope; /* omega'(Y) - R0 omega*'(R0 Y) at the point */
    bool model_valid;
};

TangencyPoint tangency_from_Y(const ModelParams& mp, double Sigma, double Y);

/* All tangency points with the given responsiveness a, found by scanning
 * the recovered a(Y) over (0, Y_max); sorted by d ascending. */
std::vector<TangencyPoint> tangency_d_values(const ModelParams& mp, double Sigma,
                                             double a, int scan_n = 4096);

/* Fold curve sampled over Y; invalid points (d > 1) are included so the
 * caller can clip. */
std::vector<TangencyPoint> tangency_curve(const ModelParams& mp, double Sigma, int n);

struct FoldCheck {
    double lower_margin; /* slope-window lower margin, ~0 at a fold */
    double upper_margin;
    bool marginal;       /* |lower| <= 1e-8 and upper > 0 */
};

FoldCheck fold_marginality_check(const ModelParams& mp, double Sigma,
                                 const TangencyPoint& tp);

/* Root stability pattern, one 'S'/'U' per endemic root in ascending Y,
 * judged by the simplified slope-window criterion. */
std::string classify_regions(const ModelParams& mp, const AttitudePolicy& pol);

struct AxisSpec {
    double min;
    double max;
    int n;
    bool log_scale;

    std::vector<double> values() const;
};

/* Stability map of the monotone family over (Sigma, a).  Nodes are stored
 * axis1-major: node(i,j) = i*axis2.n + j with i the Sigma index.  Y is the
 * endemic level (largest root on multiplicity, 0 when none exists) and
 * stable the simplified verdict there (DFE verdict when no root).
 * min_margin carries the smallest criterion margin for contouring. */
struct MapGrid {
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> Y;
    std::vector<std::uint8_t> stable;
    std::vector<double> min_margin;
};

MapGrid stability_map_monotone(const ModelParams& mp, const AxisSpec& Sigma_axis,
                               const AxisSpec& a_axis, int threads);

/* Region labels of the peaked family over (a, d) at fixed Sigma. */
struct RegionGrid {
    std::vector<double> a;
    std::vector<double> d;
    std::vector<std::string> label; /* a-major, like MapGrid */
    std::vector<int> n_roots;
};

RegionGrid region_grid(const ModelParams& mp, double Sigma, const AxisSpec& a_axis,
                       const AxisSpec& d_axis, int threads);

/* Responsiveness values in [a_min, a_max] where the unique monotone-family
 * endemic root changes stability; refined by bisection on the smallest
 * criterion margin. */
std::vector<double> critical_a_values(const ModelParams& mp, double Sigma,
                                      const AxisSpec& a_axis);

/* d putting the peaked policy through the endemic branch at level Y for
 * responsiveness a (level curves of Y in the (a,d) plane). */
double peaked_level_d(const ModelParams& mp, double Sigma, double Y, double a);

} // namespace vaxsir

#endif
