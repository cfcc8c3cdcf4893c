#ifndef VAXSIR_SIMULATE_HPP
#define VAXSIR_SIMULATE_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vaxsir/model.hpp"

/* Stiff time integration of the scaled system and classification of the
 * long-run behaviour of a trajectory.
 */

namespace vaxsir {

struct SimulationConfig {
    double T_end = 10.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    double record_stride = 1e-3;

    void validate() const;
};

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<std::array<double, 6>> state; /* (Y,Z,S,P,R,X) at each sample */
    std::vector<double> U;
    double conservation_drift = 0.0; /* max deviation from the exact N relaxation */
    std::size_t n_steps = 0;
};

struct IntegrationError : std::runtime_error {
    double time;
    IntegrationError(double t, const std::string& msg)
        : std::runtime_error(msg), time(t) {}
};

/* Rosenbrock integration with the analytic Jacobian and dense-output
 * sampling at multiples of record_stride (plus T_end).  Sampled components
 * in [-10*atol, 0) are clamped to zero; anything below -10*atol aborts.
 * N = S + eps*Y + R must follow 1 + (N(0)-1)exp(-T) to within 1e-4 or the
 * run aborts; the maximum deviation seen is reported as
 * conservation_drift. */
TrajectoryRecord integrate(const ModelParams& mp, const AttitudePolicy& pol,
                           const ScaledState& initial, const SimulationConfig& cfg);

enum class AttractorKind { converged_EDE, limit_cycle, undecided };

struct AttractorClassification {
    AttractorKind kind = AttractorKind::undecided;
    double target_Y = 0.0;  /* converged_EDE: matched equilibrium Y */
    double period = 0.0;    /* limit_cycle: mean spacing of late peaks */
    double amplitude = 0.0; /* trailing peak-to-trough range of Y */
};

/* Uses the second half of the record.  converged_EDE requires a trailing Y
 * range below 1e-6 and the trailing mean to sit within 1e-3 per component
 * of a full-epsilon equilibrium continued from an endemic root;
 * limit_cycle requires a range above max(1e-3, 1e-3 * mean Y) with at
 * least three late peaks of height within 1% of each other. */
AttractorClassification classify_attractor(const ModelParams& mp, const AttitudePolicy& pol,
                                           const TrajectoryRecord& rec);

/* Integrates each initial state and classifies it. */
std::vector<AttractorClassification> bistability_experiment(
    const ModelParams& mp, const AttitudePolicy& pol,
    const std::vector<ScaledState>& initials, const SimulationConfig& cfg);

const char* attractor_kind_name(AttractorKind k);

} // namespace vaxsir

#endif
