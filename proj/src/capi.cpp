#include "vaxsir/vaxsir.h"

#include <cstring>
#include <string>
#include <thread>

#include "vaxsir/bifurcation.hpp"
#include "vaxsir/equilibria.hpp"
#include "vaxsir/model.hpp"
#include "vaxsir/simulate.hpp"
#include "vaxsir/stability.hpp"

struct vaxsir_model_s {
    vaxsir::ModelParams params;
    vaxsir::AttitudePolicy policy;
};

struct vaxsir_traj_s {
    vaxsir::TrajectoryRecord rec;
    std::vector<double> flat_states; /* row-major copy for the C view */
};

namespace {

thread_local std::string g_last_error;
thread_local double g_error_time = 0.0;

int fail(int code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const vaxsir::IntegrationError& e) {
        g_error_time = e.time;
        return fail(VAXSIR_ERR_INTEGRATION, e.what());
    } catch (const vaxsir::NotAnEquilibrium& e) {
        return fail(VAXSIR_ERR_NOT_EQUILIBRIUM, e.what());
    } catch (const std::domain_error& e) {
        return fail(VAXSIR_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(VAXSIR_ERR_INVALID, e.what());
    } catch (const std::exception& e) {
        return fail(VAXSIR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(VAXSIR_ERR_INTERNAL, "unknown error");
    }
}

vaxsir::AttitudePolicy make_policy(const char* family, double Sigma, double a, double d,
                                   double omega0) {
    if (!family) throw std::invalid_argument("policy family must not be null");
    std::string f = family;
    if (f == "constant") return vaxsir::AttitudePolicy::constant(Sigma, omega0);
    if (f == "monotone_exp") return vaxsir::AttitudePolicy::monotone(Sigma, a);
    if (f == "peaked") return vaxsir::AttitudePolicy::peaked(Sigma, a, d);
    throw std::invalid_argument("unknown policy family '" + f + "'");
}

int need(const void* p, const char* what) {
    if (p) return VAXSIR_OK;
    return fail(VAXSIR_ERR_INVALID, (std::string(what) + " must not be null").c_str());
}

vaxsir::ScaledState to_state(const double s[6]) {
    return vaxsir::ScaledState{s[0], s[1], s[2], s[3], s[4], s[5]};
}

} // namespace

extern "C" {

const char* vaxsir_strerror(int code) {
    switch (code) {
        case VAXSIR_OK: return "ok";
        case VAXSIR_ERR_INVALID: return "invalid argument";
        case VAXSIR_ERR_DOMAIN: return "outside domain";
        case VAXSIR_ERR_NOT_EQUILIBRIUM: return "not an equilibrium";
        case VAXSIR_ERR_INTEGRATION: return "integration aborted";
        case VAXSIR_ERR_BUFFER: return "buffer too small";
        case VAXSIR_ERR_INTERNAL: return "internal error";
    }
    return "unknown error code";
}

const char* vaxsir_last_error(void) { return g_last_error.c_str(); }

double vaxsir_error_time(void) { return g_error_time; }

int vaxsir_model_create(double R0, double v, double h, double epsilon, const char* family,
                        double Sigma, double a, double d, double omega0,
                        vaxsir_model** out) {
    if (int rc = need(out, "out")) return rc;
    *out = nullptr;
    return guarded([&]() -> int {
        vaxsir::ModelParams mp(R0, v, h, epsilon);
        vaxsir::AttitudePolicy pol = make_policy(family, Sigma, a, d, omega0);
        *out = new vaxsir_model_s{mp, pol};
        return VAXSIR_OK;
    });
}

int vaxsir_model_create_dimensional(double beta, double gamma, double theta, double mu,
                                    double phi, const char* family, double Sigma, double a,
                                    double d, double omega0, vaxsir_model** out) {
    if (int rc = need(out, "out")) return rc;
    *out = nullptr;
    return guarded([&]() -> int {
        vaxsir::ModelParams mp =
            vaxsir::nondimensionalize(vaxsir::DimensionalParams{beta, gamma, theta, mu, phi});
        vaxsir::AttitudePolicy pol = make_policy(family, Sigma, a, d, omega0);
        *out = new vaxsir_model_s{mp, pol};
        return VAXSIR_OK;
    });
}

void vaxsir_model_free(vaxsir_model* m) { delete m; }

int vaxsir_params_get(const vaxsir_model* m, double out_params[4]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out_params, "out_params")) return rc;
    out_params[0] = m->params.R0;
    out_params[1] = m->params.v;
    out_params[2] = m->params.h;
    out_params[3] = m->params.epsilon;
    return VAXSIR_OK;
}

#define VAXSIR_SCALAR_POLICY_FN(NAME, EXPR)                          \
    int NAME(const vaxsir_model* m, double Y, double* out) {         \
        if (int rc = need(m, "model")) return rc;                    \
        if (int rc = need(out, "out")) return rc;                    \
        return guarded([&]() -> int {                                       \
            *out = (EXPR);                                           \
            return VAXSIR_OK;                                        \
        });                                                          \
    }

VAXSIR_SCALAR_POLICY_FN(vaxsir_omega, m->policy.omega(Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_omega_prime, m->policy.omega_prime(Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_psi, m->policy.psi(Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_psi_prime, m->policy.psi_prime(Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_p_of_y, vaxsir::p_of_y(m->params, m->policy.Sigma, Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_omega_star, vaxsir::omega_star(m->params, m->policy.Sigma, Y))
VAXSIR_SCALAR_POLICY_FN(vaxsir_omega_star_prime,
                        vaxsir::omega_star_prime(m->params, m->policy.Sigma, Y))

#undef VAXSIR_SCALAR_POLICY_FN

int vaxsir_rhs(const vaxsir_model* m, const double state[6], double out[6]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(state, "state")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        auto f = vaxsir::rhs_scaled(m->params, m->policy, to_state(state));
        for (int i = 0; i < 6; ++i) out[i] = f[i];
        return VAXSIR_OK;
    });
}

int vaxsir_rhs_jacobian(const vaxsir_model* m, const double state[6], double out[36]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(state, "state")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        std::array<double, 6> s;
        std::memcpy(s.data(), state, sizeof s);
        auto j = vaxsir::rhs_jacobian(m->params, m->policy, s);
        std::memcpy(out, j.data(), sizeof(double) * 36);
        return VAXSIR_OK;
    });
}

int vaxsir_conservation_defect(const vaxsir_model* m, const double state[6], double* out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(state, "state")) return rc;
    if (int rc = need(out, "out")) return rc;
    *out = vaxsir::conservation_defect(m->params, to_state(state));
    return VAXSIR_OK;
}

int vaxsir_attitude_aggregate(const vaxsir_model* m, const double state[6], double* out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(state, "state")) return rc;
    if (int rc = need(out, "out")) return rc;
    *out = vaxsir::attitude_aggregate(m->params, to_state(state));
    return VAXSIR_OK;
}

int vaxsir_reproduction_number(const vaxsir_model* m, double* out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        *out = vaxsir::reproduction_number(m->params, m->policy);
        return VAXSIR_OK;
    });
}

int vaxsir_omega_cr(const vaxsir_model* m, double* out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        *out = vaxsir::omega_cr(m->params, m->policy);
        return VAXSIR_OK;
    });
}

int vaxsir_dfe_state(const vaxsir_model* m, double out_state[6], double* residual) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out_state, "out_state")) return rc;
    return guarded([&]() -> int {
        auto rec = vaxsir::dfe_state(m->params, m->policy);
        auto arr = rec.state.to_array();
        for (int i = 0; i < 6; ++i) out_state[i] = arr[i];
        if (residual) *residual = rec.residual;
        return VAXSIR_OK;
    });
}

int vaxsir_y_max(const vaxsir_model* m, double* out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out, "out")) return rc;
    *out = vaxsir::y_max(m->params);
    return VAXSIR_OK;
}

int vaxsir_find_ede_roots(const vaxsir_model* m, int grid_n, double* Y_out, int cap,
                          int* n_found, int* suspect) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(n_found, "n_found")) return rc;
    return guarded([&]() -> int {
        vaxsir::EdeScan scan = (grid_n <= 0)
                                   ? vaxsir::find_ede_roots(m->params, m->policy)
                                   : vaxsir::find_ede_roots(m->params, m->policy, grid_n);
        *n_found = (int)scan.roots.size();
        if (suspect) *suspect = scan.suspect_Y.empty() ? 0 : 1;
        if ((int)scan.roots.size() > cap && Y_out)
            return fail(VAXSIR_ERR_BUFFER, "root capacity too small");
        if (Y_out)
            for (size_t i = 0; i < scan.roots.size() && (int)i < cap; ++i)
                Y_out[i] = scan.roots[i].Y;
        return VAXSIR_OK;
    });
}

int vaxsir_ede_state(const vaxsir_model* m, double Y, double out_state[6],
                     double* residual) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out_state, "out_state")) return rc;
    return guarded([&]() -> int {
        auto rec = vaxsir::ede_record(m->params, m->policy, Y);
        auto arr = rec.state.to_array();
        for (int i = 0; i < 6; ++i) out_state[i] = arr[i];
        if (residual) *residual = rec.residual;
        return VAXSIR_OK;
    });
}

int vaxsir_jacobian_dfe(const vaxsir_model* m, double out[36]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        vaxsir::Mat J = vaxsir::jacobian_dfe(m->params, m->policy);
        for (int i = 0; i < 36; ++i) out[i] = J.a[i];
        return VAXSIR_OK;
    });
}

int vaxsir_jacobian_ede(const vaxsir_model* m, double Y, double out[36]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(out, "out")) return rc;
    return guarded([&]() -> int {
        vaxsir::Mat J = vaxsir::jacobian_ede(m->params, m->policy, Y);
        for (int i = 0; i < 36; ++i) out[i] = J.a[i];
        return VAXSIR_OK;
    });
}

namespace {

vaxsir::Mat to_mat(const double* A, int n) {
    if (n < 1 || n > 8) throw std::invalid_argument("matrix order must lie in [1,8]");
    vaxsir::Mat M;
    M.n = n;
    for (int i = 0; i < n * n; ++i) M.a[i] = A[i];
    return M;
}

vaxsir::Poly to_poly(const double* coeffs, int n) {
    if (n < 1 || n > 8) throw std::invalid_argument("polynomial degree must lie in [1,8]");
    vaxsir::Poly p;
    p.n = n;
    for (int i = 0; i <= n; ++i) p.c[i] = coeffs[i];
    return p;
}

} // namespace

int vaxsir_charpoly(const double* A, int n, double coeffs_out[9]) {
    if (int rc = need(A, "A")) return rc;
    if (int rc = need(coeffs_out, "coeffs_out")) return rc;
    return guarded([&]() -> int {
        vaxsir::Poly p = vaxsir::charpoly_via_minors(to_mat(A, n));
        for (int i = 0; i <= n; ++i) coeffs_out[i] = p.c[i];
        return VAXSIR_OK;
    });
}

int vaxsir_polyroots(const double* coeffs, int n, double* re_out, double* im_out) {
    if (int rc = need(coeffs, "coeffs")) return rc;
    if (int rc = need(re_out, "re_out")) return rc;
    if (int rc = need(im_out, "im_out")) return rc;
    return guarded([&]() -> int {
        auto roots = vaxsir::polyroots(to_poly(coeffs, n));
        for (int i = 0; i < n; ++i) {
            re_out[i] = roots[i].real();
            im_out[i] = roots[i].imag();
        }
        return VAXSIR_OK;
    });
}

int vaxsir_routh(const double* coeffs, int n, int* stable, int* boundary,
                 double* margins_out, int margins_cap, int* n_margins) {
    if (int rc = need(coeffs, "coeffs")) return rc;
    if (int rc = need(stable, "stable")) return rc;
    return guarded([&]() -> int {
        vaxsir::StabilityVerdict v = vaxsir::routh_verdict(to_poly(coeffs, n));
        *stable = v.stable ? 1 : 0;
        if (boundary) *boundary = v.boundary ? 1 : 0;
        if (n_margins) *n_margins = (int)v.margins.size();
        if (margins_out) {
            if ((int)v.margins.size() > margins_cap)
                return fail(VAXSIR_ERR_BUFFER, "margin capacity too small");
            for (size_t i = 0; i < v.margins.size(); ++i) margins_out[i] = v.margins[i];
        }
        return VAXSIR_OK;
    });
}

int vaxsir_eigen_verdict(const double* A, int n, int* stable, int* boundary,
                         double* margin) {
    if (int rc = need(A, "A")) return rc;
    if (int rc = need(stable, "stable")) return rc;
    return guarded([&]() -> int {
        vaxsir::StabilityVerdict v = vaxsir::eigen_verdict(to_mat(A, n));
        *stable = v.stable ? 1 : 0;
        if (boundary) *boundary = v.boundary ? 1 : 0;
        if (margin) *margin = v.margins[0];
        return VAXSIR_OK;
    });
}

int vaxsir_dfe_stability(const vaxsir_model* m, int* stable, double* margin) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(stable, "stable")) return rc;
    return guarded([&]() -> int {
        vaxsir::StabilityVerdict v = vaxsir::dfe_stability(m->params, m->policy);
        *stable = v.stable ? 1 : 0;
        if (margin) *margin = v.margins[0];
        return VAXSIR_OK;
    });
}

int vaxsir_asymptotic_criteria(const vaxsir_model* m, double Y, int* stable, int* boundary,
                               double margins_out[3]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(stable, "stable")) return rc;
    return guarded([&]() -> int {
        vaxsir::StabilityVerdict v =
            vaxsir::asymptotic_ede_criteria(m->params, m->policy, Y);
        *stable = v.stable ? 1 : 0;
        if (boundary) *boundary = v.boundary ? 1 : 0;
        if (margins_out)
            for (int i = 0; i < 3; ++i) margins_out[i] = v.margins[i];
        return VAXSIR_OK;
    });
}

int vaxsir_simplified_criterion(const vaxsir_model* m, double Y, int* stable, int* boundary,
                                double margins_out[2]) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(stable, "stable")) return rc;
    return guarded([&]() -> int {
        vaxsir::StabilityVerdict v = vaxsir::simplified_criterion(m->params, m->policy, Y);
        *stable = v.stable ? 1 : 0;
        if (boundary) *boundary = v.boundary ? 1 : 0;
        if (margins_out) {
            margins_out[0] = v.margins[0];
            margins_out[1] = v.margins[1];
        }
        return VAXSIR_OK;
    });
}

int vaxsir_tangency_from_Y(const vaxsir_model* m, double Y, double* a, double* d,
                           int* model_valid) {
    if (int rc = need(m, "model")) return rc;
    return guarded([&]() -> int {
        vaxsir::TangencyPoint tp = vaxsir::tangency_from_Y(m->params, m->policy.Sigma, Y);
        if (a) *a = tp.a;
        if (d) *d = tp.d;
        if (model_valid) *model_valid = tp.model_valid ? 1 : 0;
        return VAXSIR_OK;
    });
}

int vaxsir_tangency_d_values(const vaxsir_model* m, double a, double* d_out, double* Y_out,
                             int cap, int* n_found) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(n_found, "n_found")) return rc;
    return guarded([&]() -> int {
        auto pts = vaxsir::tangency_d_values(m->params, m->policy.Sigma, a);
        *n_found = (int)pts.size();
        if ((d_out || Y_out) && (int)pts.size() > cap)
            return fail(VAXSIR_ERR_BUFFER, "tangency capacity too small");
        for (size_t i = 0; i < pts.size() && (int)i < cap; ++i) {
            if (d_out) d_out[i] = pts[i].d;
            if (Y_out) Y_out[i] = pts[i].Y;
        }
        return VAXSIR_OK;
    });
}

int vaxsir_classify_regions(const vaxsir_model* m, char* buf, int buflen) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(buf, "buf")) return rc;
    return guarded([&]() -> int {
        std::string s = vaxsir::classify_regions(m->params, m->policy);
        if ((int)s.size() + 1 > buflen)
            return fail(VAXSIR_ERR_BUFFER, "label buffer too small");
        std::memcpy(buf, s.c_str(), s.size() + 1);
        return VAXSIR_OK;
    });
}

int vaxsir_peaked_level_d(const vaxsir_model* m, double Y, double a, double* d) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(d, "d")) return rc;
    return guarded([&]() -> int {
        *d = vaxsir::peaked_level_d(m->params, m->policy.Sigma, Y, a);
        return VAXSIR_OK;
    });
}

int vaxsir_critical_a_values(const vaxsir_model* m, double a_min, double a_max, int scan_n,
                             int log_scale, double* a_out, int cap, int* n_found) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(n_found, "n_found")) return rc;
    return guarded([&]() -> int {
        vaxsir::AxisSpec axis{a_min, a_max, scan_n, log_scale != 0};
        auto vals = vaxsir::critical_a_values(m->params, m->policy.Sigma, axis);
        *n_found = (int)vals.size();
        if (a_out && (int)vals.size() > cap)
            return fail(VAXSIR_ERR_BUFFER, "critical-a capacity too small");
        if (a_out)
            for (size_t i = 0; i < vals.size() && (int)i < cap; ++i) a_out[i] = vals[i];
        return VAXSIR_OK;
    });
}

int vaxsir_stability_map(const vaxsir_model* m, double Sigma_min, double Sigma_max,
                         int n_Sigma, int Sigma_log, double a_min, double a_max, int n_a,
                         int a_log, int threads, double* Y_out, unsigned char* stable_out,
                         double* margin_out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(Y_out, "Y_out")) return rc;
    if (int rc = need(stable_out, "stable_out")) return rc;
    return guarded([&]() -> int {
        vaxsir::AxisSpec s_axis{Sigma_min, Sigma_max, n_Sigma, Sigma_log != 0};
        vaxsir::AxisSpec a_axis{a_min, a_max, n_a, a_log != 0};
        int t = threads > 0 ? threads : (int)std::thread::hardware_concurrency();
        vaxsir::MapGrid grid = vaxsir::stability_map_monotone(m->params, s_axis, a_axis, t);
        for (size_t i = 0; i < grid.Y.size(); ++i) {
            Y_out[i] = grid.Y[i];
            stable_out[i] = grid.stable[i];
            if (margin_out) margin_out[i] = grid.min_margin[i];
        }
        return VAXSIR_OK;
    });
}

int vaxsir_simulate(const vaxsir_model* m, const double initial[6], double T_end,
                    double rtol, double atol, double record_stride, vaxsir_traj** out) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(initial, "initial")) return rc;
    if (int rc = need(out, "out")) return rc;
    *out = nullptr;
    return guarded([&]() -> int {
        vaxsir::SimulationConfig cfg;
        cfg.T_end = T_end;
        cfg.rtol = rtol;
        cfg.atol = atol;
        cfg.record_stride = record_stride;
        vaxsir::TrajectoryRecord rec =
            vaxsir::integrate(m->params, m->policy, to_state(initial), cfg);
        auto* tr = new vaxsir_traj_s;
        tr->flat_states.reserve(rec.state.size() * 6);
        for (const auto& s : rec.state)
            tr->flat_states.insert(tr->flat_states.end(), s.begin(), s.end());
        tr->rec = std::move(rec);
        *out = tr;
        return VAXSIR_OK;
    });
}

long vaxsir_traj_samples(const vaxsir_traj* tr) {
    return tr ? (long)tr->rec.t.size() : 0;
}

const double* vaxsir_traj_times(const vaxsir_traj* tr) {
    return tr ? tr->rec.t.data() : nullptr;
}

const double* vaxsir_traj_states(const vaxsir_traj* tr) {
    return tr ? tr->flat_states.data() : nullptr;
}

const double* vaxsir_traj_aggregate(const vaxsir_traj* tr) {
    return tr ? tr->rec.U.data() : nullptr;
}

double vaxsir_traj_drift(const vaxsir_traj* tr) {
    return tr ? tr->rec.conservation_drift : 0.0;
}

long vaxsir_traj_steps(const vaxsir_traj* tr) {
    return tr ? (long)tr->rec.n_steps : 0;
}

void vaxsir_traj_free(vaxsir_traj* tr) { delete tr; }

int vaxsir_classify(const vaxsir_model* m, const vaxsir_traj* tr, int* kind,
                    double* target_Y, double* period, double* amplitude) {
    if (int rc = need(m, "model")) return rc;
    if (int rc = need(tr, "trajectory")) return rc;
    if (int rc = need(kind, "kind")) return rc;
    return guarded([&]() -> int {
        vaxsir::AttractorClassification c =
            vaxsir::classify_attractor(m->params, m->policy, tr->rec);
        switch (c.kind) {
            case vaxsir::AttractorKind::converged_EDE: *kind = 0; break;
            case vaxsir::AttractorKind::limit_cycle: *kind = 1; break;
            case vaxsir::AttractorKind::undecided: *kind = 2; break;
        }
        if (target_Y) *target_Y = c.target_Y;
        if (period) *period = c.period;
        if (amplitude) *amplitude = c.amplitude;
        return VAXSIR_OK;
    });
}

} /* extern "C" */
