#include "vaxsir/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "vaxsir/equilibria.hpp"

namespace vaxsir {

namespace ode = boost::numeric::odeint;
using vec_type = boost::numeric::ublas::vector<double>;
using mat_type = boost::numeric::ublas::matrix<double>;

void SimulationConfig::validate() const {
    if (!(std::isfinite(T_end) && T_end > 0.0))
        throw std::invalid_argument("SimulationConfig: T_end must be positive");
    if (!(std::isfinite(rtol) && rtol > 0.0 && rtol <= 1e-3))
        throw std::invalid_argument("SimulationConfig: rtol must lie in (0, 1e-3]");
    if (!(std::isfinite(atol) && atol > 0.0))
        throw std::invalid_argument("SimulationConfig: atol must be positive");
    if (!(std::isfinite(record_stride) && record_stride > 0.0 && record_stride <= T_end))
        throw std::invalid_argument("SimulationConfig: record_stride must lie in (0, T_end]");
}

namespace {

struct RhsFunctor {
    const ModelParams* mp;
    const AttitudePolicy* pol;
    void operator()(const vec_type& x, vec_type& dxdt, double) const {
        std::array<double, 6> s;
        for (int i = 0; i < 6; ++i) s[i] = x(i);
        auto f = rhs_unchecked(*mp, *pol, s);
        for (int i = 0; i < 6; ++i) dxdt(i) = f[i];
    }
};

struct JacFunctor {
    const ModelParams* mp;
    const AttitudePolicy* pol;
    void operator()(const vec_type& x, mat_type& J, const double&, vec_type& dfdt) const {
        std::array<double, 6> s;
        for (int i = 0; i < 6; ++i) s[i] = x(i);
        auto j = rhs_jacobian(*mp, *pol, s);
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 6; ++k) J(i, k) = j[6 * i + k];
        for (int i = 0; i < 6; ++i) dfdt(i) = 0.0;
    }
};

} // namespace

TrajectoryRecord integrate(const ModelParams& mp, const AttitudePolicy& pol,
                           const ScaledState& initial, const SimulationConfig& cfg) {
    cfg.validate();
    check_initial_state(initial);

    const double defect0 = conservation_defect(mp, initial);
    const double neg_floor = -10.0 * cfg.atol;

    std::vector<double> times;
    {
        double count = std::floor(cfg.T_end / cfg.record_stride * (1.0 + 1e-12));
        auto K = (std::size_t)std::max(0.0, count);
        times.reserve(K + 2);
        for (std::size_t k = 0; k <= K; ++k) {
            double tk = (double)k * cfg.record_stride;
            if (tk > cfg.T_end) break;
            times.push_back(tk);
        }
        if (times.empty() || times.back() < cfg.T_end * (1.0 - 1e-12))
            times.push_back(cfg.T_end);
    }

    TrajectoryRecord rec;
    rec.t.reserve(times.size());
    rec.state.reserve(times.size());
    rec.U.reserve(times.size());

    auto record_sample = [&](double t, const std::array<double, 6>& raw) {
        std::array<double, 6> s = raw;
        for (double& c : s) {
            if (!std::isfinite(c))
                throw IntegrationError(t, "integrate: state is not finite");
            if (c < 0.0) {
                if (c < neg_floor)
                    throw IntegrationError(t, "integrate: state fell below -10*atol");
                c = 0.0;
            }
        }
        ScaledState ss = ScaledState::from_array(s);
        double defect = conservation_defect(mp, ss);
        double dev = std::abs(defect - defect0 * std::exp(-t));
        rec.conservation_drift = std::max(rec.conservation_drift, dev);
        if (dev > 1e-4)
            throw IntegrationError(t, "integrate: conservation invariant drifted beyond 1e-4");
        rec.t.push_back(t);
        rec.state.push_back(s);
        rec.U.push_back(attitude_aggregate(mp, ss));
    };

    record_sample(0.0, initial.to_array());

    vec_type x0(6);
    {
        auto arr = initial.to_array();
        for (int i = 0; i < 6; ++i) x0(i) = arr[i];
    }

    auto stepper = ode::make_dense_output<ode::rosenbrock4<double>>(cfg.atol, cfg.rtol);
    double dt0 = std::min({cfg.record_stride, mp.epsilon * 0.1, cfg.T_end * 0.1});
    stepper.initialize(x0, 0.0, dt0);

    auto system = std::make_pair(RhsFunctor{&mp, &pol}, JacFunctor{&mp, &pol});

    std::size_t next = 1;
    const std::size_t max_steps = 20000000;
    while (next < times.size()) {
        if (times[next] <= stepper.current_time()) {
            vec_type xi(6);
            stepper.calc_state(times[next], xi);
            std::array<double, 6> s;
            for (int i = 0; i < 6; ++i) s[i] = xi(i);
            record_sample(times[next], s);
            ++next;
            continue;
        }
        try {
            stepper.do_step(system);
        } catch (const std::runtime_error& e) {
            throw IntegrationError(stepper.current_time(),
                                   std::string("integrate: step control failed: ") + e.what());
        }
        ++rec.n_steps;
        if (rec.n_steps > max_steps)
            throw IntegrationError(stepper.current_time(), "integrate: step budget exhausted");
        if (std::abs(stepper.current_time_step()) < 1e-14 * std::max(1.0, std::abs(stepper.current_time())))
            throw IntegrationError(stepper.current_time(), "integrate: step size underflow");
        const vec_type& xc = stepper.current_state();
        for (int i = 0; i < 6; ++i) {
            if (!std::isfinite(xc(i)))
                throw IntegrationError(stepper.current_time(), "integrate: state is not finite");
            if (xc(i) < neg_floor)
                throw IntegrationError(stepper.current_time(),
                                       "integrate: state fell below -10*atol");
        }
    }
    return rec;
}

AttractorClassification classify_attractor(const ModelParams& mp, const AttitudePolicy& pol,
                                           const TrajectoryRecord& rec) {
    AttractorClassification out;
    if (rec.t.size() < 8) return out;
    const double t_half = rec.t.back() * 0.5;
    std::size_t start = 0;
    while (start < rec.t.size() && rec.t[start] < t_half) ++start;
    if (rec.t.size() - start < 4) return out;

    double ymin = rec.state[start][0], ymax = ymin;
    std::array<double, 6> mean{};
    for (std::size_t i = start; i < rec.t.size(); ++i) {
        ymin = std::min(ymin, rec.state[i][0]);
        ymax = std::max(ymax, rec.state[i][0]);
        for (int c = 0; c < 6; ++c) mean[c] += rec.state[i][c];
    }
    const double count = (double)(rec.t.size() - start);
    for (int c = 0; c < 6; ++c) mean[c] /= count;
    const double amp = ymax - ymin;
    out.amplitude = amp;

    if (amp < 1e-6) {
        EdeScan scan = find_ede_roots(mp, pol);
        for (const auto& root : scan.roots) {
            EquilibriumRecord ref = ede_refined(mp, pol, root.Y);
            auto target = ref.state.to_array();
            bool close = true;
            for (int c = 0; c < 6; ++c)
                if (std::abs(mean[c] - target[c]) > 1e-3) { close = false; break; }
            if (close) {
                out.kind = AttractorKind::converged_EDE;
                out.target_Y = ref.Y;
                return out;
            }
        }
        return out;
    }

    if (amp > std::max(1e-3, 1e-3 * mean[0])) {
        /* Interior maxima of Y, refined by a parabola through the triple. */
        std::vector<double> peak_t, peak_y;
        for (std::size_t i = start + 1; i + 1 < rec.t.size(); ++i) {
            double y0 = rec.state[i - 1][0], y1 = rec.state[i][0], y2 = rec.state[i + 1][0];
            if (y1 > y0 && y1 >= y2) {
                double denom = y0 - 2.0 * y1 + y2;
                double tp = rec.t[i], yp = y1;
                if (denom < 0.0) {
                    double delta = 0.5 * (y0 - y2) / denom;
                    delta = std::clamp(delta, -1.0, 1.0);
                    double dt = rec.t[i + 1] - rec.t[i];
                    tp = rec.t[i] + delta * dt;
                    yp = y1 - 0.25 * (y0 - y2) * delta;
                }
                peak_t.push_back(tp);
                peak_y.push_back(yp);
            }
        }
        if (peak_t.size() >= 3) {
            std::size_t first = peak_t.size() > 6 ? peak_t.size() - 6 : 0;
            bool heights_ok = true;
            for (std::size_t i = first; i + 1 < peak_t.size(); ++i) {
                double scale = std::max(std::abs(peak_y[i]), 1e-12);
                if (std::abs(peak_y[i + 1] - peak_y[i]) > 0.01 * scale) {
                    heights_ok = false;
                    break;
                }
            }
            if (heights_ok) {
                double period = 0.0;
                for (std::size_t i = first; i + 1 < peak_t.size(); ++i)
                    period += peak_t[i + 1] - peak_t[i];
                period /= (double)(peak_t.size() - first - 1);
                out.kind = AttractorKind::limit_cycle;
                out.period = period;
                return out;
            }
        }
        return out;
    }
    return out;
}

std::vector<AttractorClassification> bistability_experiment(
    const ModelParams& mp, const AttitudePolicy& pol,
    const std::vector<ScaledState>& initials, const SimulationConfig& cfg) {
    std::vector<AttractorClassification> out;
    out.reserve(initials.size());
    for (const auto& ic : initials)
        out.push_back(classify_attractor(mp, pol, integrate(mp, pol, ic, cfg)));
    return out;
}

const char* attractor_kind_name(AttractorKind k) {
    switch (k) {
        case AttractorKind::converged_EDE: return "converged_EDE";
        case AttractorKind::limit_cycle: return "limit_cycle";
        case AttractorKind::undecided: return "undecided";
    }
    return "?";
}

} // namespace vaxsir
