#include "vaxsir/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vaxsir/equilibria.hpp"
#include "vaxsir/stability.hpp"

namespace vaxsir {

namespace {

double recovered_a(const ModelParams& mp, double Sigma, double Y) {
    double y = mp.R0 * Y;
    double ws = omega_star(mp, Sigma, y);
    if (!(ws > 0.0))
        throw std::domain_error("tangency: omega* must be positive at Y");
    double L = mp.R0 * omega_star_prime(mp, Sigma, y) / ws;
    return (1.0 - Y * L) / Y;
}

void run_chunked(int n_jobs, int threads, const std::function<void(int)>& job) {
    threads = std::max(1, std::min(threads, n_jobs));
    if (threads == 1) {
        for (int i = 0; i < n_jobs; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([=, &job]() {
            for (int i = w; i < n_jobs; i += threads) job(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

TangencyPoint tangency_from_Y(const ModelParams& mp, double Sigma, double Y) {
    double Ymax = y_max(mp);
    if (!(Y > 0.0 && Y < Ymax))
        throw std::domain_error("tangency_from_Y: Y must lie in (0, Y_max)");
    double y = mp.R0 * Y;
    double ws = omega_star(mp, Sigma, y);
    if (!(ws > 0.0))
        throw std::domain_error("tangency_from_Y: omega* must be positive at Y");
    double wsp = omega_star_prime(mp, Sigma, y);
    double a = recovered_a(mp, Sigma, Y);
    if (!(a > 0.0))
        throw std::domain_error("tangency_from_Y: recovered responsiveness is not positive");
    double shape = a * Y * std::exp(1.0 - a * Y); /* omega/(Sigma d) for the peaked family */
    if (!(Sigma > 0.0) || !(shape > 0.0))
        throw std::domain_error("tangency_from_Y: degenerate peaked shape");
    TangencyPoint tp;
    tp.Y = Y;
    tp.a = a;
    tp.d = ws / (Sigma * shape);
    tp.model_valid = tp.d <= 1.0;
    tp.resid_value = Sigma * tp.d * shape - ws;
    tp.resid_slope = Sigma * tp.d * a * std::exp(1.0 - a * Y) * (1.0 - a * Y) - mp.R0 * wsp;
    return tp;
}

std::vector<TangencyPoint> tangency_d_values(const ModelParams& mp, double Sigma,
                                             double a, int scan_n) {
    if (scan_n < 64)
        throw std::invalid_argument("tangency_d_values: scan_n must be at least 64");
    if (!(a > 0.0))
        throw std::invalid_argument("tangency_d_values: a must be positive");
    std::vector<TangencyPoint> out;
    double Ymax = y_max(mp);
    if (Ymax <= 0.0) return out;

    auto f = [&](double Y) { return recovered_a(mp, Sigma, Y) - a; };

    std::vector<double> Ys(scan_n + 2), fs(scan_n + 2);
    Ys.front() = Ymax * 1e-10;
    Ys.back() = Ymax * (1.0 - 1e-10);
    for (int i = 1; i <= scan_n; ++i) Ys[i] = Ymax * i / (scan_n + 1.0);
    for (size_t i = 0; i < Ys.size(); ++i) fs[i] = f(Ys[i]);

    for (size_t i = 0; i + 1 < Ys.size(); ++i) {
        double root;
        if (fs[i] == 0.0) {
            root = Ys[i];
        } else if (fs[i] * fs[i + 1] < 0.0) {
            double lo = Ys[i], hi = Ys[i + 1], flo = fs[i], fhi = fs[i + 1];
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
                double fm = f(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) { hi = mid; fhi = fm; } else { lo = mid; flo = fm; }
            }
            (void)fhi;
            root = 0.5 * (lo + hi);
        } else {
            continue;
        }
        out.push_back(tangency_from_Y(mp, Sigma, root));
    }
    std::sort(out.begin(), out.end(),
              [](const TangencyPoint& l, const TangencyPoint& r) { return l.d < r.d; });
    return out;
}

std::vector<TangencyPoint> tangency_curve(const ModelParams& mp, double Sigma, int n) {
    if (n < 2) throw std::invalid_argument("tangency_curve: n must be at least 2");
    std::vector<TangencyPoint> out;
    double Ymax = y_max(mp);
    if (Ymax <= 0.0) return out;
    for (int i = 1; i <= n; ++i) {
        double Y = Ymax * i / (n + 1.0);
        out.push_back(tangency_from_Y(mp, Sigma, Y));
    }
    return out;
}

FoldCheck fold_marginality_check(const ModelParams& mp, double Sigma,
                                 const TangencyPoint& tp) {
    if (!tp.model_valid)
        throw std::invalid_argument("fold_marginality_check: point lies outside d <= 1");
    AttitudePolicy pol = AttitudePolicy::peaked(Sigma, tp.a, tp.d);
    StabilityVerdict v = simplified_criterion(mp, pol, tp.Y);
    FoldCheck fc;
    fc.lower_margin = v.margins[0];
    fc.upper_margin = v.margins[1];
    fc.marginal = std::abs(fc.lower_margin) <= 1e-8 && fc.upper_margin > 0.0;
    return fc;
}

std::string classify_regions(const ModelParams& mp, const AttitudePolicy& pol) {
    EdeScan scan = find_ede_roots(mp, pol);
    std::string s;
    for (const auto& root : scan.roots) {
        StabilityVerdict v = simplified_criterion(mp, pol, root.Y);
        s += v.stable ? 'S' : 'U';
    }
    return s;
}

std::vector<double> AxisSpec::values() const {
    if (n < 1) throw std::invalid_argument("AxisSpec: n must be positive");
    if (!(min <= max)) throw std::invalid_argument("AxisSpec: min must not exceed max");
    if (log_scale && !(min > 0.0))
        throw std::invalid_argument("AxisSpec: log scale needs positive min");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = min;
        return v;
    }
    for (int i = 0; i < n; ++i) {
        double f = (double)i / (n - 1);
        v[i] = log_scale ? min * std::pow(max / min, f) : min + (max - min) * f;
    }
    return v;
}

MapGrid stability_map_monotone(const ModelParams& mp, const AxisSpec& Sigma_axis,
                               const AxisSpec& a_axis, int threads) {
    MapGrid grid;
    grid.axis1 = Sigma_axis.values();
    grid.axis2 = a_axis.values();
    int n1 = (int)grid.axis1.size(), n2 = (int)grid.axis2.size();
    grid.Y.assign((size_t)n1 * n2, 0.0);
    grid.stable.assign((size_t)n1 * n2, 0);
    grid.min_margin.assign((size_t)n1 * n2, 0.0);

    run_chunked(n1 * n2, threads, [&](int node) {
        int i = node / n2, j = node % n2;
        AttitudePolicy pol = AttitudePolicy::monotone(grid.axis1[i], grid.axis2[j]);
        EdeScan scan = find_ede_roots(mp, pol);
        if (scan.roots.empty()) {
            StabilityVerdict v = dfe_stability(mp, pol);
            grid.Y[node] = 0.0;
            grid.stable[node] = v.stable ? 1 : 0;
            grid.min_margin[node] = v.margins[0];
            return;
        }
        const EquilibriumRecord& root = scan.roots.back();
        StabilityVerdict v = simplified_criterion(mp, pol, root.Y);
        grid.Y[node] = root.Y;
        grid.stable[node] = v.stable ? 1 : 0;
        grid.min_margin[node] = std::min(v.margins[0], v.margins[1]);
    });
    return grid;
}

RegionGrid region_grid(const ModelParams& mp, double Sigma, const AxisSpec& a_axis,
                       const AxisSpec& d_axis, int threads) {
    RegionGrid grid;
    grid.a = a_axis.values();
    grid.d = d_axis.values();
    int n1 = (int)grid.a.size(), n2 = (int)grid.d.size();
    grid.label.assign((size_t)n1 * n2, std::string());
    grid.n_roots.assign((size_t)n1 * n2, 0);

    run_chunked(n1 * n2, threads, [&](int node) {
        int i = node / n2, j = node % n2;
        AttitudePolicy pol = AttitudePolicy::peaked(Sigma, grid.a[i], grid.d[j]);
        std::string label = classify_regions(mp, pol);
        grid.n_roots[node] = (int)label.size();
        grid.label[node] = std::move(label);
    });
    return grid;
}

std::vector<double> critical_a_values(const ModelParams& mp, double Sigma,
                                      const AxisSpec& a_axis) {
    std::vector<double> avals = a_axis.values();
    if (avals.size() < 2)
        throw std::invalid_argument("critical_a_values: need at least 2 scan points");

    auto min_margin = [&](double a) {
        AttitudePolicy pol = AttitudePolicy::monotone(Sigma, a);
        EdeScan scan = find_ede_roots(mp, pol);
        if (scan.roots.empty())
            throw std::domain_error("critical_a_values: no endemic root at a in scan range");
        StabilityVerdict v = simplified_criterion(mp, pol, scan.roots.back().Y);
        return std::min(v.margins[0], v.margins[1]);
    };

    std::vector<double> out;
    double prev = min_margin(avals[0]);
    for (size_t i = 1; i < avals.size(); ++i) {
        double cur = min_margin(avals[i]);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = avals[i - 1], hi = avals[i], flo = prev;
            for (int it = 0; it < 200; ++it) {
                if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
                double mid = 0.5 * (lo + hi);
                double fm = min_margin(mid);
                if ((flo < 0.0) != (fm < 0.0)) { hi = mid; } else { lo = mid; flo = fm; }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return out;
}

double peaked_level_d(const ModelParams& mp, double Sigma, double Y, double a) {
    double Ymax = y_max(mp);
    if (!(Y > 0.0 && Y < Ymax))
        throw std::domain_error("peaked_level_d: Y must lie in (0, Y_max)");
    if (!(a > 0.0) || !(Sigma > 0.0))
        throw std::domain_error("peaked_level_d: a and Sigma must be positive");
    double ws = omega_star(mp, Sigma, mp.R0 * Y);
    return ws / (Sigma * a * Y * std::exp(1.0 - a * Y));
}

} // namespace vaxsir
