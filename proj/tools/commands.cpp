#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "csv.hpp"
#include "svg.hpp"
#include "vaxsir/vaxsir.h"

namespace cli {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kPaletteSize = 8;

void check(int rc, const std::string& what) {
    if (rc == VAXSIR_OK) return;
    std::string msg = what + ": " + vaxsir_last_error();
    if (rc == VAXSIR_ERR_INTEGRATION)
        throw NumericError(msg + " (failure time T=" + num17(vaxsir_error_time()) + ")");
    throw SchemaError(msg);
}

struct Model {
    vaxsir_model* m = nullptr;
    ~Model() { vaxsir_model_free(m); }
    Model() = default;
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;
};

struct Traj {
    vaxsir_traj* tr = nullptr;
    ~Traj() { vaxsir_traj_free(tr); }
};

void create(Model& g, const Scenario& sc, const PolicyConfig& pc, double h_override) {
    double h = std::isnan(h_override) ? sc.h : h_override;
    check(vaxsir_model_create(sc.R0, sc.v, h, sc.epsilon, pc.family.c_str(), pc.Sigma,
                              pc.a, pc.d, pc.omega0, &g.m),
          "model parameters");
}

void create(Model& g, const Scenario& sc) { create(g, sc, sc.policy, NAN); }

std::string outpath(const RunContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.outdir);
    return ctx.outdir + "/" + name;
}

/* Same spacing the engine uses: n=1 collapses to min. */
std::vector<double> axis_values(const AxisConfig& ax) {
    std::vector<double> v((size_t)ax.n);
    if (ax.n == 1) {
        v[0] = ax.min;
        return v;
    }
    for (int i = 0; i < ax.n; ++i) {
        double f = (double)i / (ax.n - 1);
        v[(size_t)i] =
            ax.log_scale ? ax.min * std::pow(ax.max / ax.min, f) : ax.min + (ax.max - ax.min) * f;
    }
    return v;
}

struct RootSet {
    double Y[8];
    int n = 0;
};

RootSet scan_roots(vaxsir_model* m) {
    RootSet rs;
    int suspect;
    check(vaxsir_find_ede_roots(m, 0, rs.Y, 8, &rs.n, &suspect), "endemic root scan");
    return rs;
}

} // namespace

void run_dfe(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    Model g;
    create(g, sc);
    double Rv, wcr, st[6], residual;
    check(vaxsir_reproduction_number(g.m, &Rv), "reproduction number");
    check(vaxsir_omega_cr(g.m, &wcr), "critical uptake rate");
    check(vaxsir_dfe_state(g.m, st, &residual), "disease-free state");
    int stable;
    double margin;
    check(vaxsir_dfe_stability(g.m, &stable, &margin), "disease-free stability");

    CsvWriter csv(outpath(ctx, prefix + ".csv"));
    csv.header("R_v,omega_cr,Y,Z,S,P,R,X,stable,residual");
    csv.field(Rv);
    csv.field(wcr);
    for (int i = 0; i < 6; ++i) csv.field(st[i]);
    csv.field(stable);
    csv.field(residual);
    csv.end_row();

    std::printf("R_v=%s omega_cr=%s verdict=%s\n", num6(Rv).c_str(), num6(wcr).c_str(),
                stable ? "stable" : "unstable");
}

void run_ede(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    Model g;
    create(g, sc);
    RootSet rs = scan_roots(g.m);

    CsvWriter csv(outpath(ctx, prefix + ".csv"));
    csv.header("Y,S,P,R,X,Z,margin_lower,margin_upper,asymptotic_stable,eigen_stable");
    for (int i = 0; i < rs.n; ++i) {
        double st[6], residual, margins[2], J[36], margin;
        int stable, boundary, eig_stable, eig_boundary;
        check(vaxsir_ede_state(g.m, rs.Y[i], st, &residual), "endemic state");
        check(vaxsir_simplified_criterion(g.m, rs.Y[i], &stable, &boundary, margins),
              "stability criterion");
        check(vaxsir_jacobian_ede(g.m, rs.Y[i], J), "endemic Jacobian");
        check(vaxsir_eigen_verdict(J, 6, &eig_stable, &eig_boundary, &margin),
              "eigenvalue verdict");
        csv.field(st[0]);
        csv.field(st[2]);
        csv.field(st[3]);
        csv.field(st[4]);
        csv.field(st[5]);
        csv.field(st[1]);
        csv.field(margins[0]);
        csv.field(margins[1]);
        csv.field(stable);
        csv.field(eig_stable);
        csv.end_row();
    }
    std::printf("endemic roots: %d\n", rs.n);
}

void run_map(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    if (!sc.has_sweep) throw SchemaError("missing key 'sweep'");
    const AxisConfig &a1 = sc.axis1, &a2 = sc.axis2;
    auto supported = [](const std::string& n) {
        return n == "Sigma" || n == "a" || n == "h" || n == "psi0" || n == "omega0";
    };
    if (!supported(a1.name))
        throw UnsupportedError("unsupported sweep axis '" + a1.name + "'");
    if (!supported(a2.name))
        throw UnsupportedError("unsupported sweep axis '" + a2.name + "'");
    if (a1.name == a2.name) throw UnsupportedError("sweep axes must differ");

    bool wants_pair = a1.name == "psi0" || a1.name == "omega0" || a2.name == "psi0" ||
                      a2.name == "omega0";
    bool dfe_mode = (a1.name == "psi0" && a2.name == "omega0") ||
                    (a1.name == "omega0" && a2.name == "psi0");
    if (wants_pair && !dfe_mode)
        throw UnsupportedError("axes psi0 and omega0 must be swept together");
    if (dfe_mode && sc.policy.family != "constant")
        throw UnsupportedError("a psi0/omega0 sweep requires the constant family");
    if ((a1.name == "a" || a2.name == "a") && sc.policy.family == "constant")
        throw SchemaError("sweep axis 'a' requires a prevalence-dependent family");

    std::vector<double> v1 = axis_values(a1), v2 = axis_values(a2);
    size_t n1 = v1.size(), n2 = v2.size();
    std::vector<double> Y(n1 * n2), margin(n1 * n2);
    std::vector<unsigned char> stable(n1 * n2);

    if (!dfe_mode && sc.policy.family == "monotone_exp" && a1.name == "Sigma" &&
        a2.name == "a") {
        Model g;
        create(g, sc);
        check(vaxsir_stability_map(g.m, a1.min, a1.max, a1.n, a1.log_scale ? 1 : 0,
                                   a2.min, a2.max, a2.n, a2.log_scale ? 1 : 0,
                                   ctx.threads, Y.data(), stable.data(), margin.data()),
              "stability map");
    } else {
        for (size_t i = 0; i < n1; ++i) {
            for (size_t j = 0; j < n2; ++j) {
                PolicyConfig pc = sc.policy;
                double h = sc.h;
                auto apply = [&](const std::string& name, double val) {
                    if (name == "Sigma") pc.Sigma = val;
                    else if (name == "a") pc.a = val;
                    else if (name == "h") h = val;
                    else if (name == "omega0") pc.omega0 = val;
                    /* psi0 handled with its partner below */
                };
                apply(a1.name, v1[i]);
                apply(a2.name, v2[j]);
                if (dfe_mode) {
                    double psi0 = a1.name == "psi0" ? v1[i] : v2[j];
                    double omega0 = a1.name == "omega0" ? v1[i] : v2[j];
                    pc.Sigma = psi0 + omega0;
                    pc.omega0 = omega0;
                }
                Model g;
                create(g, sc, pc, h);
                size_t node = i * n2 + j;
                if (dfe_mode) {
                    double Rv, m0;
                    int s;
                    check(vaxsir_reproduction_number(g.m, &Rv), "reproduction number");
                    check(vaxsir_dfe_stability(g.m, &s, &m0), "disease-free stability");
                    Y[node] = Rv;
                    stable[node] = (unsigned char)s;
                    margin[node] = m0;
                    continue;
                }
                RootSet rs = scan_roots(g.m);
                if (rs.n == 0) {
                    double m0;
                    int s;
                    check(vaxsir_dfe_stability(g.m, &s, &m0), "disease-free stability");
                    Y[node] = 0.0;
                    stable[node] = (unsigned char)s;
                    margin[node] = m0;
                } else {
                    double margins[2];
                    int s, boundary;
                    check(vaxsir_simplified_criterion(g.m, rs.Y[rs.n - 1], &s, &boundary,
                                                      margins),
                          "stability criterion");
                    Y[node] = rs.Y[rs.n - 1];
                    stable[node] = (unsigned char)s;
                    margin[node] = std::min(margins[0], margins[1]);
                }
            }
        }
    }

    CsvWriter csv(outpath(ctx, prefix + ".csv"));
    csv.header("axis1,axis2,Y,stable");
    for (size_t i = 0; i < n1; ++i)
        for (size_t j = 0; j < n2; ++j) {
            csv.field(v1[i]);
            csv.field(v2[j]);
            csv.field(Y[i * n2 + j]);
            csv.field((int)stable[i * n2 + j]);
            csv.end_row();
        }
    std::printf("grid %zux%zu written\n", n1, n2);

    if (ctx.svg) {
        std::vector<double> stable_field(stable.begin(), stable.end());
        std::vector<ContourSet> levels;
        levels.push_back({0.5, "#000000"});
        std::vector<ContourSet> y_levels;
        for (size_t k = 0; k < sc.level_values.size(); ++k)
            y_levels.push_back({sc.level_values[k], kPalette[k % kPaletteSize]});
        write_contour_plot(outpath(ctx, prefix + ".svg"),
                           dfe_mode ? "threshold boundary" : "stability boundary",
                           a1.name, a2.name, v1, v2, stable_field, levels, a1.log_scale,
                           a2.log_scale);
        if (!y_levels.empty())
            write_contour_plot(outpath(ctx, prefix + "_levels.svg"),
                               dfe_mode ? "reproduction number levels"
                                        : "prevalence levels",
                               a1.name, a2.name, v1, v2, Y, y_levels, a1.log_scale,
                               a2.log_scale);
    }
}

void run_bifurcation(const Scenario& sc, const RunContext& ctx,
                     const std::string& prefix) {
    if (sc.policy.family != "peaked")
        throw SchemaError("bifurcation analysis requires the peaked family");
    Model g;
    create(g, sc);
    double Ymax;
    check(vaxsir_y_max(g.m, &Ymax), "prevalence ceiling");

    std::vector<double> curve_a, curve_d, curve_Y;
    {
        CsvWriter csv(outpath(ctx, prefix + "_curve.csv"));
        csv.header("Y,a,d");
        for (int k = 1; k <= sc.curve_n; ++k) {
            double Yk = Ymax * k / (sc.curve_n + 1.0);
            double a, d;
            int valid;
            int rc = vaxsir_tangency_from_Y(g.m, Yk, &a, &d, &valid);
            if (rc == VAXSIR_ERR_DOMAIN) continue;
            check(rc, "tangency curve");
            csv.field(Yk);
            csv.field(a);
            csv.field(d);
            csv.end_row();
            curve_Y.push_back(Yk);
            curve_a.push_back(a);
            curve_d.push_back(d);
        }
    }

    int n_total = 0;
    {
        CsvWriter csv(outpath(ctx, prefix + "_dvalues.csv"));
        csv.header("a,d,Y");
        for (double a : sc.a_values) {
            double d[8], Yt[8];
            int n;
            check(vaxsir_tangency_d_values(g.m, a, d, Yt, 8, &n), "fold levels");
            for (int i = 0; i < n; ++i) {
                csv.field(a);
                csv.field(d[i]);
                csv.field(Yt[i]);
                csv.end_row();
            }
            n_total += n;
        }
    }

    std::vector<double> av = axis_values(sc.a_grid), dv = axis_values(sc.d_grid);
    std::vector<double> Ylargest(av.size() * dv.size(), 0.0);
    std::vector<double> nroots_field(av.size() * dv.size(), 0.0);
    {
        CsvWriter csv(outpath(ctx, prefix + "_regions.csv"));
        csv.header("a,d,labels,n_roots,Y_largest");
        for (size_t i = 0; i < av.size(); ++i) {
            for (size_t j = 0; j < dv.size(); ++j) {
                PolicyConfig pc = sc.policy;
                pc.a = av[i];
                pc.d = dv[j];
                Model node;
                create(node, sc, pc, NAN);
                RootSet rs = scan_roots(node.m);
                std::string label;
                for (int k = 0; k < rs.n; ++k) {
                    double margins[2];
                    int s, boundary;
                    check(vaxsir_simplified_criterion(node.m, rs.Y[k], &s, &boundary,
                                                      margins),
                          "stability criterion");
                    label += s ? 'S' : 'U';
                }
                csv.field(av[i]);
                csv.field(dv[j]);
                csv.field(label);
                csv.field(rs.n);
                csv.field(rs.n ? rs.Y[rs.n - 1] : 0.0);
                csv.end_row();
                Ylargest[i * dv.size() + j] = rs.n ? rs.Y[rs.n - 1] : 0.0;
                nroots_field[i * dv.size() + j] = (double)rs.n;
            }
        }
    }
    std::printf("tangency points: %zu, fold levels: %d, region grid %zux%zu\n",
                curve_Y.size(), n_total, av.size(), dv.size());

    if (ctx.svg) {
        Series s{"tangency", "#d62728", curve_a, curve_d};
        write_line_plot(outpath(ctx, prefix + "_curve.svg"), "fold tangency curve", "a",
                        "d", {s});
        std::vector<ContourSet> levels;
        levels.push_back({0.5, "#000000"});
        levels.push_back({1.5, "#555555"});
        levels.push_back({2.5, "#aaaaaa"});
        write_contour_plot(outpath(ctx, prefix + "_regions.svg"), "root-count regions",
                           "a", "d", av, dv, nroots_field, levels, sc.a_grid.log_scale,
                           sc.d_grid.log_scale);
        if (!sc.bifurcation_levels.empty()) {
            std::vector<ContourSet> ylv;
            for (size_t k = 0; k < sc.bifurcation_levels.size(); ++k)
                ylv.push_back({sc.bifurcation_levels[k], kPalette[k % kPaletteSize]});
            write_contour_plot(outpath(ctx, prefix + "_levels.svg"), "prevalence levels",
                               "a", "d", av, dv, Ylargest, ylv, sc.a_grid.log_scale,
                               sc.d_grid.log_scale);
        }
    }
}

void run_simulate(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    if (!sc.has_simulation) throw SchemaError("missing key 'simulation'");
    Model g;
    create(g, sc);

    double init[6];
    if (sc.near_ede) {
        RootSet rs = scan_roots(g.m);
        if (rs.n != 1)
            throw SchemaError("initial \"near_ede\" requires a unique endemic root (found " +
                              std::to_string(rs.n) + ")");
        double residual;
        check(vaxsir_ede_state(g.m, rs.Y[0], init, &residual), "endemic state");
        init[0] *= 1.05;
    } else {
        for (int i = 0; i < 6; ++i) init[i] = sc.initial[(size_t)i];
    }

    Traj t;
    check(vaxsir_simulate(g.m, init, sc.T_end, sc.rtol, sc.atol, sc.record_stride, &t.tr),
          "simulation");

    long ns = vaxsir_traj_samples(t.tr);
    const double* times = vaxsir_traj_times(t.tr);
    const double* states = vaxsir_traj_states(t.tr);
    const double* U = vaxsir_traj_aggregate(t.tr);
    {
        CsvWriter csv(outpath(ctx, prefix + ".csv"));
        csv.header("T,Y,Z,S,P,R,X,U");
        for (long k = 0; k < ns; ++k) {
            csv.field(times[k]);
            for (int c = 0; c < 6; ++c) csv.field(states[6 * k + c]);
            csv.field(U[k]);
            csv.end_row();
        }
    }

    int kind;
    double target_Y, period, amplitude;
    check(vaxsir_classify(g.m, t.tr, &kind, &target_Y, &period, &amplitude),
          "attractor classification");
    const char* kind_name = kind == 0 ? "converged_EDE" : kind == 1 ? "limit_cycle"
                                                                    : "undecided";
    {
        CsvWriter csv(outpath(ctx, prefix + "_classification.csv"));
        csv.header("kind,target_Y,period,amplitude,drift,n_steps");
        csv.field(std::string(kind_name));
        csv.field(target_Y);
        csv.field(period);
        csv.field(amplitude);
        csv.field(vaxsir_traj_drift(t.tr));
        csv.field(vaxsir_traj_steps(t.tr));
        csv.end_row();
    }
    if (kind == 0)
        std::printf("classification=converged_EDE target_Y=%s\n", num17(target_Y).c_str());
    else if (kind == 1)
        std::printf("classification=limit_cycle period=%s amplitude=%s\n",
                    num17(period).c_str(), num17(amplitude).c_str());
    else
        std::printf("classification=undecided\n");

    if (ctx.svg) {
        const char* names[7] = {"Y", "Z", "S", "P", "R", "X", "U"};
        std::vector<Series> series;
        for (int c = 0; c < 7; ++c) {
            Series s;
            s.label = names[c];
            s.color = kPalette[c % kPaletteSize];
            s.x.assign(times, times + ns);
            s.y.resize((size_t)ns);
            for (long k = 0; k < ns; ++k)
                s.y[(size_t)k] = c < 6 ? states[6 * k + c] : U[k];
            series.push_back(std::move(s));
        }
        write_line_plot(outpath(ctx, prefix + ".svg"), "trajectory", "T", "value",
                        series);
    }
}

void run_curves(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    if (!sc.has_curves) throw SchemaError("missing key 'curves'");
    Model g;
    create(g, sc);
    double Ymax;
    check(vaxsir_y_max(g.m, &Ymax), "prevalence ceiling");

    std::vector<Series> series;
    CsvWriter csv(outpath(ctx, prefix + ".csv"));
    csv.header("label,Y,value");

    Series branch{"omega_star", "#000000", {}, {}};
    for (int k = 0; k < sc.curves_n_Y; ++k) {
        double Y = Ymax * k / (sc.curves_n_Y - 1.0);
        double val;
        int rc = vaxsir_omega_star(g.m, sc.R0 * Y, &val);
        if (rc == VAXSIR_ERR_DOMAIN) continue;
        check(rc, "uptake branch");
        csv.field(std::string("omega_star"));
        csv.field(Y);
        csv.field(val);
        csv.end_row();
        branch.x.push_back(Y);
        branch.y.push_back(val);
    }
    series.push_back(std::move(branch));

    for (size_t p = 0; p < sc.curve_policies.size(); ++p) {
        const PolicyConfig& pc = sc.curve_policies[p];
        Model gp;
        create(gp, sc, pc, NAN);
        Series s{pc.label, kPalette[(p + 1) % kPaletteSize], {}, {}};
        for (int k = 0; k < sc.curves_n_Y; ++k) {
            double Y = Ymax * k / (sc.curves_n_Y - 1.0);
            double val;
            check(vaxsir_omega(gp.m, Y, &val), "uptake policy");
            csv.field(pc.label);
            csv.field(Y);
            csv.field(val);
            csv.end_row();
            s.x.push_back(Y);
            s.y.push_back(val);
        }
        series.push_back(std::move(s));
    }
    std::printf("curves: %zu\n", series.size());

    if (ctx.svg)
        write_line_plot(outpath(ctx, prefix + ".svg"), "uptake curves", "Y", "omega",
                        series);
}

void run_markers(const Scenario& sc, const RunContext& ctx, const std::string& prefix) {
    if (!sc.has_markers) throw SchemaError("missing key 'markers'");
    CsvWriter csv(outpath(ctx, prefix + ".csv"));
    csv.header("a,Y,stable,critical");

    auto emit_roots = [&](double a, int critical) {
        PolicyConfig pc = sc.policy;
        pc.a = a;
        Model g;
        create(g, sc, pc, NAN);
        RootSet rs = scan_roots(g.m);
        for (int k = 0; k < rs.n; ++k) {
            double margins[2];
            int s, boundary;
            check(vaxsir_simplified_criterion(g.m, rs.Y[k], &s, &boundary, margins),
                  "stability criterion");
            csv.field(a);
            csv.field(rs.Y[k]);
            csv.field(s);
            csv.field(critical);
            csv.end_row();
        }
        return rs.n;
    };

    int n_rows = 0;
    for (double a : sc.marker_a) n_rows += emit_roots(a, 0);

    int n_critical = 0;
    if (sc.has_critical_window) {
        Model g;
        create(g, sc);
        double ac[16];
        const AxisConfig& w = sc.critical_window;
        check(vaxsir_critical_a_values(g.m, w.min, w.max, w.n, w.log_scale ? 1 : 0, ac,
                                       16, &n_critical),
              "critical responsiveness scan");
        for (int i = 0; i < n_critical; ++i) n_rows += emit_roots(ac[i], 1);
    }
    std::printf("markers: %d (critical values: %d)\n", n_rows, n_critical);
}

void run_figure(const FigurePreset& preset, const RunContext& ctx) {
    for (const FigureJob& job : preset.jobs) {
        std::string prefix = "fig" + std::to_string(preset.figure) + "_" + job.name;
        if (job.kind == "dfe") run_dfe(job.scenario, ctx, prefix);
        else if (job.kind == "ede") run_ede(job.scenario, ctx, prefix);
        else if (job.kind == "map") run_map(job.scenario, ctx, prefix);
        else if (job.kind == "bifurcation") run_bifurcation(job.scenario, ctx, prefix);
        else if (job.kind == "simulate") run_simulate(job.scenario, ctx, prefix);
        else if (job.kind == "curves") run_curves(job.scenario, ctx, prefix);
        else if (job.kind == "markers") run_markers(job.scenario, ctx, prefix);
        else throw SchemaError("unknown job kind '" + job.kind + "'");
    }
}

} // namespace cli
