#ifndef VAXSIR_TOOLS_SCENARIO_HPP
#define VAXSIR_TOOLS_SCENARIO_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

/* Config rejection; message names the offending key. Exit code 2. */
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

/* Request outside the supported surface (axis names, figure numbers).
 * Exit code 3. */
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

/* Numeric failure at run time (integrator abort). Exit code 4. */
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AxisConfig {
    std::string name; /* empty for the bifurcation window grids */
    double min = 0;
    double max = 0;
    int n = 1;
    bool log_scale = false;
};

struct PolicyConfig {
    std::string family;
    double Sigma = 0;
    double a = 0;
    double d = 0;
    double omega0 = 0;
    std::string label; /* curve overlays only */
};

struct Scenario {
    /* params */
    double R0 = 4;
    double v = 50;
    double h = 0;
    double epsilon = 5e-4;

    PolicyConfig policy;

    /* simulation */
    bool has_simulation = false;
    double T_end = 10;
    double rtol = 1e-8;
    double atol = 1e-10;
    double record_stride = 1e-3;
    bool near_ede = false;
    std::array<double, 6> initial{};

    /* sweep */
    bool has_sweep = false;
    AxisConfig axis1, axis2;
    std::vector<double> level_values;

    /* bifurcation */
    bool has_bifurcation = false;
    AxisConfig a_grid{"", 0.3, 1.0, 36, false};
    AxisConfig d_grid{"", 0.3, 1.0, 36, false};
    std::vector<double> a_values;
    int curve_n = 256;
    std::vector<double> bifurcation_levels;

    /* curve overlays (figure presets) */
    bool has_curves = false;
    int curves_n_Y = 257;
    std::vector<PolicyConfig> curve_policies;

    /* equilibrium markers (figure presets) */
    bool has_markers = false;
    std::vector<double> marker_a;
    bool has_critical_window = false;
    AxisConfig critical_window;

    std::string note;
};

struct FigureJob {
    std::string name;
    std::string kind; /* dfe ede map bifurcation simulate curves markers */
    Scenario scenario;
};

struct FigurePreset {
    int figure = 0;
    std::string note;
    std::vector<FigureJob> jobs;
};

Scenario load_scenario(const std::string& path);
FigurePreset load_figure_preset(const std::string& path);

} // namespace cli

#endif
