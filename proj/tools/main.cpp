#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"
#include "scenario.hpp"

namespace {

int threads_from_env() {
    if (const char* e = std::getenv("VAXSIR_THREADS")) {
        int t = std::atoi(e);
        if (t > 0) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return (int)std::min(hw, 8u);
}

std::filesystem::path exe_dir() {
    std::error_code ec;
    auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) return std::filesystem::current_path();
    return p.parent_path();
}

std::string resolve_preset(int n, const std::string& explicit_path,
                           const std::string& preset_dir) {
    if (!explicit_path.empty()) return explicit_path;
    std::vector<std::filesystem::path> dirs;
    if (!preset_dir.empty()) dirs.emplace_back(preset_dir);
    if (const char* e = std::getenv("VAXSIR_PRESET_DIR")) dirs.emplace_back(e);
    dirs.push_back(exe_dir() / ".." / "presets");
    dirs.push_back(exe_dir() / "presets");
    dirs.emplace_back("presets");
    std::string file = "fig" + std::to_string(n) + ".json";
    for (const auto& d : dirs) {
        std::filesystem::path p = d / file;
        std::error_code ec;
        if (std::filesystem::exists(p, ec)) return p.string();
    }
    throw cli::SchemaError("preset file " + file +
                           " not found; set VAXSIR_PRESET_DIR or pass --preset-dir");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibria, stability maps, fold curves and stiff simulation of a "
                 "six-compartment epidemic model with prevalence-dependent "
                 "vaccination attitudes"};
    app.require_subcommand(1);

    std::string config, outdir = ".", preset_dir;
    bool svg = false;
    int fig_n = 0;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        if (need_config)
            sub->add_option("--config", config, "scenario JSON file")->required();
        sub->add_option("--outdir", outdir, "output directory (default .)");
        sub->add_flag("--svg", svg, "also write SVG plots");
    };

    CLI::App* c_dfe =
        app.add_subcommand("dfe", "disease-free equilibrium, thresholds, verdict");
    add_common(c_dfe, true);
    CLI::App* c_ede =
        app.add_subcommand("ede", "endemic equilibria with stability verdicts");
    add_common(c_ede, true);
    CLI::App* c_map =
        app.add_subcommand("stability-map", "stability verdict over a parameter grid");
    add_common(c_map, true);
    CLI::App* c_bif = app.add_subcommand(
        "bifurcation", "fold tangency curve, fold levels and root-count regions");
    add_common(c_bif, true);
    CLI::App* c_sim =
        app.add_subcommand("simulate", "integrate a scenario and classify the attractor");
    add_common(c_sim, true);
    CLI::App* c_fig = app.add_subcommand("figure", "run a bundled figure preset");
    c_fig->add_option("--n", fig_n, "figure number (3-9)")->required();
    c_fig->add_option("--config", config, "explicit preset file (overrides lookup)");
    c_fig->add_option("--preset-dir", preset_dir, "directory holding fig<n>.json");
    add_common(c_fig, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    cli::RunContext ctx{outdir, svg, threads_from_env()};
    try {
        if (c_dfe->parsed()) {
            cli::run_dfe(cli::load_scenario(config), ctx, "dfe");
        } else if (c_ede->parsed()) {
            cli::run_ede(cli::load_scenario(config), ctx, "ede");
        } else if (c_map->parsed()) {
            cli::run_map(cli::load_scenario(config), ctx, "stability_map");
        } else if (c_bif->parsed()) {
            cli::run_bifurcation(cli::load_scenario(config), ctx, "bifurcation");
        } else if (c_sim->parsed()) {
            cli::run_simulate(cli::load_scenario(config), ctx, "trajectory");
        } else if (c_fig->parsed()) {
            if (fig_n < 3 || fig_n > 9)
                throw cli::UnsupportedError("unsupported figure number " +
                                            std::to_string(fig_n));
            cli::FigurePreset preset =
                cli::load_figure_preset(resolve_preset(fig_n, config, preset_dir));
            if (preset.figure != fig_n)
                throw cli::SchemaError("preset declares figure " +
                                       std::to_string(preset.figure) + ", expected " +
                                       std::to_string(fig_n));
            cli::run_figure(preset, ctx);
        }
    } catch (const cli::UnsupportedError& e) {
        std::fprintf(stderr, "unsupported request: %s\n", e.what());
        return 3;
    } catch (const cli::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 4;
    } catch (const cli::SchemaError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
