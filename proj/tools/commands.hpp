#ifndef VAXSIR_TOOLS_COMMANDS_HPP
#define VAXSIR_TOOLS_COMMANDS_HPP

#include <string>

#include "scenario.hpp"

namespace cli {

struct RunContext {
    std::string outdir = ".";
    bool svg = false;
    int threads = 0;
};

void run_dfe(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_ede(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_map(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_bifurcation(const Scenario& sc, const RunContext& ctx,
                     const std::string& prefix);
void run_simulate(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_curves(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_markers(const Scenario& sc, const RunContext& ctx, const std::string& prefix);
void run_figure(const FigurePreset& preset, const RunContext& ctx);

} // namespace cli

#endif
