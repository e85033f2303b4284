#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "homogh/error.hpp"
#include "homogh/experiment.hpp"

namespace {

const std::map<std::string, std::string> kAbout{
    {"tessellate", "ideal triangles and boundary vertices (CSV, SVG)"},
    {"hororegions", "hororegion membership on a square grid"},
    {"build", "ansatz fields on a square grid"},
    {"verify", "identity checks against their budgets"},
    {"curvature-scan", "curvature on the u, v, t grid"},
    {"sweep", "radial length profiles and divergence evidence"},
    {"fingerprint", "radial-graph fingerprints of the mu family"}};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homogeneous hyperkahler ansatz experiments"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    std::optional<int> depth, grid;
    std::optional<std::uint64_t> seed;
    for (const auto& name : homogh::kCommands) {
        auto* sub = app.add_subcommand(name, kAbout.at(name));
        sub->add_option("--config", config_path, "experiment config (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--depth", depth, "tessellation depth override");
        sub->add_option("--grid", grid, "grid resolution override");
        sub->add_option("--seed", seed, "sampling seed override");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    homogh::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = homogh::load_config(config_path);
        if (!out_dir.empty()) cfg.output = out_dir;
        if (depth) cfg.grid.depth = *depth;
        if (grid) cfg.grid.resolution = *grid;
        if (seed) cfg.grid.seed = *seed;
    } catch (const homogh::ConfigError& e) {
        std::cerr << "cmd=" << command << " error=config msg=\"" << e.what() << "\"\n";
        return 2;
    }
    return homogh::run_command(command, cfg, std::cerr);
}
