// Command-line front end: plan -> gains|search -> simulate -> report, each
// stage reading and writing artifacts under the output directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sts/config.hpp"
#include "sts/errors.hpp"
#include "sts/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed = -1;  // <0 means: keep the config's seeds
    int workers = 1;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file");
    cmd->add_option("--out", opt.out_dir, "artifact directory");
    cmd->add_option("--seed", opt.seed,
                    "override both the search and Monte Carlo seeds");
    cmd->add_option("--workers", opt.workers, "worker thread count")
        ->check(CLI::PositiveNumber);
}

int run(const std::string& stage, const CliOptions& opt) {
    sts::RunConfig cfg;
    if (!opt.config_path.empty())
        cfg = sts::load_config(opt.config_path);
    else
        cfg.validate();
    if (opt.seed >= 0) {
        cfg.search.seed = static_cast<std::uint64_t>(opt.seed);
        cfg.mc_seed = static_cast<std::uint64_t>(opt.seed);
    }

    std::filesystem::path out(opt.out_dir);
    std::filesystem::create_directories(out);
    {
        // Record the fully resolved configuration next to the artifacts.
        std::ofstream f(sts::ArtifactPaths{out}.config());
        f << sts::serialize_config(cfg);
    }
    sts::run_stage(cfg, stage, out, opt.workers);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sit-to-stand robust LQR toolkit"};
    app.require_subcommand(1);
    CliOptions opt;

    const char* stages[] = {"plan", "gains", "search", "simulate", "report"};
    const char* blurbs[] = {
        "build the reference trajectory and allocated inputs",
        "solve the finite-horizon LQR for the configured fixed weights",
        "Latin-hypercube weight search minimizing the robust metric",
        "nominal closed-loop run plus the Monte Carlo study",
        "render SVG plots from the simulation artifacts"};
    for (int i = 0; i < 5; ++i)
        add_common(app.add_subcommand(stages[i], blurbs[i]), opt);

    CLI11_PARSE(app, argc, argv);

    try {
        return run(app.get_subcommands().front()->get_name(), opt);
    } catch (const sts::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
