#pragma once

#include <filesystem>
#include <string>

#include "sts/config.hpp"
#include "sts/lqr.hpp"
#include "sts/planner.hpp"
#include "sts/search.hpp"
#include "sts/simulator.hpp"

namespace sts {

// File names of every stage artifact under the output directory.
struct ArtifactPaths {
    std::filesystem::path out;

    std::filesystem::path config() const { return out / "config.json"; }
    std::filesystem::path reference() const { return out / "reference.csv"; }
    std::filesystem::path gains() const { return out / "gains.csv"; }
    std::filesystem::path gains_meta() const { return out / "gains_meta.json"; }
    std::filesystem::path search_log() const { return out / "search_log.csv"; }
    std::filesystem::path search_winner() const {
        return out / "search_winner.json";
    }
    std::filesystem::path monte_carlo() const { return out / "monte_carlo.csv"; }
    std::filesystem::path summary() const {
        return out / "simulate_summary.json";
    }
    std::filesystem::path nominal_history() const {
        return out / "nominal_history.csv";
    }
    std::filesystem::path ensemble() const {
        return out / "ensemble_histories.csv";
    }
    std::filesystem::path states_svg() const { return out / "states.svg"; }
    std::filesystem::path inputs_svg() const { return out / "inputs.svg"; }
    std::filesystem::path com_svg() const { return out / "com.svg"; }
};

// Artifact serialization (exact double round-trip). Reading the reference
// back fills theta_ddot and z_ddot with zeros; no downstream stage uses
// them.
void write_reference_csv(const std::filesystem::path& path,
                         const ReferenceTrajectory& traj);
ReferenceTrajectory read_reference_csv(const std::filesystem::path& path);
void write_gains_csv(const std::filesystem::path& path,
                     const GainSchedule& gains);
GainSchedule read_gains_csv(const std::filesystem::path& path);

// Pipeline stages. Each consumes prior artifacts from `out` and writes its
// own; a missing input raises MissingArtifactError naming the stage that
// produces it.
void run_plan(const RunConfig& cfg, const std::filesystem::path& out);
void run_gains(const RunConfig& cfg, const std::filesystem::path& out);
SearchResult run_search(const RunConfig& cfg, const std::filesystem::path& out,
                        int workers);
MonteCarloReport run_simulate(const RunConfig& cfg,
                              const std::filesystem::path& out, int workers);
void run_report(const RunConfig& cfg, const std::filesystem::path& out);

// Dispatch by stage name (plan | gains | search | simulate | report).
void run_stage(const RunConfig& cfg, const std::string& stage,
               const std::filesystem::path& out, int workers);

}  // namespace sts
