#pragma once

#include <optional>
#include <string>

#include "sts/integrate.hpp"
#include "sts/lqr.hpp"
#include "sts/planner.hpp"
#include "sts/search.hpp"
#include "sts/types.hpp"

namespace sts {

// Run configuration, loaded from JSON. Angles are in degrees in the JSON
// form and nowhere else; everything downstream works in radians.
struct RunConfig {
    // Maneuver boundary values. The preset fills theta0 and z_final;
    // explicit JSON fields override it.
    std::string preset = "STS1";  // STS1 | STS2 | custom
    Vec3 theta0_deg{90.0, -90.0, 90.0};
    // z_final = (trunk angle [deg], x_CoM [m], y_CoM [m]).
    Vec3 z_final{-5.0, 0.0, 0.974};
    double t_f = 3.5;
    int grid_points = 701;

    // Allocation.
    Vec4 input_weights{1.0, 1.0, 10.0, 1.0};
    Vec4 u_min;  // set in constructor; JSON null means unbounded
    Vec4 u_max;

    // Robust-metric settings.
    double filter_bandwidth = 0.0;  // set in constructor (100*pi)
    Vec6 output_weights{1.0, 1.0, 1.0, 10.0, 10.0, 10.0};
    double alpha = 0.7;
    double t_m = 2.0;

    SearchSpace search;  // 1350 candidates, seed 1 by default

    int mc_draws = 200;
    std::uint64_t mc_seed = 1;

    SubstepPolicy numerics;  // target 1.5, cap 4096

    // Fixed weights for the gains stage (optional; search supplies its own).
    std::optional<LqrWeights> lqr_weights;

    RunConfig();

    ManeuverSpec maneuver_spec() const;
    AllocationSpec allocation_spec() const;

    void validate() const;  // throws ConfigError
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace sts
