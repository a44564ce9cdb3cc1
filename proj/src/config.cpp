#include "sts/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "sts/errors.hpp"

namespace sts {

namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

json bound_to_json(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

double bound_from_json(const json& j, double sign) {
    if (j.is_null()) return sign * kInf;
    return j.get<double>();
}

template <int N>
json vec_to_json(const Eigen::Matrix<double, N, 1>& v) {
    json a = json::array();
    for (int i = 0; i < N; ++i) a.push_back(v[i]);
    return a;
}

template <int N>
Eigen::Matrix<double, N, 1> vec_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.size() != N)
        throw ConfigError(std::string(name) + " must be an array of " +
                          std::to_string(N) + " numbers");
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) v[i] = j[i].get<double>();
    return v;
}

Eigen::VectorXd vecx_from_json(const json& j, int n, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ConfigError(std::string(name) + " must be an array of " +
                          std::to_string(n) + " numbers");
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = j[i].get<double>();
    return v;
}

void apply_preset(RunConfig& cfg) {
    if (cfg.preset == "STS1") {
        cfg.theta0_deg = Vec3(90.0, -90.0, 90.0);
    } else if (cfg.preset == "STS2") {
        cfg.theta0_deg = Vec3(120.0, -120.0, 110.87);
    } else if (cfg.preset != "custom") {
        throw ConfigError("unknown maneuver preset: " + cfg.preset);
    }
}

}  // namespace

RunConfig::RunConfig() {
    u_min = Vec4(-kInf, -kInf, -kInf, 0.0);  // F_y pushes only
    u_max = Vec4::Constant(kInf);
    filter_bandwidth = 100.0 * std::numbers::pi;
}

ManeuverSpec RunConfig::maneuver_spec() const {
    ManeuverSpec spec;
    for (int i = 0; i < 3; ++i) spec.theta0[i] = deg2rad(theta0_deg[i]);
    spec.z_final = Vec3(deg2rad(z_final[0]), z_final[1], z_final[2]);
    spec.t_f = t_f;
    spec.grid_points = grid_points;
    return spec;
}

AllocationSpec RunConfig::allocation_spec() const {
    AllocationSpec alloc;
    alloc.W_u = input_weights;
    alloc.u_min = u_min;
    alloc.u_max = u_max;
    return alloc;
}

void RunConfig::validate() const {
    try {
        maneuver_spec().validate();
        allocation_spec().validate();
        search.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (filter_bandwidth <= 0.0)
        throw ConfigError("filter_bandwidth must be positive");
    if ((output_weights.array() <= 0.0).any())
        throw ConfigError("output_weights must be positive");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
    if (t_m < 0.0 || t_m > t_f) throw ConfigError("t_m must be in [0, t_f]");
    if (mc_draws < 1) throw ConfigError("monte_carlo.n_draws must be >= 1");
    if (numerics.target <= 0.0 || numerics.cap < 1)
        throw ConfigError("invalid numerics settings");
    if (lqr_weights) {
        try {
            lqr_weights->validate(6, 4);
        } catch (const Error& e) {
            throw ConfigError(std::string("lqr_weights: ") + e.what());
        }
    }
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("json parse error: ") + e.what());
    }

    RunConfig cfg;
    try {
        if (j.contains("maneuver")) {
            const json& m = j["maneuver"];
            if (m.contains("preset")) cfg.preset = m["preset"].get<std::string>();
            apply_preset(cfg);
            if (m.contains("theta0_deg"))
                cfg.theta0_deg = vec_from_json<3>(m["theta0_deg"], "theta0_deg");
            else if (cfg.preset == "custom")
                throw ConfigError("custom maneuver requires theta0_deg");
            if (m.contains("z_final"))
                cfg.z_final = vec_from_json<3>(m["z_final"], "z_final");
            if (m.contains("t_f")) cfg.t_f = m["t_f"].get<double>();
            if (m.contains("grid_points"))
                cfg.grid_points = m["grid_points"].get<int>();
        }
        if (j.contains("allocation")) {
            const json& a = j["allocation"];
            if (a.contains("input_weights"))
                cfg.input_weights =
                    vec_from_json<4>(a["input_weights"], "input_weights");
            if (a.contains("u_min")) {
                if (!a["u_min"].is_array() || a["u_min"].size() != 4)
                    throw ConfigError("u_min must be an array of 4 entries");
                for (int i = 0; i < 4; ++i)
                    cfg.u_min[i] = bound_from_json(a["u_min"][i], -1.0);
            }
            if (a.contains("u_max")) {
                if (!a["u_max"].is_array() || a["u_max"].size() != 4)
                    throw ConfigError("u_max must be an array of 4 entries");
                for (int i = 0; i < 4; ++i)
                    cfg.u_max[i] = bound_from_json(a["u_max"][i], 1.0);
            }
        }
        if (j.contains("robust")) {
            const json& r = j["robust"];
            if (r.contains("filter_bandwidth"))
                cfg.filter_bandwidth = r["filter_bandwidth"].get<double>();
            if (r.contains("output_weights"))
                cfg.output_weights =
                    vec_from_json<6>(r["output_weights"], "output_weights");
            if (r.contains("alpha")) cfg.alpha = r["alpha"].get<double>();
            if (r.contains("t_m")) cfg.t_m = r["t_m"].get<double>();
        }
        if (j.contains("search")) {
            const json& s = j["search"];
            if (s.contains("n_candidates"))
                cfg.search.n_candidates = s["n_candidates"].get<int>();
            if (s.contains("seed"))
                cfg.search.seed = s["seed"].get<std::uint64_t>();
            if (s.contains("log_space"))
                cfg.search.log_space = s["log_space"].get<bool>();
            if (s.contains("q_range")) {
                Vec2 r = vec_from_json<2>(s["q_range"], "q_range");
                cfg.search.q_min = r[0];
                cfg.search.q_max = r[1];
            }
            if (s.contains("r_range")) {
                Vec2 r = vec_from_json<2>(s["r_range"], "r_range");
                cfg.search.r_min = r[0];
                cfg.search.r_max = r[1];
            }
            if (s.contains("s_range")) {
                Vec2 r = vec_from_json<2>(s["s_range"], "s_range");
                cfg.search.s_min = r[0];
                cfg.search.s_max = r[1];
            }
        }
        if (j.contains("monte_carlo")) {
            const json& m = j["monte_carlo"];
            if (m.contains("n_draws")) cfg.mc_draws = m["n_draws"].get<int>();
            if (m.contains("seed"))
                cfg.mc_seed = m["seed"].get<std::uint64_t>();
        }
        if (j.contains("numerics")) {
            const json& n = j["numerics"];
            if (n.contains("substep_target"))
                cfg.numerics.target = n["substep_target"].get<double>();
            if (n.contains("substep_cap"))
                cfg.numerics.cap = n["substep_cap"].get<int>();
        }
        if (j.contains("lqr_weights")) {
            const json& w = j["lqr_weights"];
            LqrWeights lw;
            lw.Q = vecx_from_json(w.at("Q"), 6, "lqr_weights.Q");
            lw.R = vecx_from_json(w.at("R"), 4, "lqr_weights.R");
            lw.S = vecx_from_json(w.at("S"), 6, "lqr_weights.S");
            cfg.lqr_weights = lw;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    j["maneuver"] = {{"preset", cfg.preset},
                     {"theta0_deg", vec_to_json<3>(cfg.theta0_deg)},
                     {"z_final", vec_to_json<3>(cfg.z_final)},
                     {"t_f", cfg.t_f},
                     {"grid_points", cfg.grid_points}};
    json umin = json::array(), umax = json::array();
    for (int i = 0; i < 4; ++i) {
        umin.push_back(bound_to_json(cfg.u_min[i]));
        umax.push_back(bound_to_json(cfg.u_max[i]));
    }
    j["allocation"] = {{"input_weights", vec_to_json<4>(cfg.input_weights)},
                       {"u_min", umin},
                       {"u_max", umax}};
    j["robust"] = {{"filter_bandwidth", cfg.filter_bandwidth},
                   {"output_weights", vec_to_json<6>(cfg.output_weights)},
                   {"alpha", cfg.alpha},
                   {"t_m", cfg.t_m}};
    j["search"] = {{"n_candidates", cfg.search.n_candidates},
                   {"seed", cfg.search.seed},
                   {"log_space", cfg.search.log_space},
                   {"q_range", {cfg.search.q_min, cfg.search.q_max}},
                   {"r_range", {cfg.search.r_min, cfg.search.r_max}},
                   {"s_range", {cfg.search.s_min, cfg.search.s_max}}};
    j["monte_carlo"] = {{"n_draws", cfg.mc_draws}, {"seed", cfg.mc_seed}};
    j["numerics"] = {{"substep_target", cfg.numerics.target},
                     {"substep_cap", cfg.numerics.cap}};
    if (cfg.lqr_weights) {
        json w;
        json q = json::array(), r = json::array(), s = json::array();
        for (int i = 0; i < cfg.lqr_weights->Q.size(); ++i)
            q.push_back(cfg.lqr_weights->Q[i]);
        for (int i = 0; i < cfg.lqr_weights->R.size(); ++i)
            r.push_back(cfg.lqr_weights->R[i]);
        for (int i = 0; i < cfg.lqr_weights->S.size(); ++i)
            s.push_back(cfg.lqr_weights->S[i]);
        j["lqr_weights"] = {{"Q", q}, {"R", r}, {"S", s}};
    }
    return j.dump(2) + "\n";
}

}  // namespace sts
