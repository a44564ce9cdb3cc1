#include "sts/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "sts/csv.hpp"
#include "sts/errors.hpp"
#include "sts/linearizer.hpp"
#include "sts/model.hpp"
#include "sts/robust.hpp"
#include "sts/svg.hpp"

namespace sts {

namespace {

using json = nlohmann::ordered_json;

constexpr int kEnsembleStride = 5;  // grid downsampling for plot histories

void require(const std::filesystem::path& path, const std::string& stage) {
    if (!std::filesystem::exists(path))
        throw MissingArtifactError("missing artifact " + path.string() +
                                   "; run the `" + stage + "` stage first");
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << j.dump(2) << '\n';
    if (!f) throw Error("write failed: " + path.string());
}

json weights_to_json(const LqrWeights& w) {
    json q = json::array(), r = json::array(), s = json::array();
    for (int i = 0; i < w.Q.size(); ++i) q.push_back(w.Q[i]);
    for (int i = 0; i < w.R.size(); ++i) r.push_back(w.R[i]);
    for (int i = 0; i < w.S.size(); ++i) s.push_back(w.S[i]);
    return json{{"Q", q}, {"R", r}, {"S", s}};
}

GainSchedule compute_gain_schedule(const RunConfig& cfg,
                                   const ReferenceTrajectory& traj,
                                   const LqrWeights& w) {
    LtvSystem ltv = linearize(traj, nominal_parameter_box().nominal);
    std::vector<Eigen::MatrixXd> P = solve_riccati(ltv, w, cfg.numerics);
    return lqr_gain(P, ltv, w);
}

}  // namespace

void write_reference_csv(const std::filesystem::path& path,
                         const ReferenceTrajectory& traj) {
    std::vector<std::string> header = {
        "t",    "theta1", "theta2", "theta3", "dtheta1", "dtheta2",
        "dtheta3", "tau1", "tau2",   "Fx",     "Fy",      "z1",
        "z2",   "z3",     "dz1",    "dz2",    "dz3"};
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.size());
    for (int i = 0; i < traj.size(); ++i) {
        std::vector<double> row = {traj.times[i]};
        for (int j = 0; j < 3; ++j) row.push_back(traj.theta[i][j]);
        for (int j = 0; j < 3; ++j) row.push_back(traj.theta_dot[i][j]);
        for (int j = 0; j < 4; ++j) row.push_back(traj.u[i][j]);
        for (int j = 0; j < 3; ++j) row.push_back(traj.z[i][j]);
        for (int j = 0; j < 3; ++j) row.push_back(traj.z_dot[i][j]);
        rows.push_back(std::move(row));
    }
    csv::write(path.string(), header, rows);
}

ReferenceTrajectory read_reference_csv(const std::filesystem::path& path) {
    csv::Table t = csv::read(path.string());
    if (t.header.size() != 17)
        throw Error("unexpected reference format: " + path.string());
    const int n = static_cast<int>(t.rows.size());
    if (n < 2) throw Error("reference too short: " + path.string());
    ReferenceTrajectory traj;
    traj.times.resize(n);
    traj.theta.resize(n);
    traj.theta_dot.resize(n);
    traj.theta_ddot.assign(n, Vec3::Zero());  // not stored; unused downstream
    traj.u.resize(n);
    traj.z.resize(n);
    traj.z_dot.resize(n);
    traj.z_ddot.assign(n, Vec3::Zero());
    for (int i = 0; i < n; ++i) {
        const auto& r = t.rows[i];
        traj.times[i] = r[0];
        traj.theta[i] = Vec3(r[1], r[2], r[3]);
        traj.theta_dot[i] = Vec3(r[4], r[5], r[6]);
        traj.u[i] = Vec4(r[7], r[8], r[9], r[10]);
        traj.z[i] = Vec3(r[11], r[12], r[13]);
        traj.z_dot[i] = Vec3(r[14], r[15], r[16]);
    }
    return traj;
}

void write_gains_csv(const std::filesystem::path& path,
                     const GainSchedule& gains) {
    std::vector<std::string> header = {"t"};
    for (int r = 1; r <= 4; ++r)
        for (int c = 1; c <= 6; ++c)
            header.push_back("k" + std::to_string(r) + std::to_string(c));
    std::vector<std::vector<double>> rows;
    rows.reserve(gains.size());
    for (int i = 0; i < gains.size(); ++i) {
        std::vector<double> row = {gains.times[i]};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 6; ++c) row.push_back(gains.K[i](r, c));
        rows.push_back(std::move(row));
    }
    csv::write(path.string(), header, rows);
}

GainSchedule read_gains_csv(const std::filesystem::path& path) {
    csv::Table t = csv::read(path.string());
    if (t.header.size() != 25)
        throw Error("unexpected gains format: " + path.string());
    const int n = static_cast<int>(t.rows.size());
    if (n < 2) throw Error("gain schedule too short: " + path.string());
    GainSchedule g;
    g.times.resize(n);
    g.K.resize(n);
    for (int i = 0; i < n; ++i) {
        g.times[i] = t.rows[i][0];
        Eigen::MatrixXd K(4, 6);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 6; ++c) K(r, c) = t.rows[i][1 + 6 * r + c];
        g.K[i] = std::move(K);
    }
    return g;
}

void run_plan(const RunConfig& cfg, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    ArtifactPaths paths{out};
    ReferenceTrajectory traj =
        build_reference(cfg.maneuver_spec(), cfg.allocation_spec(),
                        nominal_parameter_box().nominal);
    write_reference_csv(paths.reference(), traj);
}

void run_gains(const RunConfig& cfg, const std::filesystem::path& out) {
    if (!cfg.lqr_weights)
        throw ConfigError("the `gains` stage requires lqr_weights in the config");
    ArtifactPaths paths{out};
    require(paths.reference(), "plan");
    ReferenceTrajectory traj = read_reference_csv(paths.reference());
    GainSchedule gains = compute_gain_schedule(cfg, traj, *cfg.lqr_weights);
    write_gains_csv(paths.gains(), gains);
    write_json(paths.gains_meta(),
               json{{"source", "fixed"},
                    {"weights", weights_to_json(*cfg.lqr_weights)}});
}

SearchResult run_search(const RunConfig& cfg, const std::filesystem::path& out,
                        int workers) {
    ArtifactPaths paths{out};
    require(paths.reference(), "plan");
    ReferenceTrajectory traj = read_reference_csv(paths.reference());

    ParameterBox box = nominal_parameter_box();
    LtvSystem ltv = linearize(traj, box.nominal);
    RobustContext ctx;
    ctx.ltv = &ltv;
    ctx.filter = build_parameter_filter(box, cfg.filter_bandwidth);
    ctx.W_e = cfg.output_weights;
    ctx.alpha = cfg.alpha;
    ctx.t_m = cfg.t_m;
    ctx.policy = cfg.numerics;

    std::vector<LqrWeights> candidates = latin_hypercube(cfg.search);
    SearchResult result = select_weights(candidates, ctx, workers);
    result.seed = cfg.search.seed;

    std::vector<std::string> header = {"candidate"};
    for (int i = 1; i <= 6; ++i) header.push_back("q" + std::to_string(i));
    for (int i = 1; i <= 4; ++i) header.push_back("r" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) header.push_back("s" + std::to_string(i));
    header.insert(header.end(), {"gamma_tm", "gamma_tf", "j_rp"});
    std::vector<std::vector<double>> rows;
    rows.reserve(result.all.size());
    for (const CandidateMetrics& m : result.all) {
        std::vector<double> row = {static_cast<double>(m.index)};
        for (int i = 0; i < 6; ++i) row.push_back(m.weights.Q[i]);
        for (int i = 0; i < 4; ++i) row.push_back(m.weights.R[i]);
        for (int i = 0; i < 6; ++i) row.push_back(m.weights.S[i]);
        row.insert(row.end(), {m.gamma_tm, m.gamma_tf, m.j_rp});
        rows.push_back(std::move(row));
    }
    csv::write(paths.search_log().string(), header, rows);

    write_json(paths.search_winner(),
               json{{"best_index", result.best_index},
                    {"j_rp", result.best_metric.J_RP},
                    {"gamma_tm", result.best_metric.gamma_tm},
                    {"gamma_tf", result.best_metric.gamma_tf},
                    {"seed", result.seed},
                    {"n_candidates", static_cast<int>(result.all.size())},
                    {"weights", weights_to_json(result.best_weights)}});

    GainSchedule gains = compute_gain_schedule(cfg, traj, result.best_weights);
    write_gains_csv(paths.gains(), gains);
    write_json(paths.gains_meta(),
               json{{"source", "search"},
                    {"weights", weights_to_json(result.best_weights)}});
    return result;
}

MonteCarloReport run_simulate(const RunConfig& cfg,
                              const std::filesystem::path& out, int workers) {
    ArtifactPaths paths{out};
    require(paths.reference(), "plan");
    require(paths.gains(), "gains (or search)");
    ReferenceTrajectory traj = read_reference_csv(paths.reference());
    GainSchedule gains = read_gains_csv(paths.gains());
    ParameterBox box = nominal_parameter_box();
    const int n = traj.size();

    // Nominal closed-loop run; doubles as a tracking-quality record.
    SimulationResult nominal = simulate_closed_loop(
        traj.x(0), box.nominal, traj, gains, cfg.numerics);
    {
        std::vector<std::string> header = {"t"};
        for (int j = 1; j <= 6; ++j) header.push_back("x" + std::to_string(j));
        for (int j = 1; j <= 4; ++j) header.push_back("u" + std::to_string(j));
        for (int j = 1; j <= 6; ++j)
            header.push_back("zeta" + std::to_string(j));
        std::vector<std::vector<double>> rows;
        rows.reserve(n);
        for (int i = 0; i < n; ++i) {
            std::vector<double> row = {nominal.times[i]};
            for (int j = 0; j < 6; ++j) row.push_back(nominal.x[i][j]);
            for (int j = 0; j < 4; ++j) row.push_back(nominal.u[i][j]);
            for (int j = 0; j < 6; ++j) row.push_back(nominal.zeta[i][j]);
            rows.push_back(std::move(row));
        }
        csv::write(paths.nominal_history().string(), header, rows);
    }
    double nominal_tracking = 0.0;
    for (int i = 0; i < n; ++i)
        nominal_tracking = std::max(
            nominal_tracking, (nominal.x[i] - traj.x(i)).cwiseAbs().maxCoeff());

    MonteCarloReport report = monte_carlo(traj, gains, box, cfg.mc_draws,
                                          cfg.mc_seed, workers, cfg.numerics);
    {
        std::vector<std::string> header = {
            "draw", "m1",  "m2",  "m3",  "I1",  "I2",  "I3",
            "l1",   "l2",  "l3",  "lc1", "lc2", "lc3", "final_x_com",
            "final_speed", "diverged", "pass",
            "max_du1", "max_du2", "max_du3", "max_du4"};
        std::vector<std::vector<double>> rows;
        rows.reserve(report.draws.size());
        for (const DrawMetrics& m : report.draws) {
            std::vector<double> row = {static_cast<double>(m.index)};
            for (int j = 0; j < 12; ++j) row.push_back(m.p[j]);
            row.insert(row.end(),
                       {m.final_x_com, m.final_speed,
                        m.diverged ? 1.0 : 0.0, m.passes() ? 1.0 : 0.0});
            for (int j = 0; j < 4; ++j) row.push_back(m.max_input_dev[j]);
            rows.push_back(std::move(row));
        }
        csv::write(paths.monte_carlo().string(), header, rows);
    }

    const int last = n - 1;
    write_json(
        paths.summary(),
        json{{"n_draws", cfg.mc_draws},
             {"seed", report.seed},
             {"n_pass", report.n_pass},
             {"n_pass_x_com", report.n_pass_x_com},
             {"n_pass_speed", report.n_pass_speed},
             {"n_diverged", report.n_diverged},
             {"pass_rate",
              static_cast<double>(report.n_pass) / cfg.mc_draws},
             {"thresholds",
              {{"x_com", kXComThreshold}, {"speed", kSpeedThreshold}}},
             {"nominal",
              {{"max_tracking_error", nominal_tracking},
               {"final_x_com", std::abs(nominal.zeta[last][1])},
               {"final_speed", std::hypot(nominal.zeta[last][4],
                                          nominal.zeta[last][5])}}}});

    // Downsampled per-draw histories for the report stage.
    {
        std::vector<ParameterVector> draws =
            sample_parameters(box, cfg.mc_draws, cfg.mc_seed);
        std::vector<std::string> header = {"draw", "t"};
        for (int j = 1; j <= 6; ++j) header.push_back("x" + std::to_string(j));
        for (int j = 1; j <= 4; ++j) header.push_back("u" + std::to_string(j));
        header.insert(header.end(), {"x_com", "y_com"});
        std::vector<std::vector<double>> rows;
        for (int d = 0; d < cfg.mc_draws; ++d) {
            if (report.draws[d].diverged) continue;
            SimulationResult sim = simulate_closed_loop(
                traj.x(0), draws[d], traj, gains, cfg.numerics);
            for (int i = 0; i < n; i += kEnsembleStride) {
                std::vector<double> row = {static_cast<double>(d),
                                           sim.times[i]};
                for (int j = 0; j < 6; ++j) row.push_back(sim.x[i][j]);
                for (int j = 0; j < 4; ++j) row.push_back(sim.u[i][j]);
                row.insert(row.end(), {sim.zeta[i][1], sim.zeta[i][2]});
                rows.push_back(std::move(row));
            }
        }
        csv::write(paths.ensemble().string(), header, rows);
    }
    return report;
}

void run_report(const RunConfig& cfg, const std::filesystem::path& out) {
    (void)cfg;
    ArtifactPaths paths{out};
    require(paths.reference(), "plan");
    require(paths.ensemble(), "simulate");
    ReferenceTrajectory traj = read_reference_csv(paths.reference());
    csv::Table ens = csv::read(paths.ensemble().string());

    const double rad2deg = 180.0 / std::numbers::pi;
    const int n = traj.size();

    // Split ensemble rows into per-draw segments (rows are grouped by draw).
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    for (std::size_t i = 0; i < ens.rows.size();) {
        std::size_t j = i;
        while (j < ens.rows.size() && ens.rows[j][0] == ens.rows[i][0]) ++j;
        segments.emplace_back(i, j);
        i = j;
    }

    auto ensemble_series = [&](int col, double scale) {
        std::vector<svg::Series> list;
        list.reserve(segments.size());
        for (auto [b, e] : segments) {
            svg::Series s;
            s.color = "#b0b0b0";
            s.width = 0.6;
            for (std::size_t i = b; i < e; ++i) {
                s.x.push_back(ens.rows[i][1]);
                s.y.push_back(ens.rows[i][col] * scale);
            }
            list.push_back(std::move(s));
        }
        return list;
    };
    auto nominal_series = [&](auto&& getter) {
        svg::Series s;
        s.color = "#000000";
        s.width = 1.4;
        s.dashed = true;
        for (int i = 0; i < n; ++i) {
            s.x.push_back(traj.times[i]);
            s.y.push_back(getter(i));
        }
        return s;
    };

    {  // Joint angles and velocities.
        std::vector<svg::Panel> panels;
        const char* names[3] = {"shank angle", "knee angle", "trunk angle"};
        for (int j = 0; j < 3; ++j) {
            svg::Panel p;
            p.title = names[j];
            p.x_label = "t [s]";
            p.y_label = "angle [deg]";
            p.series = ensemble_series(2 + j, rad2deg);
            p.series.push_back(nominal_series(
                [&, j](int i) { return traj.theta[i][j] * rad2deg; }));
            panels.push_back(std::move(p));
        }
        for (int j = 0; j < 3; ++j) {
            svg::Panel p;
            p.title = std::string(names[j]) + " rate";
            p.x_label = "t [s]";
            p.y_label = "rate [rad/s]";
            p.series = ensemble_series(5 + j, 1.0);
            p.series.push_back(nominal_series(
                [&, j](int i) { return traj.theta_dot[i][j]; }));
            panels.push_back(std::move(p));
        }
        svg::render(paths.states_svg().string(), panels, 3);
    }
    {  // Inputs.
        std::vector<svg::Panel> panels;
        const char* names[4] = {"hip torque", "shoulder torque",
                                "shoulder force x", "shoulder force y"};
        const char* units[4] = {"[N m]", "[N m]", "[N]", "[N]"};
        for (int j = 0; j < 4; ++j) {
            svg::Panel p;
            p.title = names[j];
            p.x_label = "t [s]";
            p.y_label = units[j];
            p.series = ensemble_series(8 + j, 1.0);
            p.series.push_back(
                nominal_series([&, j](int i) { return traj.u[i][j]; }));
            panels.push_back(std::move(p));
        }
        svg::render(paths.inputs_svg().string(), panels, 2);
    }
    {  // CoM trajectories.
        std::vector<svg::Panel> panels;
        svg::Panel plane;
        plane.title = "CoM path";
        plane.x_label = "x_CoM [m]";
        plane.y_label = "y_CoM [m]";
        for (auto [b, e] : segments) {
            svg::Series s;
            s.color = "#b0b0b0";
            s.width = 0.6;
            for (std::size_t i = b; i < e; ++i) {
                s.x.push_back(ens.rows[i][12]);
                s.y.push_back(ens.rows[i][13]);
            }
            plane.series.push_back(std::move(s));
        }
        {
            svg::Series s;
            s.color = "#000000";
            s.width = 1.4;
            s.dashed = true;
            for (int i = 0; i < n; ++i) {
                s.x.push_back(traj.z[i][1]);
                s.y.push_back(traj.z[i][2]);
            }
            plane.series.push_back(std::move(s));
        }
        panels.push_back(std::move(plane));
        svg::Panel xa, ya;
        xa.title = "x_CoM";
        xa.x_label = "t [s]";
        xa.y_label = "x_CoM [m]";
        xa.series = ensemble_series(12, 1.0);
        xa.series.push_back(
            nominal_series([&](int i) { return traj.z[i][1]; }));
        ya.title = "y_CoM";
        ya.x_label = "t [s]";
        ya.y_label = "y_CoM [m]";
        ya.series = ensemble_series(13, 1.0);
        ya.series.push_back(
            nominal_series([&](int i) { return traj.z[i][2]; }));
        panels.push_back(std::move(xa));
        panels.push_back(std::move(ya));
        svg::render(paths.com_svg().string(), panels, 3);
    }
}

void run_stage(const RunConfig& cfg, const std::string& stage,
               const std::filesystem::path& out, int workers) {
    if (stage == "plan")
        run_plan(cfg, out);
    else if (stage == "gains")
        run_gains(cfg, out);
    else if (stage == "search")
        run_search(cfg, out, workers);
    else if (stage == "simulate")
        run_simulate(cfg, out, workers);
    else if (stage == "report")
        run_report(cfg, out);
    else
        throw ConfigError("unknown stage: " + stage);
}

}  // namespace sts
