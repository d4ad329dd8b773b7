#include "percept/runner/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "percept/runner/csv.hpp"
#include "percept/runner/svg_plot.hpp"
#include "percept/standard_parts.hpp"
#include "percept/steering.hpp"

namespace percept::runner {

namespace {

namespace sp = percept::standard_parts;
namespace mc = percept::multichannel;
namespace st = percept::steering;

constexpr double kPi = 3.14159265358979323846;

struct ScenarioOutput {
    json verdicts = json::object();
    json metrics = json::object();
    CsvTable csv;
    SvgPlot plot;
};

json vec_to_json(const numerics::Vec& v) {
    json a = json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(v[i]);
    return a;
}

json mat_to_json(const numerics::Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

json eig_to_json(const std::vector<numerics::Complex>& eig) {
    json a = json::array();
    for (const numerics::Complex& z : eig) a.push_back(json::array({z.real(), z.imag()}));
    return a;
}

numerics::Vec vec_from_json(const json& a) {
    numerics::Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
}

const char* cause_name(st::FailureCause c) {
    switch (c) {
        case st::FailureCause::none: return "completed";
        case st::FailureCause::cone_exit: return "cone_exit";
        case st::FailureCause::wall_contact: return "wall_contact";
        case st::FailureCause::diverged: return "diverged";
    }
    return "?";
}

void corridor_csv(CsvTable& csv, const numerics::OdeTrajectory& traj) {
    csv.header = {"t", "x", "y", "theta", "u"};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const numerics::Vec& s = traj.states[i];
        const double u = i < traj.controls.size() ? traj.controls[i][0] : 0.0;
        csv.add_row({traj.times[i], s[0], s[1], s[2], u});
    }
}

void corridor_plot(SvgPlot& plot, const numerics::OdeTrajectory& traj, double R,
                   const char* title) {
    PlotSeries path;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        path.x.push_back(traj.states[i][1]); // along-corridor
        path.y.push_back(traj.states[i][0]); // lateral
    }
    path.label = "vehicle path";
    plot.title = title;
    plot.x_label = "y (along corridor)";
    plot.y_label = "x (lateral)";
    plot.series.push_back(std::move(path));
    plot.hlines = {R, 0.0, -R};
}

void corridor_common_metrics(ScenarioOutput& out, const st::CorridorRun& run) {
    const numerics::Vec& last = run.trajectory.final_state();
    out.verdicts["status"] = cause_name(run.cause);
    out.verdicts["completed"] = run.completed;
    const auto conv = st::converged_at(run.trajectory);
    out.verdicts["converged"] = conv.has_value();
    out.metrics["final_abs_x"] = std::abs(last[0]);
    out.metrics["final_theta_err"] = std::abs(last[2] - kPi / 2.0);
    out.metrics["exit_time"] = run.exit_time;
    if (conv) out.metrics["converged_at"] = *conv;
}

ScenarioOutput run_corridor_family(const std::string& scenario, const json& p,
                                   std::uint64_t seed) {
    const corridor::CorridorScene scene(p["R"].get<double>(), p["f"].get<double>(),
                                        p["v"].get<double>());
    const st::SteeringGain gain(p["k"].get<double>());
    const corridor::VehicleState state0{p["x0"].get<double>(), p["y0"].get<double>(),
                                        p["theta0_deg"].get<double>() * kPi / 180.0};
    const double t_end = p["t_end"].get<double>();
    const double dt = p["dt"].get<double>();

    ScenarioOutput out;
    st::CorridorRun run;
    if (scenario == "corridor") {
        run = st::simulate_two_pixel(state0, scene, gain, t_end, dt);
    } else if (scenario == "corridor-sampled") {
        run = st::simulate_sampled(state0, scene, gain,
                                   st::SampledSchedule(p["h"].get<double>()), t_end, dt);
        out.metrics["h_used"] = run.h_used;
    } else {
        st::ReceptorArray array;
        array.n_per_side = p["n_per_side"].get<int>();
        array.dropout_prob = p["dropout_prob"].get<double>();
        array.tau_noise_sigma = p["sigma"].get<double>();
        array.image_jitter = p["jitter"].get<double>();
        array.seed = seed;
        const st::NoisyRun noisy = st::simulate_noisy_array(state0, scene, gain, array, t_end, dt);
        run = noisy.run;
        out.metrics["starved_fraction"] = noisy.starved_fraction;
    }

    corridor_common_metrics(out, run);
    const st::LinearizationReport lin = st::linearize_reduced(scene, gain);
    out.metrics["k_crit"] = lin.k_crit;
    out.metrics["eigenvalues"] =
        eig_to_json({lin.eigenvalues[0], lin.eigenvalues[1]});
    corridor_csv(out.csv, run.trajectory);
    corridor_plot(out.plot, run.trajectory, scene.half_width_R, scenario.c_str());
    return out;
}

mc::LtiSystem named_system(const std::string& name) {
    const numerics::Mat A(2, 2, {0.0, 1.0, 0.0, 0.0});
    if (name == "double-integrator-1ch")
        return mc::LtiSystem(A, numerics::Mat(2, 1, {0.0, 1.0}));
    if (name == "double-integrator-2ch")
        return mc::LtiSystem(A, numerics::Mat(2, 2, {0.0, 1.0, 1.0, 0.0}));
    return mc::LtiSystem(A, numerics::Mat(2, 3, {0.0, 1.0, 1.0, 1.0, 0.0, 1.0}));
}

mc::ProjectionPattern pattern_from_json(const json& p, std::size_t m) {
    if (!p.contains("pattern") || p["pattern"].is_null())
        return mc::ProjectionPattern::full(m);
    std::vector<int> bits;
    for (const json& b : p["pattern"]) bits.push_back(b.get<int>());
    return mc::ProjectionPattern(std::move(bits));
}

void lti_csv(CsvTable& csv, const numerics::OdeTrajectory& traj, std::size_t n_controls) {
    csv.header = {"t"};
    for (std::size_t i = 0; i < 2; ++i) csv.header.push_back("x" + std::to_string(i + 1));
    for (std::size_t j = 0; j < n_controls; ++j)
        csv.header.push_back("u" + std::to_string(j + 1));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        for (std::size_t j = 0; j < traj.states[i].dim(); ++j) row.push_back(traj.states[i][j]);
        if (i < traj.controls.size())
            for (std::size_t j = 0; j < traj.controls[i].dim(); ++j)
                row.push_back(traj.controls[i][j]);
        csv.add_row(row);
    }
}

void plane_plot(SvgPlot& plot, const numerics::OdeTrajectory& traj, const numerics::Vec& goal,
                const char* title) {
    PlotSeries path;
    for (const numerics::Vec& s : traj.states) {
        path.x.push_back(s[0]);
        path.y.push_back(s[1]);
    }
    path.label = "trajectory";
    plot.title = title;
    plot.x_label = "x1";
    plot.y_label = "x2";
    plot.series.push_back(std::move(path));
    plot.markers.push_back({goal[0], goal[1]});
}

ScenarioOutput run_min_energy(const json& p) {
    const mc::LtiSystem sys = named_system(p["system"].get<std::string>());
    const mc::ProjectionPattern pattern = pattern_from_json(p, sys.m());
    const mc::SteeringTask task{vec_from_json(p["x0"]), vec_from_json(p["x1"]),
                                p["T"].get<double>()};

    ScenarioOutput out;
    out.verdicts["pattern"] = pattern.name();
    mc::MinEnergyPlan plan;
    try {
        plan = mc::min_energy_plan(sys, task, pattern);
    } catch (const NotControllableError& e) {
        out.verdicts["controllable"] = false;
        out.verdicts["status"] = std::string("not_controllable: ") + e.what();
        out.csv.header = {"t", "x1", "x2"};
        out.plot.title = "min-energy (not controllable)";
        return out;
    }
    out.verdicts["controllable"] = true;
    out.verdicts["status"] = "steered";
    const mc::MinEnergyRun run =
        mc::simulate_min_energy(sys, plan, task, p["dt"].get<double>());
    out.metrics["cost_eta"] = plan.cost_eta;
    out.metrics["realized_cost"] = run.realized_cost;
    out.metrics["endpoint_miss"] = run.endpoint_miss;
    out.metrics["z"] = vec_to_json(plan.z);
    lti_csv(out.csv, run.trajectory, sys.m());
    plane_plot(out.plot, run.trajectory, task.x1, "minimum-energy steering");
    return out;
}

ScenarioOutput run_cost_sweep(const json& p) {
    const int n_phi = p["n_phi"].get<int>();
    const double T = p["T"].get<double>();
    const std::size_t panels = static_cast<std::size_t>(p["panels"].get<int>());

    const mc::LtiSystem sys1 = named_system("double-integrator-1ch");
    const mc::LtiSystem sys2 = named_system("double-integrator-2ch");
    const mc::LtiSystem sys3 = named_system("kchannel");

    ScenarioOutput out;
    out.csv.header = {"phi", "eta_1ch", "eta_2ch", "eta_3ch"};
    PlotSeries s1, s2, s3;
    json e1 = json::array(), e2 = json::array(), e3 = json::array();
    bool ordering_ok = true;
    double max_ratio_12 = 0.0, max_ratio_23 = 0.0;

    for (int i = 0; i < n_phi; ++i) {
        const double phi = 2.0 * kPi * i / n_phi;
        numerics::Vec x1{std::cos(phi), std::sin(phi)};
        const mc::SteeringTask task{numerics::Vec(2), x1, T};
        auto cost = [&](const mc::LtiSystem& sys) {
            const mc::Gramian G =
                mc::gramian(sys, T, mc::ProjectionPattern::full(sys.m()),
                            mc::GramianMethod::quadrature, panels);
            numerics::Vec z = x1; // x0 = 0, so z = x1
            const numerics::Vec lam = numerics::solve_linear(G.W, z);
            return numerics::dot(z, lam);
        };
        const double c1 = cost(sys1), c2 = cost(sys2), c3 = cost(sys3);
        ordering_ok = ordering_ok && c1 >= c2 - 1e-10 && c2 >= c3 - 1e-10;
        max_ratio_12 = std::max(max_ratio_12, c1 / c2);
        max_ratio_23 = std::max(max_ratio_23, c2 / c3);
        out.csv.add_row({phi, c1, c2, c3});
        s1.x.push_back(phi);
        s1.y.push_back(c1);
        s2.x.push_back(phi);
        s2.y.push_back(c2);
        s3.x.push_back(phi);
        s3.y.push_back(c3);
        e1.push_back(c1);
        e2.push_back(c2);
        e3.push_back(c3);
    }

    out.verdicts["ordering_ok"] = ordering_ok;
    out.verdicts["improvement_1to2_exceeds_2to3"] = max_ratio_12 > max_ratio_23;
    out.metrics["max_ratio_1to2"] = max_ratio_12;
    out.metrics["max_ratio_2to3"] = max_ratio_23;
    out.metrics["eta_1ch"] = std::move(e1);
    out.metrics["eta_2ch"] = std::move(e2);
    out.metrics["eta_3ch"] = std::move(e3);

    s1.label = "1 channel";
    s2.label = "2 channels";
    s3.label = "3 channels";
    out.plot.title = "minimum-energy cost vs target angle";
    out.plot.x_label = "phi (rad)";
    out.plot.y_label = "cost";
    out.plot.series = {std::move(s1), std::move(s2), std::move(s3)};
    return out;
}

ScenarioOutput run_channel_classify(const json& p) {
    const mc::LtiSystem sys = named_system(p["system"].get<std::string>());
    const auto verdicts = mc::enumerate_patterns(sys, p["T"].get<double>());

    ScenarioOutput out;
    out.csv.header = {"pattern", "controllable"};
    json list = json::array();
    json non_controllable_nonempty = json::array();
    PlotSeries dots;
    int n_controllable = 0;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        out.csv.add_row({v.pattern.name(), v.controllable ? "1" : "0"});
        list.push_back(json{{"pattern", v.pattern.name()},
                            {"controllable", v.controllable},
                            {"active_channels", v.pattern.active_count()}});
        if (v.controllable) ++n_controllable;
        if (!v.controllable && v.pattern.active_count() > 0)
            non_controllable_nonempty.push_back(v.pattern.name());
        dots.x.push_back(static_cast<double>(i));
        dots.y.push_back(v.controllable ? 1.0 : 0.0);
    }
    out.verdicts["patterns"] = std::move(list);
    out.verdicts["non_controllable_nonempty"] = std::move(non_controllable_nonempty);
    out.metrics["n_patterns"] = verdicts.size();
    out.metrics["n_controllable"] = n_controllable;

    dots.label = "controllable (0/1)";
    out.plot.title = "k-channel controllability by pattern";
    out.plot.x_label = "pattern index (binary order)";
    out.plot.y_label = "controllable";
    out.plot.series.push_back(std::move(dots));
    return out;
}

// The three-channel system with the simultaneously stabilizing gains of the
// worked example (double poles at -1 for every two-channel pattern).
struct ExampleParts {
    mc::LtiSystem sys = named_system("kchannel");
    sp::GainMatrix gain;
    sp::DriftFamily family;
    sp::DriftFactorization fact;
};

ExampleParts example_parts() {
    mc::LtiSystem sys = named_system("kchannel");
    const std::vector<mc::ProjectionPattern> two_channel{
        mc::ProjectionPattern({0, 1, 1}), mc::ProjectionPattern({1, 0, 1}),
        mc::ProjectionPattern({1, 1, 0})};
    const std::vector<numerics::Complex> poles{{-1.0, 0.0}, {-1.0, 0.0}};
    sp::GainMatrix gain = sp::simultaneous_gains_solve(sys, two_channel, poles);
    sp::DriftFamily family = sp::drift_family(sys);
    // The dropout-resilient factorization: only the second row nonzero.
    const numerics::Mat hat(3, 2, {0.0, 0.0, 0.0, 1.0, 0.0, 0.0});
    sp::DriftFactorization fact = family.member(family.coordinates_of(hat));
    return ExampleParts{std::move(sys), std::move(gain), std::move(family), std::move(fact)};
}

sp::OffsetVector offset_by_name(const ExampleParts& parts, const std::string& construction,
                                const numerics::Vec& goal) {
    if (construction == "particular")
        return sp::offset_particular(parts.sys, parts.gain, goal);
    if (construction == "min_norm") return sp::offset_min_norm(parts.sys, parts.gain, goal);
    return sp::offset_from_hat_A(parts.sys, parts.fact, parts.gain, goal);
}

const char* verdict_name(sp::DropoutVerdict v) {
    switch (v) {
        case sp::DropoutVerdict::reached: return "reached";
        case sp::DropoutVerdict::diverted: return "diverted";
        case sp::DropoutVerdict::unstable: return "unstable";
    }
    return "?";
}

ScenarioOutput run_dropout(const json& p) {
    ExampleParts parts = example_parts();
    const double phi = p["goal_phi_deg"].get<double>() * kPi / 180.0;
    numerics::Vec goal{std::cos(phi), std::sin(phi)};
    const std::string construction = p["construction"].get<std::string>();
    const sp::OffsetVector offset = offset_by_name(parts, construction, goal);
    const sp::StandardPartsController ctrl =
        sp::make_controller(parts.sys, parts.gain, offset);
    const mc::ProjectionPattern pattern = pattern_from_json(p, 3);

    const sp::DropoutRun run =
        sp::simulate_dropout(ctrl, parts.sys, pattern, vec_from_json(p["x0"]),
                             p["t_end"].get<double>(), p["dt"].get<double>());

    ScenarioOutput out;
    out.verdicts["verdict"] = verdict_name(run.verdict);
    out.verdicts["pattern"] = pattern.name();
    out.verdicts["construction"] = construction;
    out.metrics["terminal_distance"] = run.terminal_distance;
    out.metrics["goal"] = vec_to_json(goal);
    out.metrics["gain_K"] = mat_to_json(parts.gain.K);
    out.metrics["offset_v"] = vec_to_json(offset.v);
    if (run.rest_point) out.metrics["rest_point"] = vec_to_json(*run.rest_point);
    lti_csv(out.csv, run.trajectory, 3);
    plane_plot(out.plot, run.trajectory, goal, "dropout response");
    return out;
}

ScenarioOutput run_markov(const json& p, std::uint64_t seed) {
    ExampleParts parts = example_parts();
    const numerics::Vec goal10{1.0, 0.0};
    const numerics::Vec goal01{0.0, 1.0};

    sp::MarkovSwitchPlan plan;
    plan.controllers.push_back(sp::make_controller(
        parts.sys, parts.gain, sp::offset_from_hat_A(parts.sys, parts.fact, parts.gain, goal10)));
    plan.controllers.push_back(sp::make_controller(
        parts.sys, parts.gain, sp::offset_from_hat_A(parts.sys, parts.fact, parts.gain, goal01)));
    const double ps = p["p_switch"].get<double>();
    plan.transition_matrix = numerics::Mat(2, 2, {1.0 - ps, ps, ps, 1.0 - ps});
    plan.dwell_dt = p["dwell"].get<double>();
    plan.seed = seed;
    plan.pattern = pattern_from_json(p, 3);

    const numerics::Vec target = vec_from_json(p["target"]);
    const sp::MarkovRun run = sp::markov_modulate(plan, parts.sys, vec_from_json(p["x0"]),
                                                  p["t_end"].get<double>(),
                                                  p["dt"].get<double>(), target);

    ScenarioOutput out;
    out.verdicts["pattern"] = plan.pattern.name();
    out.metrics["min_distance"] = run.min_distance;
    out.metrics["min_distance_time"] = run.min_distance_time;
    out.metrics["terminal_distance"] = run.terminal_distance;
    out.metrics["dwell_used"] = run.dwell_used;
    out.metrics["switch_count"] = run.switch_count;
    out.metrics["target"] = vec_to_json(target);
    lti_csv(out.csv, run.trajectory, 3);
    plane_plot(out.plot, run.trajectory, target, "Markov-modulated switching");
    return out;
}

} // namespace

RunSummary run(const ScenarioConfig& config) {
    const std::vector<std::string> violations = validate(config);
    if (!violations.empty()) throw ConfigValidationError(violations);

    std::filesystem::path out_dir = config.output_dir;
    if (out_dir.empty()) {
        const char* root = std::getenv("PERCEPT_CTL_OUTPUT");
        out_dir = (root != nullptr ? std::filesystem::path(root)
                                   : std::filesystem::path("percept-out")) /
                  config.scenario;
    }
    std::filesystem::create_directories(out_dir);

    const json params = resolved_parameters(config);
    const auto t_start = std::chrono::steady_clock::now();

    ScenarioOutput out;
    if (config.scenario == "corridor" || config.scenario == "corridor-sampled" ||
        config.scenario == "corridor-noisy")
        out = run_corridor_family(config.scenario, params, config.seed);
    else if (config.scenario == "min-energy")
        out = run_min_energy(params);
    else if (config.scenario == "cost-sweep")
        out = run_cost_sweep(params);
    else if (config.scenario == "channel-classify")
        out = run_channel_classify(params);
    else if (config.scenario == "dropout")
        out = run_dropout(params);
    else
        out = run_markov(params, config.seed);

    const double wall_clock =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    RunSummary summary;
    summary.output_dir = out_dir;
    summary.document["scenario"] = config.scenario;
    summary.document["parameters"] = params;
    summary.document["seed"] = config.seed;
    summary.document["verdicts"] = out.verdicts;
    summary.document["metrics"] = out.metrics;
    summary.document["wall_clock_s"] = wall_clock;

    write_csv(out_dir / "trajectory.csv", out.csv);
    out.plot.write(out_dir / "plot.svg");
    std::ofstream js(out_dir / "summary.json");
    if (!js) throw Error("cannot open summary.json for writing");
    js << summary.document.dump(2) << '\n';
    if (!js) throw Error("failed writing summary.json");

    return summary;
}

} // namespace percept::runner
