#include "dflow/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <set>

#include "dflow/diagnostics.hpp"
#include "dflow/errors.hpp"
#include "dflow/flow.hpp"
#include "dflow/spectral.hpp"

namespace dflow {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kPresets[4] = {"conservation-s2", "gauge-s6", "epsilon-continuation",
                                 "fukumoto-miyazaki"};

SolverConfig ExperimentConfig::solver_config() const {
    SolverConfig s{Grid(n, length)};
    s.coefficients = coefficients;
    s.dt = dt;
    s.t_end = t_end;
    s.cfl = cfl;
    s.projection = ProjectionPolicy::parse(projection);
    s.diag_order = diag_order;
    s.snapshot_stride = snapshot_stride;
    s.epsilon_schedule = epsilon_schedule;
    s.blowup_ceiling = blowup_ceiling;
    return s;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "target",         "model",          "preset",         "a",
        "b",              "epsilon",        "n",              "L",
        "dt",             "t_end",          "cfl",            "projection",
        "diag_order",     "snapshot_stride", "epsilon_schedule", "blowup_ceiling",
        "initial_family", "initial_k",      "initial_amp",    "initial_mode",
        "initial_center", "initial_width",  "initial_height", "initial_k1",
        "initial_k2",     "initial_plane_i", "initial_plane_j", "output_dir",
        "strict"};
    return keys;
}

json parse_object(const std::string& text, const char* what) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known_keys().count(it.key()))
            throw ParseError("unknown config key '" + it.key() + "'");
    }
    return j;
}

double need_number(const json& v, const char* key) {
    if (!v.is_number()) throw ParseError(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
}

int need_int(const json& v, const char* key) {
    if (!v.is_number_integer())
        throw ParseError(std::string("config key '") + key + "' must be an integer");
    return v.get<int>();
}

std::string need_string(const json& v, const char* key) {
    if (!v.is_string()) throw ParseError(std::string("config key '") + key + "' must be a string");
    return v.get<std::string>();
}

bool need_bool(const json& v, const char* key) {
    if (!v.is_boolean()) throw ParseError(std::string("config key '") + key + "' must be a bool");
    return v.get<bool>();
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
    const double pi = std::numbers::pi;
    if (name == "conservation-s2") {
        cfg.target_name = "s2";
        cfg.model = "dispersive";
        cfg.coefficients = {1.0, 0.5, 0.0};
        cfg.n = 256;
        cfg.length = 4.0 * pi;
        cfg.t_end = 1.0;
        cfg.snapshot_stride = 200;
        cfg.initial = InitialDataSpec{};
        cfg.initial.family = "perturbed-circle";
        cfg.initial.k = 2;
        cfg.initial.amp = 0.1;
        cfg.initial.mode = 6;
    } else if (name == "gauge-s6") {
        cfg.target_name = "s6";
        cfg.model = "dispersive";
        cfg.coefficients = {1.0, 0.5, 0.0};
        cfg.n = 256;
        cfg.length = 2.0 * pi;
        cfg.t_end = 0.005;
        cfg.snapshot_stride = 100;
        cfg.initial = InitialDataSpec{};
        cfg.initial.family = "perturbed-circle";
        cfg.initial.k = 1;
        cfg.initial.amp = 0.1;
        cfg.initial.mode = 3;
    } else if (name == "epsilon-continuation") {
        cfg.target_name = "s2";
        cfg.model = "dispersive";
        cfg.coefficients = {1.0, 0.5, 1e-2};
        cfg.n = 256;
        cfg.length = 4.0 * pi;
        cfg.t_end = 0.05;
        cfg.snapshot_stride = 500;
        cfg.epsilon_schedule = {1e-2, 1e-3, 1e-4};
        cfg.initial = InitialDataSpec{};
        cfg.initial.family = "perturbed-circle";
        cfg.initial.k = 2;
        cfg.initial.amp = 0.05;
        cfg.initial.mode = 4;
    } else if (name == "fukumoto-miyazaki") {
        cfg.target_name = "s2";
        cfg.model = "fukumoto-miyazaki";
        cfg.coefficients = {0.2, 0.1, 0.0};
        cfg.n = 256;
        cfg.length = 4.0 * pi;
        cfg.t_end = 0.5;
        // Small |a| inflates the auto step; tighten it so time integration
        // error stays below the conservation verdicts.
        cfg.cfl = 0.1;
        cfg.snapshot_stride = 200;
        cfg.initial = InitialDataSpec{};
        cfg.initial.family = "perturbed-circle";
        cfg.initial.k = 2;
        cfg.initial.amp = 0.1;
        cfg.initial.mode = 5;
    } else {
        throw BadParameters("unknown preset '" + name + "'");
    }
    cfg.preset = name;
}

void apply_keys(ExperimentConfig& cfg, const json& m) {
    auto has = [&m](const char* k) { return m.find(k) != m.end(); };
    if (has("target")) cfg.target_name = need_string(m.at("target"), "target");
    if (has("model")) cfg.model = need_string(m.at("model"), "model");
    if (has("a")) cfg.coefficients.a = need_number(m.at("a"), "a");
    if (has("b")) cfg.coefficients.b = need_number(m.at("b"), "b");
    if (has("epsilon")) cfg.coefficients.epsilon = need_number(m.at("epsilon"), "epsilon");
    if (has("n")) cfg.n = need_int(m.at("n"), "n");
    if (has("L")) cfg.length = need_number(m.at("L"), "L");
    if (has("dt")) {
        const json& v = m.at("dt");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto")
                throw ParseError("config key 'dt' must be a number or \"auto\"");
            cfg.dt.reset();
        } else {
            cfg.dt = need_number(v, "dt");
        }
    }
    if (has("t_end")) cfg.t_end = need_number(m.at("t_end"), "t_end");
    if (has("cfl")) cfg.cfl = need_number(m.at("cfl"), "cfl");
    if (has("projection")) cfg.projection = need_string(m.at("projection"), "projection");
    if (has("diag_order")) cfg.diag_order = need_int(m.at("diag_order"), "diag_order");
    if (has("snapshot_stride"))
        cfg.snapshot_stride = need_int(m.at("snapshot_stride"), "snapshot_stride");
    if (has("epsilon_schedule")) {
        const json& v = m.at("epsilon_schedule");
        if (!v.is_array()) throw ParseError("config key 'epsilon_schedule' must be an array");
        cfg.epsilon_schedule.clear();
        for (const auto& e : v) cfg.epsilon_schedule.push_back(need_number(e, "epsilon_schedule"));
    }
    if (has("blowup_ceiling")) cfg.blowup_ceiling = need_number(m.at("blowup_ceiling"), "blowup_ceiling");
    if (has("initial_family")) cfg.initial.family = need_string(m.at("initial_family"), "initial_family");
    if (has("initial_k")) cfg.initial.k = need_int(m.at("initial_k"), "initial_k");
    if (has("initial_amp")) cfg.initial.amp = need_number(m.at("initial_amp"), "initial_amp");
    if (has("initial_mode")) cfg.initial.mode = need_int(m.at("initial_mode"), "initial_mode");
    if (has("initial_center")) cfg.initial.center = need_number(m.at("initial_center"), "initial_center");
    if (has("initial_width")) cfg.initial.width = need_number(m.at("initial_width"), "initial_width");
    if (has("initial_height")) cfg.initial.height = need_number(m.at("initial_height"), "initial_height");
    if (has("initial_k1")) cfg.initial.k1 = need_int(m.at("initial_k1"), "initial_k1");
    if (has("initial_k2")) cfg.initial.k2 = need_int(m.at("initial_k2"), "initial_k2");
    if (has("initial_plane_i")) cfg.initial.plane_i = need_int(m.at("initial_plane_i"), "initial_plane_i");
    if (has("initial_plane_j")) cfg.initial.plane_j = need_int(m.at("initial_plane_j"), "initial_plane_j");
    if (has("output_dir")) cfg.output_dir = need_string(m.at("output_dir"), "output_dir");
    if (has("strict")) cfg.strict = need_bool(m.at("strict"), "strict");
}

void apply_model(ExperimentConfig& cfg, const json& m) {
    auto pinned = [&m](const char* key, double want, double got) {
        if (m.find(key) != m.end() && std::abs(got - want) > 1e-15 * std::max(1.0, std::abs(want)))
            return true;
        return false;
    };
    if (cfg.model == "dispersive") return;
    if (cfg.model == "darios") {
        if (pinned("a", 0.0, cfg.coefficients.a))
            throw ValidationError("model darios pins a = 0; drop the 'a' key");
        if (pinned("b", 0.0, cfg.coefficients.b))
            throw ValidationError("model darios pins b = 0; drop the 'b' key");
        if (m.find("target") != m.end() && cfg.target_name != "s2")
            throw ValidationError("model darios runs on target s2");
        cfg.coefficients.a = 0.0;
        cfg.coefficients.b = 0.0;
        cfg.target_name = "s2";
        return;
    }
    if (cfg.model == "fukumoto-miyazaki") {
        if (m.find("target") != m.end() && cfg.target_name != "s2")
            throw ValidationError("model fukumoto-miyazaki runs on target s2");
        cfg.target_name = "s2";
        const double want = cfg.coefficients.a / 2.0;
        if (pinned("b", want, cfg.coefficients.b))
            throw ValidationError("model fukumoto-miyazaki pins b = a/2");
        cfg.coefficients.b = want;
        return;
    }
    throw ValidationError("unknown model '" + cfg.model +
                          "' (expected dispersive, darios, or fukumoto-miyazaki)");
}

char* fmt(char* buf, size_t cap, double v) {
    std::snprintf(buf, cap, "%.6e", v);
    return buf;
}

struct VerdictLog {
    std::ostream& out;
    int fails = 0;

    void line(const char* name, bool ok, double value, const std::string& limit) {
        char b[40];
        out << (ok ? "[PASS] " : "[FAIL] ") << name << ": value=" << fmt(b, sizeof b, value)
            << " limit=" << limit << "\n";
        if (!ok) ++fails;
    }
    void info(const std::string& text) { out << "[info] " << text << "\n"; }
};

std::string limit_le(double bound) {
    char b[40];
    return std::string("<=") + fmt(b, sizeof b, bound);
}

json summary_of(const Trajectory& traj) {
    const auto& rs = traj.records;
    double max_constraint = 0.0;
    double max_drift_l2 = 0.0;
    std::optional<double> max_drift_e;
    if (!rs.empty()) {
        const double l2_0 = rs.front().l2;
        const std::optional<double> e0 = rs.front().energy;
        for (const auto& r : rs) {
            max_constraint = std::max(max_constraint, r.constraint);
            if (l2_0 > 0.0) max_drift_l2 = std::max(max_drift_l2, std::abs(r.l2 - l2_0) / l2_0);
            if (e0 && r.energy) {
                const double denom = std::max(std::abs(*e0), 1e-12);
                const double d = std::abs(*r.energy - *e0) / denom;
                max_drift_e = std::max(max_drift_e.value_or(0.0), d);
            }
        }
    }
    json s;
    s["termination"] = termination_name(traj.termination);
    s["t_final"] = traj.t_final;
    s["max_constraint"] = max_constraint;
    s["max_drift_l2"] = max_drift_l2;
    s["max_drift_E"] = max_drift_e ? json(*max_drift_e) : json(nullptr);
    s["doubling_time_N4"] =
        traj.doubling_time_n4 ? json(*traj.doubling_time_n4) : json(nullptr);
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out.good()) throw ValidationError("short write to '" + path.string() + "'");
}

void write_artifacts(const Trajectory& traj, const SolverConfig& scfg, const fs::path& dir) {
    fs::create_directories(dir);
    char name[48];
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::snprintf(name, sizeof name, "snapshot_%06zu.json", i);
        write_text(dir / name, to_json(traj.snapshots[i]));
    }
    std::string csv = csv_header(scfg.diag_order) + "\n";
    for (const auto& r : traj.records) csv += csv_row(r) + "\n";
    write_text(dir / "diagnostics.csv", csv);
    write_text(dir / "summary.json", summary_of(traj).dump(2) + "\n");
}

/// Verdicts over a finished trajectory's diagnostic records.
int judge_run(const Trajectory& traj, const ExperimentConfig& cfg, std::ostream& log) {
    VerdictLog v{log};
    const auto& rs = traj.records;
    const double a = cfg.coefficients.a;
    const double eps = cfg.coefficients.epsilon;

    v.line("completed", traj.termination == Termination::Completed,
           static_cast<double>(traj.termination == Termination::Completed), "=1");

    if (!rs.empty()) {
        double max_constraint = 0.0;
        for (const auto& r : rs) max_constraint = std::max(max_constraint, r.constraint);
        v.line("constraint", max_constraint <= 1e-8, max_constraint, limit_le(1e-8));

        const double l2_0 = rs.front().l2;
        if (eps == 0.0) {
            double drift = 0.0;
            for (const auto& r : rs) drift = std::max(drift, std::abs(r.l2 - l2_0) / l2_0);
            v.line("l2_conservation", drift <= 1e-5, drift, limit_le(1e-5));
        } else {
            double rise = 0.0;
            double worst_res = 0.0;
            for (size_t i = 1; i < rs.size(); ++i) {
                rise = std::max(rise, (rs[i].l2 - rs[i - 1].l2) / l2_0);
                if (rs[i].dissipation_residual)
                    worst_res = std::max(worst_res, *rs[i].dissipation_residual);
            }
            v.line("l2_monotone", rise <= 1e-10, rise, limit_le(1e-10));
            v.line("dissipation_balance", worst_res <= 0.05, worst_res, limit_le(0.05));
        }

        if (rs.front().energy) {
            const auto target = make_target(cfg.target_name);
            const double want_b = a * target->gauss_curvature().value_or(0.0) / 2.0;
            const double e0 = *rs.front().energy;
            double drift = 0.0;
            for (const auto& r : rs)
                if (r.energy)
                    drift = std::max(drift, std::abs(*r.energy - e0) / std::max(std::abs(e0), 1e-12));
            if (eps == 0.0 && std::abs(cfg.coefficients.b - want_b) <= 1e-12 * std::max(1.0, std::abs(want_b))) {
                v.line("energy_conservation", drift <= 1e-5, drift, limit_le(1e-5));
            } else {
                char buf[40];
                v.info(std::string("energy drift ") + fmt(buf, sizeof buf, drift) +
                       " (not conserved for these coefficients)");
            }
        }

        if (a != 0.0) {
            const double cap = 1.0 + std::exp(rs.front().l2 / (3.0 * std::abs(a)));
            double worst_bound = 0.0;
            bool sandwich_ok = true;
            double worst_ratio = 1.0;
            for (const auto& r : rs) {
                worst_bound = std::max(worst_bound, r.gauge_bound);
                const double h = std::sqrt(r.sobolev_sq.back());
                const double nm = std::sqrt(r.gauge_energy_sq);
                if (h > 0.0 && nm > 0.0) {
                    const double ratio = nm / h;
                    worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
                    if (ratio > cap || ratio < 1.0 / cap) sandwich_ok = false;
                }
            }
            v.line("gauge_bound", worst_bound <= cap, worst_bound, limit_le(cap));
            char buf[40];
            v.line("norm_equivalence", sandwich_ok, worst_ratio,
                   std::string("<=") + fmt(buf, sizeof buf, cap));
        }

        if (traj.doubling_time_n4) {
            char buf[40];
            v.info(std::string("N_4 doubled at t=") + fmt(buf, sizeof buf, *traj.doubling_time_n4));
        } else {
            v.info("N_4 never doubled");
        }
    }

    if (traj.termination != Termination::Completed) return exit_code_for(traj.termination);
    return v.fails > 0 ? kExitCheckFailed : kExitCompleted;
}

Trajectory run_one(const ExperimentConfig& cfg, const std::atomic<bool>* abort_requested,
                   const fs::path& dir) {
    const auto target = make_target(cfg.target_name);
    SolverConfig scfg = cfg.solver_config();
    scfg.validate(*target);
    const MapState u0 = make_initial_data(scfg.grid, target, cfg.initial);
    Trajectory traj = run(u0, scfg, abort_requested);
    write_artifacts(traj, scfg, dir);
    return traj;
}

}  // namespace

ExperimentConfig parse_config(const std::string& config_text, const std::string& overrides_text) {
    const json file = parse_object(config_text, "config");
    const json over = parse_object(overrides_text, "overrides");
    json merged = file;
    merged.update(over);

    ExperimentConfig cfg;
    if (merged.find("preset") != merged.end())
        apply_preset(cfg, need_string(merged.at("preset"), "preset"));
    if (cfg.preset == "fukumoto-miyazaki" && merged.find("model") != merged.end() &&
        need_string(merged.at("model"), "model") != "fukumoto-miyazaki")
        throw ValidationError("preset fukumoto-miyazaki pins the model");

    apply_keys(cfg, merged);
    apply_model(cfg, merged);

    const auto target = make_target(cfg.target_name);
    cfg.solver_config().validate(*target);
    return cfg;
}

std::string describe_config(const ExperimentConfig& cfg) {
    json j;
    j["target"] = cfg.target_name;
    j["model"] = cfg.model;
    if (!cfg.preset.empty()) j["preset"] = cfg.preset;
    j["a"] = cfg.coefficients.a;
    j["b"] = cfg.coefficients.b;
    j["epsilon"] = cfg.coefficients.epsilon;
    j["n"] = cfg.n;
    j["L"] = cfg.length;
    if (cfg.dt)
        j["dt"] = *cfg.dt;
    else
        j["dt"] = "auto";
    j["t_end"] = cfg.t_end;
    j["cfl"] = cfg.cfl;
    j["projection"] = cfg.projection;
    j["diag_order"] = cfg.diag_order;
    j["snapshot_stride"] = cfg.snapshot_stride;
    j["epsilon_schedule"] = cfg.epsilon_schedule;
    j["blowup_ceiling"] = cfg.blowup_ceiling;
    j["initial_family"] = cfg.initial.family;
    j["initial_k"] = cfg.initial.k;
    j["initial_amp"] = cfg.initial.amp;
    j["initial_mode"] = cfg.initial.mode;
    j["initial_center"] = cfg.initial.center;
    j["initial_width"] = cfg.initial.width;
    j["initial_height"] = cfg.initial.height;
    j["initial_k1"] = cfg.initial.k1;
    j["initial_k2"] = cfg.initial.k2;
    j["initial_plane_i"] = cfg.initial.plane_i;
    j["initial_plane_j"] = cfg.initial.plane_j;
    j["output_dir"] = cfg.output_dir;
    j["strict"] = cfg.strict;
    // Only real config keys: the output must parse back unchanged.
    return j.dump(2) + "\n";
}

int exit_code_for(Termination t) {
    switch (t) {
        case Termination::Completed: return kExitCompleted;
        case Termination::TubeExceeded: return kExitTubeExceeded;
        case Termination::BlowupDetected: return kExitBlowup;
        case Termination::UserAbort: return kExitAborted;
    }
    return kExitUsage;
}

int run_single(const ExperimentConfig& cfg, std::ostream& log,
               const std::atomic<bool>* abort_requested) {
    SolverConfig scfg = cfg.solver_config();
    log << "run: target=" << cfg.target_name << " model=" << cfg.model
        << " a=" << cfg.coefficients.a << " b=" << cfg.coefficients.b
        << " eps=" << cfg.coefficients.epsilon << " n=" << cfg.n << " L=" << cfg.length
        << " dt=" << scfg.effective_dt() << " steps=" << scfg.step_count() << "\n";
    const Trajectory traj = run_one(cfg, abort_requested, cfg.output_dir);
    log << "termination=" << termination_name(traj.termination) << " t_final=" << traj.t_final
        << " steps_taken=" << traj.steps_taken << "\n";
    const int code = judge_run(traj, cfg, log);
    log << "artifacts: " << cfg.output_dir << "\n";
    return code;
}

int run_sweep(const ExperimentConfig& cfg, std::ostream& log,
              const std::atomic<bool>* abort_requested) {
    if (cfg.epsilon_schedule.empty())
        throw ValidationError("sweep needs a nonempty epsilon_schedule");
    const size_t k = cfg.epsilon_schedule.size();

    std::vector<ExperimentConfig> members(k, cfg);
    for (size_t i = 0; i < k; ++i) {
        members[i].coefficients.epsilon = cfg.epsilon_schedule[i];
        members[i].epsilon_schedule.clear();
        members[i].output_dir = (fs::path(cfg.output_dir) / ("eps_" + std::to_string(i))).string();
    }

    std::vector<Trajectory> trajs(k);
    if (cfg.strict) {
        for (size_t i = 0; i < k; ++i)
            trajs[i] = run_one(members[i], abort_requested, members[i].output_dir);
    } else {
        std::vector<std::future<Trajectory>> futures;
        futures.reserve(k);
        for (size_t i = 0; i < k; ++i)
            futures.push_back(std::async(std::launch::async, [&, i] {
                return run_one(members[i], abort_requested, members[i].output_dir);
            }));
        for (size_t i = 0; i < k; ++i) trajs[i] = futures[i].get();
    }

    VerdictLog v{log};
    int worst_exit = kExitCompleted;
    for (size_t i = 0; i < k; ++i) {
        log << "eps=" << cfg.epsilon_schedule[i]
            << " termination=" << termination_name(trajs[i].termination)
            << " t_final=" << trajs[i].t_final << "\n";
        worst_exit = std::max(worst_exit, exit_code_for(trajs[i].termination));
    }

    std::vector<double> gaps;
    const bool all_done = worst_exit == kExitCompleted;
    if (all_done && k >= 2) {
        for (size_t i = 0; i + 1 < k; ++i) {
            const auto& p = trajs[i].snapshots.back().points;
            const auto& q = trajs[i + 1].snapshots.back().points;
            gaps.push_back((p - q).cwiseAbs().maxCoeff());
        }
        bool decreasing = true;
        for (size_t i = 0; i + 1 < gaps.size(); ++i)
            if (gaps[i + 1] >= gaps[i]) decreasing = false;
        if (gaps.size() >= 2)
            v.line("gaps_decreasing", decreasing, gaps.back(), "monotone");
        const double ux_scale = std::sqrt(trajs[0].records.front().l2);
        v.line("final_gap", gaps.back() <= 1e-3 * ux_scale, gaps.back(),
               limit_le(1e-3 * ux_scale));
    }

    json s;
    s["epsilons"] = cfg.epsilon_schedule;
    s["gaps"] = gaps;
    {
        std::vector<std::string> terms;
        for (const auto& t : trajs) terms.emplace_back(termination_name(t.termination));
        s["terminations"] = terms;
    }
    s["t_end"] = cfg.t_end;
    fs::create_directories(cfg.output_dir);
    write_text(fs::path(cfg.output_dir) / "sweep_summary.json", s.dump(2) + "\n");
    log << "artifacts: " << cfg.output_dir << "\n";

    if (worst_exit != kExitCompleted) return worst_exit;
    return v.fails > 0 ? kExitCheckFailed : kExitCompleted;
}

namespace {

MapState sample_state(const Grid& grid, std::shared_ptr<const TargetManifold> target) {
    if (target->kind() == TargetKind::CliffordTorus2) {
        InitialDataSpec w;
        w.family = "torus-winding";
        w.k1 = 1;
        w.k2 = 2;
        MapState u = make_initial_data(grid, target, w);
        const Eigen::ArrayXd th = 2.0 * std::numbers::pi / grid.length * grid.nodes().array();
        Eigen::MatrixXd pts = u.points;
        pts.col(0).array() += 0.03 * (2.0 * th).sin();
        pts.col(3).array() += 0.03 * (3.0 * th).cos();
        return MapState(grid, 0.0, target->project(pts), target);
    }
    InitialDataSpec s;
    s.family = "perturbed-circle";
    s.k = target->kind() == TargetKind::Sphere6 ? 1 : 2;
    s.amp = 0.1;
    s.mode = 3;
    return make_initial_data(grid, target, s);
}

Eigen::MatrixXd wave_field(const Grid& grid, int d, double phase) {
    const Eigen::ArrayXd th = 2.0 * std::numbers::pi / grid.length * grid.nodes().array();
    Eigen::MatrixXd X(grid.n, d);
    for (int j = 0; j < d; ++j)
        X.col(j) = ((static_cast<double>(j % 3) + 1.0) * th + phase + 0.3 * j).sin();
    return X;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

int run_checks(const ExperimentConfig& cfg, std::ostream& log) {
    const auto target = make_target(cfg.target_name);
    const Grid grid = cfg.grid();
    VerdictLog v{log};

    auto guarded = [&v](const char* name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            v.line(name, false, std::nan(""), std::string("threw: ") + e.what());
        }
    };

    const MapState u = sample_state(grid, target);
    const Eigen::MatrixXd& q = u.points;
    const Eigen::MatrixXd X = target->tangent_project(q, wave_field(grid, target->ambient_dim(), 0.2));
    const Eigen::MatrixXd Y = target->tangent_project(q, wave_field(grid, target->ambient_dim(), 1.1));

    guarded("projection_idempotent", [&] {
        const Eigen::MatrixXd p2 = target->project(q);
        v.line("projection_idempotent", max_abs(p2 - q) <= 1e-13, max_abs(p2 - q), limit_le(1e-13));
    });
    guarded("constraint_after_projection", [&] {
        v.line("constraint_after_projection", u.constraint_violation() <= 1e-12,
               u.constraint_violation(), limit_le(1e-12));
    });
    guarded("tangent_projector", [&] {
        const Eigen::MatrixXd r1 = target->tangent_project(q, X) - X;
        const Eigen::MatrixXd raw = wave_field(grid, target->ambient_dim(), 2.3);
        const Eigen::MatrixXd px = target->tangent_project(q, raw);
        const double ortho = (pointwise_dot(px, raw - px)).cwiseAbs().maxCoeff();
        const double worst = std::max(max_abs(r1), ortho);
        v.line("tangent_projector", worst <= 1e-12, worst, limit_le(1e-12));
    });
    guarded("second_fundamental_form", [&] {
        const Eigen::MatrixXd axy = target->second_fundamental_form(q, X, Y);
        const double tangential = max_abs(target->tangent_project(q, axy));
        const double asym = max_abs(axy - target->second_fundamental_form(q, Y, X));
        const double worst = std::max(tangential, asym);
        v.line("second_fundamental_form", worst <= 1e-12, worst, limit_le(1e-12));
    });
    guarded("gauss_formula", [&] {
        const TangentSection ux = velocity(u);
        const Eigen::MatrixXd uxx = spectral::derivative(ux.vectors, grid, 1);
        const Eigen::MatrixXd lhs = uxx + target->second_fundamental_form(q, ux.vectors, ux.vectors);
        const Eigen::MatrixXd rhs = target->tangent_project(q, uxx);
        const double scale = std::max(1.0, max_abs(uxx));
        v.line("gauss_formula", max_abs(lhs - rhs) <= 1e-8 * scale, max_abs(lhs - rhs),
               limit_le(1e-8 * scale));
    });
    guarded("complex_structure", [&] {
        const Eigen::MatrixXd jx = target->complex_structure(q, X);
        const Eigen::MatrixXd jjx = target->complex_structure(q, jx);
        const double isometry =
            (jx.rowwise().norm() - X.rowwise().norm()).cwiseAbs().maxCoeff();
        const double involution = max_abs(jjx + X);
        const double tangency = max_abs(jx - target->tangent_project(q, jx));
        const double antisym =
            (pointwise_dot(jx, Y) + pointwise_dot(X, target->complex_structure(q, Y)))
                .cwiseAbs()
                .maxCoeff();
        const double worst = std::max({isometry, involution, tangency, antisym});
        v.line("complex_structure", worst <= 1e-12, worst, limit_le(1e-12));
    });
    // round-off in the third derivative floors any agreement check at about
    // machine epsilon times the cube of the top wavenumber
    const double ximax = std::numbers::pi * grid.n / grid.length;
    const double deriv3_floor = 1e-15 * ximax * ximax * ximax;
    guarded("rhs_formulations_agree", [&] {
        const TangentSection fi = rhs_intrinsic(u, cfg.coefficients);
        const Eigen::MatrixXd fe = rhs_extrinsic(q, grid, *target, cfg.coefficients);
        const double scale = std::max(1.0, max_abs(fi.vectors));
        const double limit = (1e-9 + deriv3_floor) * scale;
        const double diff = max_abs(fi.vectors - fe);
        v.line("rhs_formulations_agree", diff <= limit, diff, limit_le(limit));
    });
    if (target->kind() == TargetKind::Sphere2) {
        guarded("binormal_model_is_ab_zero", [&] {
            const TangentSection d = darios_rhs(u);
            const TangentSection f = rhs_intrinsic(u, FlowCoefficients{0.0, 0.0, 0.0});
            const double scale = std::max(1.0, max_abs(d.vectors));
            const double diff = max_abs(d.vectors - f.vectors);
            v.line("binormal_model_is_ab_zero", diff <= 1e-12 * scale, diff,
                   limit_le(1e-12 * scale));
        });
        guarded("third_order_model_is_b_half_a", [&] {
            const double a = cfg.coefficients.a != 0.0 ? cfg.coefficients.a : 1.0;
            const TangentSection f = fm_rhs(u, a);
            const TangentSection g = rhs_intrinsic(u, FlowCoefficients{a, a / 2.0, 0.0});
            const double scale = std::max(1.0, max_abs(g.vectors));
            const double limit = (1e-8 + deriv3_floor) * scale;
            const double diff = max_abs(f.vectors - g.vectors);
            v.line("third_order_model_is_b_half_a", diff <= limit, diff, limit_le(limit));
        });
    }
    if (cfg.coefficients.a != 0.0) {
        guarded("ladder_identities", [&] {
            // order 0: all four ladder levels and coefficient polynomials are
            // exercised without stacking the round-off of a deep covariant
            // cascade on top (which grows like a power of the top wavenumber)
            const double r = appendix_commutator_check(u, 0, cfg.coefficients.a);
            v.line("ladder_identities", r <= 1e-6, r, limit_le(1e-6));
        });
    }
    guarded("complex_structure_derivative", [&] {
        const auto secs = iterated_covariant(u, 1);
        const Eigen::MatrixXd njv = nabla_j_apply(u, secs[1]);
        if (target->is_kahler()) {
            const double scale = std::max(1.0, max_abs(secs[1].vectors));
            v.line("complex_structure_parallel", max_abs(njv) <= 1e-9 * scale, max_abs(njv),
                   limit_le(1e-9 * scale));
        } else {
            const double pairing = nabla_j_energy_pairing_check(u, secs[1]);
            v.line("pairing_degenerate", pairing <= 1e-8, pairing, limit_le(1e-8));
            const double c = nabla_j_norm_bound_check(u, secs[1]);
            v.line("norm_bound_constant", c >= 1e-2 && c <= 1.0 + 1e-6, c, "[1e-2, 1+1e-6]");
        }
    });
    guarded("integration_by_parts", [&] {
        const Eigen::ArrayXd th = 2.0 * std::numbers::pi / grid.length * grid.nodes().array();
        const Eigen::VectorXd f = (2.0 * th).sin();
        const Eigen::VectorXd g = th.cos().exp();
        const double r = std::abs(integrate(spectral::derivative(f, grid, 1).cwiseProduct(g), grid) +
                                  integrate(f.cwiseProduct(spectral::derivative(g, grid, 1)), grid));
        v.line("integration_by_parts", r <= 1e-10, r, limit_le(1e-10));
    });

    log << (v.fails == 0 ? "all checks passed\n" : "some checks FAILED\n");
    return v.fails == 0 ? kExitCompleted : kExitCheckFailed;
}

}  // namespace dflow
