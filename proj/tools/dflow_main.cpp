// Command-line driver: run trajectories, sweep the regularization strength,
// check structural invariants, or print the resolved configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dflow/errors.hpp"
#include "dflow/experiment.hpp"

namespace {

std::atomic<bool> g_abort{false};

void handle_sigint(int) { g_abort.store(true); }

struct Options {
    std::string config_path;
    std::string preset, target, model, projection, initial_family, output_dir, dt_text;
    double a = 0, b = 0, epsilon = 0, length = 0, t_end = 0, cfl = 0, blowup_ceiling = 0;
    double initial_amp = 0, initial_center = 0, initial_width = 0, initial_height = 0;
    int n = 0, diag_order = 0, snapshot_stride = 0;
    int initial_k = 0, initial_mode = 0, initial_k1 = 0, initial_k2 = 0;
    int initial_plane_i = 0, initial_plane_j = 0;
    std::vector<double> epsilon_schedule;
    bool strict = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config_path, "JSON config file");
    sub->add_option("--preset", o.preset, "named setup: conservation-s2, gauge-s6, "
                                          "epsilon-continuation, fukumoto-miyazaki");
    sub->add_option("--target", o.target, "s2, t2-clifford, or s6");
    sub->add_option("--model", o.model, "dispersive, darios, or fukumoto-miyazaki");
    sub->add_option("--a", o.a, "third-derivative coefficient");
    sub->add_option("--b", o.b, "cubic coefficient");
    sub->add_option("--epsilon", o.epsilon, "fourth-order regularization strength");
    sub->add_option("--n", o.n, "grid points (power of two, >= 16)");
    sub->add_option("--L", o.length, "period length");
    sub->add_option("--dt", o.dt_text, "time step, or 'auto' for the cfl rule");
    sub->add_option("--t-end", o.t_end, "final time");
    sub->add_option("--cfl", o.cfl, "cfl factor for the automatic step");
    sub->add_option("--projection", o.projection, "every_step, every_k_steps:K, or none");
    sub->add_option("--diag-order", o.diag_order, "highest tracked derivative order m");
    sub->add_option("--snapshot-stride", o.snapshot_stride, "steps between records");
    sub->add_option("--epsilon-schedule", o.epsilon_schedule,
                    "comma-separated decreasing strengths for sweeps")
        ->delimiter(',');
    sub->add_option("--blowup-ceiling", o.blowup_ceiling, "H1 growth factor that aborts the run");
    sub->add_option("--initial-family", o.initial_family,
                    "constant, great-circle, perturbed-circle, bump, torus-winding, s6-circle");
    sub->add_option("--initial-k", o.initial_k, "winding number");
    sub->add_option("--initial-amp", o.initial_amp, "perturbation amplitude");
    sub->add_option("--initial-mode", o.initial_mode, "perturbation mode");
    sub->add_option("--initial-center", o.initial_center, "bump center");
    sub->add_option("--initial-width", o.initial_width, "bump width");
    sub->add_option("--initial-height", o.initial_height, "bump height");
    sub->add_option("--initial-k1", o.initial_k1, "first torus winding");
    sub->add_option("--initial-k2", o.initial_k2, "second torus winding");
    sub->add_option("--initial-plane-i", o.initial_plane_i, "first circle axis (1..7)");
    sub->add_option("--initial-plane-j", o.initial_plane_j, "second circle axis (1..7)");
    sub->add_option("-o,--output-dir", o.output_dir, "artifact directory");
    sub->add_flag("--strict", o.strict, "serialize sweep members (reproducible ordering)");
}

nlohmann::json overrides_from(const CLI::App* sub, const Options& o) {
    nlohmann::json j = nlohmann::json::object();
    auto set = [&](const char* flag, const char* key, auto value) {
        if (sub->count(flag) > 0) j[key] = value;
    };
    set("--preset", "preset", o.preset);
    set("--target", "target", o.target);
    set("--model", "model", o.model);
    set("--a", "a", o.a);
    set("--b", "b", o.b);
    set("--epsilon", "epsilon", o.epsilon);
    set("--n", "n", o.n);
    set("--L", "L", o.length);
    if (sub->count("--dt") > 0) {
        if (o.dt_text == "auto") {
            j["dt"] = "auto";
        } else {
            try {
                std::size_t used = 0;
                const double v = std::stod(o.dt_text, &used);
                if (used != o.dt_text.size()) throw std::invalid_argument(o.dt_text);
                j["dt"] = v;
            } catch (const std::exception&) {
                throw dflow::ParseError("--dt expects a number or 'auto'");
            }
        }
    }
    set("--t-end", "t_end", o.t_end);
    set("--cfl", "cfl", o.cfl);
    set("--projection", "projection", o.projection);
    set("--diag-order", "diag_order", o.diag_order);
    set("--snapshot-stride", "snapshot_stride", o.snapshot_stride);
    set("--epsilon-schedule", "epsilon_schedule", o.epsilon_schedule);
    set("--blowup-ceiling", "blowup_ceiling", o.blowup_ceiling);
    set("--initial-family", "initial_family", o.initial_family);
    set("--initial-k", "initial_k", o.initial_k);
    set("--initial-amp", "initial_amp", o.initial_amp);
    set("--initial-mode", "initial_mode", o.initial_mode);
    set("--initial-center", "initial_center", o.initial_center);
    set("--initial-width", "initial_width", o.initial_width);
    set("--initial-height", "initial_height", o.initial_height);
    set("--initial-k1", "initial_k1", o.initial_k1);
    set("--initial-k2", "initial_k2", o.initial_k2);
    set("--initial-plane-i", "initial_plane_i", o.initial_plane_i);
    set("--initial-plane-j", "initial_plane_j", o.initial_plane_j);
    set("--output-dir", "output_dir", o.output_dir);
    set("--strict", "strict", o.strict);
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dflow::ParseError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric dispersive-flow simulator and invariant checker"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* cmd_run = app.add_subcommand("run", "integrate one trajectory, write artifacts");
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "run the epsilon continuation over a schedule");
    CLI::App* cmd_check = app.add_subcommand("check", "structural invariant suite, no stepping");
    CLI::App* cmd_describe = app.add_subcommand("describe", "print the resolved configuration");
    for (CLI::App* sub : {cmd_run, cmd_sweep, cmd_check, cmd_describe}) add_common(sub, opt);

    CLI11_PARSE(app, argc, argv);
    std::signal(SIGINT, handle_sigint);

    const CLI::App* sub = app.get_subcommands().front();
    try {
        const std::string config_text = opt.config_path.empty() ? "{}" : slurp(opt.config_path);
        const dflow::ExperimentConfig cfg =
            dflow::parse_config(config_text, overrides_from(sub, opt).dump());

        if (sub == cmd_describe) {
            std::cout << dflow::describe_config(cfg);
            return dflow::kExitCompleted;
        }
        if (sub == cmd_check) return dflow::run_checks(cfg, std::cout);
        if (sub == cmd_sweep) return dflow::run_sweep(cfg, std::cout, &g_abort);
        return dflow::run_single(cfg, std::cout, &g_abort);
    } catch (const dflow::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return dflow::kExitUsage;
    } catch (const dflow::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return dflow::kExitUsage;
    } catch (const dflow::BadParameters& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return dflow::kExitUsage;
    } catch (const dflow::TubeExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dflow::kExitTubeExceeded;
    } catch (const dflow::BlowupDetected& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dflow::kExitBlowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dflow::kExitUsage;
    }
}
