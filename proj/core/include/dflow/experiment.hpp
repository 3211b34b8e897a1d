#pragma once

#include <atomic>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dflow/initial_data.hpp"
#include "dflow/solver.hpp"

namespace dflow {

/// Fully resolved description of one experiment: target, model, flow
/// coefficients, discretization, initial curve, and output location.
/// Built from a flat JSON config (see parse_config); presets fill in
/// defaults and models pin coefficients before explicit keys are checked
/// for contradictions.
struct ExperimentConfig {
    std::string target_name = "s2";
    std::string model = "dispersive";  // dispersive | darios | fukumoto-miyazaki
    std::string preset;                // optional named setup, see kPresets

    FlowCoefficients coefficients{};
    int n = 256;
    double length = 6.283185307179586;
    std::optional<double> dt;  // empty: cfl rule
    double t_end = 1.0;
    double cfl = 0.5;
    std::string projection = "every_step";
    int diag_order = 4;
    int snapshot_stride = 100;
    std::vector<double> epsilon_schedule;
    double blowup_ceiling = 1e3;

    InitialDataSpec initial{};
    std::string output_dir = "out";
    bool strict = false;  // serialize sweeps (bitwise-reproducible ordering)

    Grid grid() const { return Grid(n, length); }
    SolverConfig solver_config() const;
};

/// Named presets accepted in the "preset" key / --preset flag.
extern const char* const kPresets[4];

/// Parses a flat JSON object into a config. `overrides_text` is a second
/// flat object (e.g. from command-line flags) whose keys win over the
/// first. Unknown keys, type mismatches, and contradictions with the
/// chosen model or preset all throw ParseError / ValidationError naming
/// the offending key.
ExperimentConfig parse_config(const std::string& config_text,
                              const std::string& overrides_text = "{}");

/// The resolved config as pretty-printed JSON (the same keys parse_config
/// accepts).
std::string describe_config(const ExperimentConfig& cfg);

/// Process exit codes used by the driver.
enum ExitCode : int {
    kExitCompleted = 0,
    kExitUsage = 1,
    kExitTubeExceeded = 2,
    kExitBlowup = 3,
    kExitAborted = 4,
    kExitCheckFailed = 5,
};
int exit_code_for(Termination t);

/// Runs a single trajectory: writes snapshot_NNNNNN.json files, a
/// diagnostics.csv, and summary.json under cfg.output_dir, and prints one
/// [PASS]/[FAIL] verdict line per tracked invariant to `log`. Returns the
/// process exit code.
int run_single(const ExperimentConfig& cfg, std::ostream& log,
               const std::atomic<bool>* abort_requested = nullptr);

/// Runs the epsilon continuation: one trajectory per schedule entry (in
/// parallel unless cfg.strict), artifacts in eps_0/, eps_1/, ... plus a
/// top-level sweep_summary.json with the successive final-state gaps.
int run_sweep(const ExperimentConfig& cfg, std::ostream& log,
              const std::atomic<bool>* abort_requested = nullptr);

/// Structural invariant suite on the configured target and grid (no time
/// stepping): projections, second fundamental form, complex structure,
/// right-hand-side equivalences, ladder identities. Prints one line per
/// check; returns kExitCompleted or kExitCheckFailed.
int run_checks(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace dflow
