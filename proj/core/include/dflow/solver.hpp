#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "dflow/diagnostics.hpp"
#include "dflow/fields.hpp"
#include "dflow/flow.hpp"

namespace dflow {

enum class ProjectionMode { EveryStep, EveryKSteps, None };

struct ProjectionPolicy {
    ProjectionMode mode = ProjectionMode::EveryStep;
    int every = 1;

    /// Parses "every_step", "every_k_steps:K", or "none".
    static ProjectionPolicy parse(const std::string& text);
    std::string to_string() const;
    bool due(int step_index) const;
};

struct SolverConfig {
    explicit SolverConfig(Grid grid) : grid(grid) {}

    Grid grid;
    FlowCoefficients coefficients{};
    std::optional<double> dt;  // empty: use the cfl rule below
    double t_end = 1.0;
    double cfl = 0.5;
    ProjectionPolicy projection{};
    int diag_order = 4;
    int snapshot_stride = 100;
    std::vector<double> epsilon_schedule;  // used by sweeps, not by run()
    double blowup_ceiling = 1e3;           // factor on the initial H1 norm

    /// dt from the stability rule cfl * dx^3 / (|a| + eps/dx).
    double auto_dt() const;
    /// Requested (or auto) dt shrunk so an integer number of steps lands
    /// exactly on t_end.
    double effective_dt() const;
    int step_count() const;

    void validate(const TargetManifold& target) const;
};

enum class Termination { Completed, TubeExceeded, BlowupDetected, UserAbort };
const char* termination_name(Termination t);

struct Trajectory {
    std::vector<MapState> snapshots;
    std::vector<DiagnosticsRecord> records;
    Termination termination = Termination::Completed;
    double t_final = 0.0;
    double dt_used = 0.0;
    int steps_taken = 0;
    std::optional<double> doubling_time_n4;  // first time N_4 doubles
};

/// e^{-eps t d^4/dx^4} phi as a Fourier multiplier; contractive on every
/// Sobolev norm for eps t >= 0.
Eigen::MatrixXd heat_semigroup(const Eigen::MatrixXd& phi, const Grid& grid, double epsilon,
                               double t);

/// One integrating-factor RK4 step of the tube equation
///     Q_t = -eps Q_xxxx + F(project(Q)),
/// with the full linear symbol -eps xi^4 - i a xi^3 integrated exactly and
/// the remainder advanced by classical RK4 in the interaction picture.
/// Projects afterwards when the policy says so. dt < 0 is allowed for
/// eps = 0 (time reversal). Throws TubeExceeded / BlowupDetected.
MapState step(const MapState& state, const SolverConfig& cfg);

/// Advances to t_end, recording snapshots and diagnostics every
/// snapshot_stride steps (and at the final step). Solver aborts are caught
/// and reported in Trajectory::termination.
Trajectory run(const MapState& initial, const SolverConfig& cfg,
               const std::atomic<bool>* abort_requested = nullptr);

struct DuhamelReport {
    std::vector<double> sweep_distances;  // successive-iterate max distances
};

/// Fixed-point reference for short horizons: iterates
///     v(t) = S(t) v0 + int_0^t S(t - s) N(v(s)) ds
/// on a fine uniform mesh (trapezoid quadrature), where S carries the full
/// constant-coefficient symbol -eps xi^4 - i a xi^3 and N is the same
/// projected remainder the stepper integrates. Starts from the semigroup
/// orbit S(t) v0; picard_iters = 0 returns that orbit itself. Sweep
/// distances must decrease; otherwise NoContraction is thrown.
MapState duhamel_reference(const MapState& initial, const SolverConfig& cfg, int picard_iters,
                           DuhamelReport* report = nullptr);

}  // namespace dflow
