#include "dflow/solver.hpp"

#include <cmath>
#include <limits>

#include "dflow/errors.hpp"
#include "dflow/spectral.hpp"

namespace dflow {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

ProjectionPolicy ProjectionPolicy::parse(const std::string& text) {
    if (text == "every_step") return {ProjectionMode::EveryStep, 1};
    if (text == "none") return {ProjectionMode::None, 1};
    const std::string prefix = "every_k_steps:";
    if (text.rfind(prefix, 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(text.substr(prefix.size()));
        } catch (const std::exception&) {
            throw ParseError("projection: bad step count in '" + text + "'");
        }
        if (k < 1) throw ParseError("projection: step count must be >= 1");
        return {ProjectionMode::EveryKSteps, k};
    }
    throw ParseError("projection: expected every_step, every_k_steps:K, or none, got '" + text +
                     "'");
}

std::string ProjectionPolicy::to_string() const {
    switch (mode) {
        case ProjectionMode::EveryStep: return "every_step";
        case ProjectionMode::None: return "none";
        case ProjectionMode::EveryKSteps: return "every_k_steps:" + std::to_string(every);
    }
    return "every_step";
}

bool ProjectionPolicy::due(int step_index) const {
    switch (mode) {
        case ProjectionMode::EveryStep: return true;
        case ProjectionMode::None: return false;
        case ProjectionMode::EveryKSteps: return step_index % every == 0;
    }
    return true;
}

double SolverConfig::auto_dt() const {
    const double dx = grid.dx();
    // With a = eps = 0 the leading term is the second-order J d^2, so the
    // rule degenerates to a dx^2 scale (the 4 dx floor keeps RK4 inside its
    // imaginary-axis stability interval for |u_x| up to ~1.5).
    double denom = std::abs(coefficients.a) + coefficients.epsilon / dx;
    if (denom == 0.0) denom = 4.0 * dx;
    double dt_cfl = cfl * dx * dx * dx / denom;
    if (t_end > 0.0) dt_cfl = std::min(dt_cfl, t_end);
    return dt_cfl;
}

double SolverConfig::effective_dt() const {
    const int steps = step_count();
    return steps > 0 ? t_end / steps : 0.0;
}

int SolverConfig::step_count() const {
    if (!(t_end > 0.0)) return 0;
    const double base = dt ? *dt : auto_dt();
    const double steps = std::ceil(t_end / base * (1.0 - 1e-12));
    if (!(steps < 1e9)) throw ValidationError("dt is too small for t_end (over 1e9 steps)");
    return static_cast<int>(steps);
}

void SolverConfig::validate(const TargetManifold& target) const {
    if (coefficients.epsilon < 0.0) throw ValidationError("eps must be nonnegative");
    const int min_order = target.is_kahler() ? 2 : 4;
    if (diag_order < min_order)
        throw ValidationError("diag_order must be >= " + std::to_string(min_order) + " for " +
                              target.name());
    if (diag_order > 8) throw ValidationError("diag_order must be <= 8");
    if (dt && *dt == 0.0) throw ValidationError("dt must be nonzero");
    if (dt && *dt < 0.0 && coefficients.epsilon > 0.0)
        throw ValidationError("negative dt is only meaningful for eps = 0");
    if (!(cfl > 0.0)) throw ValidationError("cfl must be positive");
    if (t_end < 0.0) throw ValidationError("t_end must be nonnegative");
    if (snapshot_stride < 1) throw ValidationError("snapshot_stride must be >= 1");
    if (!(blowup_ceiling > 1.0)) throw ValidationError("blowup_ceiling must exceed 1");
    if (projection.mode == ProjectionMode::EveryKSteps && projection.every < 1)
        throw ValidationError("projection stride must be >= 1");
    for (size_t i = 0; i + 1 < epsilon_schedule.size(); ++i)
        if (!(epsilon_schedule[i] > epsilon_schedule[i + 1]))
            throw ValidationError("epsilon_schedule must be strictly decreasing");
    for (double e : epsilon_schedule)
        if (!(e > 0.0)) throw ValidationError("epsilon_schedule entries must be positive");
    (void)step_count();  // rejects dt/t_end pairs that overflow the step budget
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::TubeExceeded: return "tube_exceeded";
        case Termination::BlowupDetected: return "blowup_detected";
        case Termination::UserAbort: return "user_abort";
    }
    return "completed";
}

MatrixXd heat_semigroup(const MatrixXd& phi, const Grid& grid, double epsilon, double t) {
    if (epsilon * t < 0.0) throw std::invalid_argument("heat semigroup requires eps t >= 0");
    if (epsilon * t == 0.0) return phi;
    const VectorXd xi = spectral::wavenumbers(grid);
    const VectorXd decay = (-epsilon * t * xi.array().pow(4)).exp();
    return spectral::apply_multiplier(phi, grid, decay.cast<std::complex<double>>());
}

namespace {

// Explicit remainder N(Q) = F(project(Q)) - a (project(Q))_xxx shared by the
// stepper and the fixed-point reference. The dispersive linear part is
// subtracted at the projected curve, not at Q: the nonlinearity is blind to
// motion along the normal fibers, so the subtraction must be too. Taken at Q
// it leaves a bare a d^3 acting on the normal component, an explicit stiff
// term the exponential factor never sees (observed as a dt ~ dx^3 blowup
// threshold).
MatrixXd stiff_remainder(const MatrixXd& q, const Grid& grid, const TargetManifold& target,
                         const FlowCoefficients& c) {
    const MatrixXd p = target.project(q);
    MatrixXd n = extrinsic_nonlinearity(p, grid, target, c);
    if (c.a != 0.0) n -= c.a * spectral::derivative(p, grid, 3);
    return n;
}

// Integrating-factor RK4 for Q_t = L Q + N(Q), with L diagonal in Fourier
// space (symbol -eps xi^4 - i a xi^3) and N(Q) = F(project(Q)) - a Q_xxx.
class Stepper {
  public:
    Stepper(const Grid& grid, const TargetManifold& target, const FlowCoefficients& c, double dt)
        : grid_(grid), target_(target), coeffs_(c), dt_(dt) {
        const VectorXd xi = spectral::wavenumbers(grid);
        const int modes = grid.n / 2 + 1;
        half_.resize(modes);
        full_.resize(modes);
        for (int k = 0; k < modes; ++k) {
            const double x = xi(k);
            const std::complex<double> lambda(-c.epsilon * x * x * x * x,
                                              -c.a * x * x * x);
            half_(k) = std::exp(0.5 * dt * lambda);
            full_(k) = std::exp(dt * lambda);
        }
        // The Nyquist phase is not representable in the real transform;
        // keep only the decay factor there.
        half_(modes - 1) = std::abs(half_(modes - 1));
        full_(modes - 1) = std::abs(full_(modes - 1));
    }

    MatrixXd remainder(const MatrixXd& q) const {
        return stiff_remainder(q, grid_, target_, coeffs_);
    }

    MatrixXd advance(const MatrixXd& v) const {
        const double dt = dt_;
        const MatrixXd k1 = remainder(v);
        const MatrixXd k2 = remainder(apply(half_, v + (0.5 * dt) * k1));
        const MatrixXd ev = apply(half_, v);
        const MatrixXd k3 = remainder(ev + (0.5 * dt) * k2);
        const MatrixXd e2v = apply(full_, v);
        const MatrixXd k4 = remainder(e2v + dt * apply(half_, k3));
        return e2v + (dt / 6.0) * (apply(full_, k1) + 2.0 * apply(half_, k2 + k3) + k4);
    }

  private:
    MatrixXd apply(const VectorXcd& mult, const MatrixXd& values) const {
        return spectral::apply_multiplier(values, grid_, mult);
    }

    Grid grid_;
    const TargetManifold& target_;
    FlowCoefficients coeffs_;
    double dt_;
    VectorXcd half_;  // e^{lambda dt/2} per mode
    VectorXcd full_;  // e^{lambda dt}
};

double h1_norm(const MapState& u) { return std::sqrt(sobolev_norm_sq(u, 1)); }

}  // namespace

MapState step(const MapState& state, const SolverConfig& cfg) {
    cfg.validate(*state.target);
    if (!(state.grid == cfg.grid)) throw std::invalid_argument("state grid differs from config");
    const double dt = cfg.dt ? *cfg.dt : cfg.auto_dt();
    if (dt == 0.0) throw std::invalid_argument("step needs a nonzero dt");

    const Stepper stepper(cfg.grid, *state.target, cfg.coefficients, dt);
    MatrixXd next = stepper.advance(state.points);
    if (!next.allFinite()) throw BlowupDetected(state.time + dt, std::nan(""));
    if (cfg.projection.due(1)) next = state.target->project(next);

    MapState out(cfg.grid, state.time + dt, std::move(next), state.target);
    const double ceiling = cfg.blowup_ceiling * std::max(h1_norm(state), 1e-300);
    const double h1 = h1_norm(out);
    if (h1 > ceiling) throw BlowupDetected(out.time, h1);
    return out;
}

Trajectory run(const MapState& initial, const SolverConfig& cfg,
               const std::atomic<bool>* abort_requested) {
    cfg.validate(*initial.target);
    if (!(initial.grid == cfg.grid))
        throw std::invalid_argument("initial state grid differs from config");
    if (cfg.dt && *cfg.dt < 0.0)
        throw ValidationError("run advances forward in time; use step() for reversal");

    Trajectory traj;
    const int steps = cfg.step_count();
    const double dt = cfg.effective_dt();
    traj.dt_used = dt;

    const DiagnosticsOptions diag_opts{cfg.diag_order, cfg.coefficients};
    traj.snapshots.push_back(initial);
    traj.records.push_back(compute_diagnostics(initial, diag_opts));
    traj.records.back().step = 0;

    const bool track_n4 = cfg.diag_order >= 4;
    const double n4_initial = track_n4 ? std::sqrt(traj.records.front().gauge_energy_sq) : 0.0;
    double n4_prev = n4_initial;
    double t_prev_record = initial.time;

    const double h1_initial = h1_norm(initial);
    const double ceiling = cfg.blowup_ceiling * std::max(h1_initial, 1e-300);

    const Stepper stepper(cfg.grid, *initial.target, cfg.coefficients, dt);
    MatrixXd v = initial.points;
    MatrixXd v_prev = v;
    double t = initial.time;
    traj.t_final = t;

    for (int s = 1; s <= steps; ++s) {
        if (abort_requested && abort_requested->load()) {
            traj.termination = Termination::UserAbort;
            return traj;
        }
        try {
            v_prev = v;
            v = stepper.advance(v);
            const double t_next = initial.time + s * dt;
            if (!v.allFinite()) throw BlowupDetected(t_next, std::nan(""));
            if (cfg.projection.due(s)) v = initial.target->project(v);
            t = t_next;

            MapState state(cfg.grid, t, v, initial.target);
            const double h1 = h1_norm(state);
            if (h1 > ceiling) throw BlowupDetected(t, h1);

            traj.steps_taken = s;
            traj.t_final = t;
            if (s % cfg.snapshot_stride == 0 || s == steps) {
                MapState prev_state(cfg.grid, t - dt, v_prev, initial.target);
                traj.snapshots.push_back(state);
                traj.records.push_back(compute_diagnostics(state, diag_opts, &prev_state, dt));
                traj.records.back().step = s;

                if (track_n4 && !traj.doubling_time_n4) {
                    const double n4 = std::sqrt(traj.records.back().gauge_energy_sq);
                    if (n4 > 2.0 * n4_initial && n4_prev <= 2.0 * n4_initial) {
                        const double span = n4 - n4_prev;
                        const double frac =
                            span > 0.0 ? (2.0 * n4_initial - n4_prev) / span : 1.0;
                        traj.doubling_time_n4 = t_prev_record + frac * (t - t_prev_record);
                    }
                    n4_prev = n4;
                    t_prev_record = t;
                }
            }
        } catch (const TubeExceeded&) {
            traj.termination = Termination::TubeExceeded;
            traj.t_final = t;
            return traj;
        } catch (const BlowupDetected& e) {
            traj.termination = Termination::BlowupDetected;
            traj.t_final = e.time;
            return traj;
        }
    }
    traj.termination = Termination::Completed;
    return traj;
}

MapState duhamel_reference(const MapState& initial, const SolverConfig& cfg, int picard_iters,
                           DuhamelReport* report) {
    cfg.validate(*initial.target);
    if (!(initial.grid == cfg.grid))
        throw std::invalid_argument("initial state grid differs from config");
    if (picard_iters < 0) throw std::invalid_argument("picard_iters must be >= 0");

    const Grid& grid = cfg.grid;
    const double T = cfg.t_end;
    constexpr int kStages = 256;
    const double ds = T / kStages;

    // Same splitting as the stepper: the semigroup carries the full
    // constant-coefficient symbol, the integrand is the projected remainder.
    // Leaving a xi^3 explicit would make the sweep map expanding around
    // xi ~ (eps t)^{-1/4}, where the parabolic factor no longer wins.
    const VectorXd xi = spectral::wavenumbers(grid);
    const int modes = static_cast<int>(xi.size());
    std::vector<VectorXcd> mult(kStages + 1);
    for (int k = 0; k <= kStages; ++k) {
        mult[k].resize(modes);
        for (int m = 0; m < modes; ++m) {
            const double x = xi(m);
            const std::complex<double> lambda(-cfg.coefficients.epsilon * x * x * x * x,
                                              -cfg.coefficients.a * x * x * x);
            mult[k](m) = std::exp(double(k) * ds * lambda);
        }
        mult[k](modes - 1) = std::abs(mult[k](modes - 1));  // real transform: no Nyquist phase
    }

    const spectral::Spectrum v0_hat = spectral::analyze(initial.points);
    std::vector<MatrixXd> v(kStages + 1);
    for (int i = 0; i <= kStages; ++i) {
        spectral::Spectrum s = v0_hat;
        s.array().colwise() *= mult[i].array();
        v[i] = spectral::synthesize(s, grid.n);
    }

    double prev_dist = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= picard_iters; ++iter) {
        std::vector<spectral::Spectrum> f_hat(kStages + 1);
        for (int i = 0; i <= kStages; ++i)
            f_hat[i] = spectral::analyze(
                stiff_remainder(v[i], grid, *initial.target, cfg.coefficients));

        double dist = 0.0;
        std::vector<MatrixXd> v_next(kStages + 1);
        v_next[0] = initial.points;
        for (int i = 1; i <= kStages; ++i) {
            spectral::Spectrum acc = v0_hat;
            acc.array().colwise() *= mult[i].array();
            for (int j = 0; j <= i; ++j) {
                const double w = (j == 0 || j == i) ? 0.5 : 1.0;
                spectral::Spectrum term = f_hat[j];
                term.array().colwise() *= mult[i - j].array();
                acc += (w * ds) * term;
            }
            v_next[i] = spectral::synthesize(acc, grid.n);
            dist = std::max(dist, (v_next[i] - v[i]).array().abs().maxCoeff());
        }
        v = std::move(v_next);
        if (report) report->sweep_distances.push_back(dist);
        const double floor = 1e-13 * initial.points.array().abs().maxCoeff();
        if (iter >= 2 && dist >= prev_dist && dist > floor)
            throw NoContraction("fixed-point sweep " + std::to_string(iter) +
                                " did not contract: " + std::to_string(dist) + " >= " +
                                std::to_string(prev_dist));
        prev_dist = dist;
    }
    return MapState(grid, initial.time + T, v[kStages], initial.target);
}

}  // namespace dflow
