#pragma once

// Shared fixtures for the test binaries: deterministic random curve
// generators and small matrix helpers. Everything is seeded explicitly so
// failures reproduce bit-for-bit.

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "dflow/fields.hpp"
#include "dflow/initial_data.hpp"
#include "dflow/target.hpp"

namespace testutil {

inline constexpr unsigned kSeed = 20260816u;

inline double max_abs(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
    return max_abs(a - b) / scale;
}

// Smooth random closed curve: a winding base curve for the target plus
// independent per-component Fourier noise with exponentially decaying
// amplitudes, then the nearest-point projection. The decay keeps the curve
// analytic so spectral quantities converge to round-off at moderate n.
inline dflow::MapState random_curve(const dflow::Grid& grid,
                                    std::shared_ptr<const dflow::TargetManifold> target,
                                    std::mt19937& rng, double delta = 0.15,
                                    double decay = 0.35, int kmax = 24, int base_k = 1) {
    dflow::InitialDataSpec spec;
    if (target->kind() == dflow::TargetKind::Sphere2) {
        spec.family = "great-circle";
        spec.k = base_k;
    } else if (target->kind() == dflow::TargetKind::Sphere6) {
        spec.family = "s6-circle";
        spec.plane_i = 1;
        spec.plane_j = 2;
        spec.k = base_k;
    } else {
        spec.family = "torus-winding";
        spec.k1 = base_k;
        spec.k2 = 1;
    }
    dflow::MapState base = dflow::make_initial_data(grid, target, spec);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Eigen::VectorXd x = grid.nodes();
    const double w0 = 2.0 * M_PI / grid.length;
    Eigen::MatrixXd pts = base.points;
    for (int c = 0; c < pts.cols(); ++c) {
        for (int k = 1; k <= kmax; ++k) {
            const double scale = delta * std::exp(-decay * k);
            const double ak = scale * unit(rng);
            const double bk = scale * unit(rng);
            pts.col(c) += (ak * (k * w0 * x.array()).cos() + bk * (k * w0 * x.array()).sin())
                              .matrix();
        }
    }
    return dflow::MapState(grid, base.time, target->project(pts), target);
}

// Random points on the target (rows of an (n x d) matrix), optionally
// nudged off it by `offset` in a random direction but kept inside the tube.
inline Eigen::MatrixXd random_near_points(const dflow::TargetManifold& target, int rows,
                                          std::mt19937& rng, double offset = 0.0) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const int d = target.ambient_dim();
    Eigen::MatrixXd pts(rows, d);
    for (int r = 0; r < rows; ++r) {
        if (target.kind() == dflow::TargetKind::CliffordTorus2) {
            const double al = angle(rng), be = angle(rng);
            const double rad = target.circle_radius();
            pts.row(r) << rad * std::cos(al), rad * std::sin(al), rad * std::cos(be),
                rad * std::sin(be);
        } else {
            Eigen::VectorXd raw(d);
            do {
                for (int c = 0; c < d; ++c) raw(c) = unit(rng);
            } while (raw.norm() < 0.3);
            pts.row(r) = raw.transpose() / raw.norm();
        }
        if (offset > 0.0) {
            Eigen::VectorXd dir(d);
            for (int c = 0; c < d; ++c) dir(c) = unit(rng);
            pts.row(r) += offset / dir.norm() * dir.transpose();
        }
    }
    return pts;
}

// Constant-speed random curve on the 6-sphere: a winding circle in the
// first coordinate pair plus paired (sin, cos) ripples in two further
// coordinate planes. Pairing makes |u_x|^2 exactly constant in x, so the
// gauge slope carries no spectral tail; useful wherever derivatives of the
// gauge enter and conditioning matters.
inline dflow::MapState pairs_curve(const dflow::Grid& grid,
                                   std::shared_ptr<const dflow::TargetManifold> target,
                                   std::mt19937& rng) {
    std::uniform_int_distribution<int> modes(1, 8);
    std::uniform_real_distribution<double> amps(0.05, 0.25);
    std::uniform_real_distribution<double> phases(0.0, 2.0 * M_PI);

    const Eigen::VectorXd x = grid.nodes();
    const double w0 = 2.0 * M_PI / grid.length;
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(grid.n, target->ambient_dim());
    pts.col(0) = (w0 * x.array()).cos();
    pts.col(1) = (w0 * x.array()).sin();

    double norm_sq = 1.0;
    const int planes[2][2] = {{2, 3}, {4, 5}};
    for (const auto& plane : planes) {
        const int k = modes(rng);
        const double amp = amps(rng);
        const double phase = phases(rng);
        const Eigen::ArrayXd arg = k * w0 * x.array() + phase;
        pts.col(plane[0]) = amp * arg.sin();
        pts.col(plane[1]) = amp * arg.cos();
        norm_sq += amp * amp;
    }
    pts /= std::sqrt(norm_sq);
    return dflow::MapState(grid, 0.0, pts, target);
}

}  // namespace testutil
