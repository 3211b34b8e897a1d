#include "dflow/initial_data.hpp"

#include <cmath>
#include <numbers>

#include "dflow/errors.hpp"

namespace dflow {

namespace {

Eigen::RowVectorXd base_point(const TargetManifold& target) {
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(target.ambient_dim());
    switch (target.kind()) {
        case TargetKind::Sphere2:
            p(2) = 1.0;
            break;
        case TargetKind::CliffordTorus2:
            p(0) = target.circle_radius();
            p(2) = target.circle_radius();
            break;
        case TargetKind::Sphere6:
            p(6) = 1.0;
            break;
    }
    return p;
}

bool is_sphere(const TargetManifold& target) {
    return target.kind() == TargetKind::Sphere2 || target.kind() == TargetKind::Sphere6;
}

Eigen::MatrixXd circle_columns(const Grid& grid, int d, int col_cos, int col_sin, int k) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(grid.n, d);
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / grid.length;
    const Eigen::VectorXd x = grid.nodes();
    q.col(col_cos) = (w * x.array()).cos();
    q.col(col_sin) = (w * x.array()).sin();
    return q;
}

}  // namespace

MapState make_initial_data(const Grid& grid, std::shared_ptr<const TargetManifold> target,
                           const InitialDataSpec& spec) {
    if (!target) throw BadParameters("make_initial_data: null target");
    const int d = target->ambient_dim();
    const Eigen::VectorXd x = grid.nodes();
    Eigen::MatrixXd q;

    if (spec.family == "constant") {
        q = base_point(*target).replicate(grid.n, 1);
    } else if (spec.family == "great-circle") {
        if (!is_sphere(*target))
            throw BadParameters("great-circle needs a sphere target; use torus-winding on t2");
        q = circle_columns(grid, d, 0, 1, spec.k);
    } else if (spec.family == "perturbed-circle") {
        if (!is_sphere(*target))
            throw BadParameters("perturbed-circle needs a sphere target; use torus-winding on t2");
        if (spec.amp < 0.0 || spec.amp >= target->tube_radius())
            throw BadParameters("perturbed-circle: amp must lie in [0, tube radius)");
        if (spec.mode < 1) throw BadParameters("perturbed-circle: mode must be >= 1");
        q = circle_columns(grid, d, 0, 1, spec.k);
        const double wm = 2.0 * std::numbers::pi * static_cast<double>(spec.mode) / grid.length;
        if (d == 3) {
            q.col(2) = spec.amp * (wm * x.array()).sin();
        } else {
            // constant-norm transverse ripple, so the lift stays at uniform
            // distance sqrt(1+amp^2) from the origin
            q.col(2) = spec.amp * (wm * x.array()).sin();
            q.col(4) = spec.amp * (wm * x.array()).cos();
        }
        q = target->project(q);
    } else if (spec.family == "bump") {
        if (spec.width <= 0.0) throw BadParameters("bump: width must be positive");
        if (std::abs(spec.height) >= target->tube_radius())
            throw BadParameters("bump: |height| must be below the tube radius");
        q = base_point(*target).replicate(grid.n, 1);
        const double w0 = 2.0 * std::numbers::pi / grid.length;
        Eigen::ArrayXd phi =
            (((w0 * (x.array() - spec.center)).cos() - 1.0) / (spec.width * spec.width)).exp();
        const int dir = (target->kind() == TargetKind::CliffordTorus2) ? 1 : 0;
        q.col(dir).array() += spec.height * phi;
        q = target->project(q);
    } else if (spec.family == "torus-winding") {
        if (target->kind() != TargetKind::CliffordTorus2)
            throw BadParameters("torus-winding needs target t2");
        const double w1 = 2.0 * std::numbers::pi * static_cast<double>(spec.k1) / grid.length;
        const double w2 = 2.0 * std::numbers::pi * static_cast<double>(spec.k2) / grid.length;
        q.resize(grid.n, d);
        q.col(0) = target->circle_radius() * (w1 * x.array()).cos();
        q.col(1) = target->circle_radius() * (w1 * x.array()).sin();
        q.col(2) = target->circle_radius() * (w2 * x.array()).cos();
        q.col(3) = target->circle_radius() * (w2 * x.array()).sin();
    } else if (spec.family == "s6-circle") {
        if (target->kind() != TargetKind::Sphere6)
            throw BadParameters("s6-circle needs target s6");
        if (spec.plane_i < 1 || spec.plane_i > 7 || spec.plane_j < 1 || spec.plane_j > 7 ||
            spec.plane_i == spec.plane_j)
            throw BadParameters("s6-circle: plane axes must be distinct and in 1..7");
        q = circle_columns(grid, d, spec.plane_i - 1, spec.plane_j - 1, spec.k);
    } else {
        throw BadParameters("unknown initial-data family '" + spec.family + "'");
    }

    return MapState(grid, 0.0, std::move(q), std::move(target));
}

}  // namespace dflow
