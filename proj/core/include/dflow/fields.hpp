#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "dflow/grid.hpp"
#include "dflow/target.hpp"

namespace dflow {

/// A closed curve sampled on a periodic grid, with values on (or near) a
/// target manifold: one ambient point per row. States are immutable value
/// snapshots; operators return new states.
struct MapState {
    MapState(Grid grid, double time, Eigen::MatrixXd points,
             std::shared_ptr<const TargetManifold> target);

    Grid grid;
    double time;
    Eigen::MatrixXd points;  // n x ambient_dim
    std::shared_ptr<const TargetManifold> target;

    /// Max distance of any sample from the target manifold.
    double constraint_violation() const;
};

/// A field of ambient vectors attached to the samples of a base state,
/// normally tangent to the target along it.
struct TangentSection {
    MapState base;
    Eigen::MatrixXd vectors;  // n x ambient_dim

    /// Max-norm of the normal component, zero for an exactly tangent field.
    double tangency_residual() const;
};

/// Rectangle rule on the periodic grid (spectrally accurate for smooth
/// periodic integrands).
double integrate(const Eigen::VectorXd& samples, const Grid& grid);

/// Pointwise inner products g(V, W) as a scalar field.
Eigen::VectorXd pointwise_dot(const Eigen::MatrixXd& V, const Eigen::MatrixXd& W);

/// L2 pairing and squared norm of vector fields over the grid.
double l2_inner(const Eigen::MatrixXd& V, const Eigen::MatrixXd& W, const Grid& grid);
double l2_norm_sq(const Eigen::MatrixXd& V, const Grid& grid);

/// Derivative u_x of the curve as a section over it.
TangentSection velocity(const MapState& u);

/// Covariant derivative along the curve: tangential projection of the flat
/// x-derivative of the section.
TangentSection covariant_derivative(const TangentSection& V);

/// [u_x, D u_x, D^2 u_x, ..., D^m u_x], where D is the covariant derivative
/// along the curve; m + 1 sections in total.
std::vector<TangentSection> iterated_covariant(const MapState& u, int m);

/// Maximum derivative count accepted by iterated_covariant.
inline constexpr int kMaxCovariantOrder = 12;

/// Squared Sobolev norm of the velocity field,
///     sum_{j=0..m} ||D^j u_x||_{L2}^2.
double sobolev_norm_sq(const MapState& u, int m);

/// JSON snapshot of a state: {"time", "L", "n", "target", "points"}.
std::string to_json(const MapState& state);
MapState map_state_from_json(const std::string& text);

}  // namespace dflow
