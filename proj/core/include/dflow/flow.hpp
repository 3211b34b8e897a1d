#pragma once

#include <Eigen/Dense>

#include "dflow/fields.hpp"

namespace dflow {

/// Coefficients of the flow
///     u_t = a D^2 u_x + J_u D u_x + b g(u_x, u_x) u_x  -  eps D^3 u_x,
/// where D is the covariant derivative along the curve and the eps term is
/// the parabolic regularisation (active only when eps > 0).
struct FlowCoefficients {
    double a = 1.0;
    double b = 0.5;
    double epsilon = 0.0;
};

/// Right-hand side assembled from covariant derivatives of the velocity.
TangentSection rhs_intrinsic(const MapState& u, const FlowCoefficients& c);

/// Ambient flat derivatives of v corrected by the second fundamental form:
/// d1, d2, d3 represent D u_x, D^2 u_x, D^3 u_x for the curve v. The layers
/// are built as d_{k+1} = (d_k)_x + A(v)(d_k, v_x) with the product terms
/// dealiased; d3 is only filled when depth >= 3.
struct CovariantChain {
    Eigen::MatrixXd vx;
    Eigen::MatrixXd d1;
    Eigen::MatrixXd d2;
    Eigen::MatrixXd d3;
    Eigen::MatrixXd vxxxx;  // flat fourth derivative, kept alongside d3
};
CovariantChain extrinsic_chain(const Eigen::MatrixXd& v, const Grid& grid,
                               const TargetManifold& target, int depth);

/// The full ambient right-hand side for an on-manifold state,
///     -eps D^3 u_x + a D^2 u_x + J D u_x + b |v_x|^2 v_x,
/// written through the chain above.
Eigen::MatrixXd rhs_extrinsic(const Eigen::MatrixXd& v, const Grid& grid,
                              const TargetManifold& target, const FlowCoefficients& c);

/// The nonlinearity F(v) of the tube equation: rhs_extrinsic with the
/// leading flat fourth derivative removed, so that
///     rhs_regularized_tube(Q) = -eps Q_xxxx + F(project(Q)).
Eigen::MatrixXd extrinsic_nonlinearity(const Eigen::MatrixXd& v, const Grid& grid,
                                       const TargetManifold& target, const FlowCoefficients& c);

/// Right-hand side for states in the tube around the manifold; projects the
/// argument of the nonlinearity, keeps the linear dissipation on the raw
/// state. Throws TubeExceeded if Q leaves the tube.
Eigen::MatrixXd rhs_regularized_tube(const Eigen::MatrixXd& Q, const Grid& grid,
                                     const TargetManifold& target, const FlowCoefficients& c);

/// Vortex filament form u x u_xx (binormal flow). Sphere2 only.
TangentSection darios_rhs(const MapState& u);

/// u x u_xx + a [ u_xxx + (3/2) (u_x x (u x u_x))_x ]. Sphere2 only; equals
/// the flow with coefficients (a, b = a/2).
TangentSection fm_rhs(const MapState& u, double a);

}  // namespace dflow
