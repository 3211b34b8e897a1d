#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dflow/fields.hpp"
#include "dflow/flow.hpp"

namespace dflow {

/// Antiderivative K of -g(u_x, u_x)/(3a), anchored so K(0) = 0 (left
/// endpoint of the period cell; K is not periodic). One value per node.
Eigen::VectorXd gauge_factor(const MapState& u, double a);

/// The gauged section e^K D^m u_x.
TangentSection gauged_section(const MapState& u, int m, double a);

/// N_m = ( ||u_x||_{H^{m-1}}^2 + ||e^K D^m u_x||_{L2}^2 )^{1/2}.
double gauge_energy(const MapState& u, int m, double a);

/// max over the grid of max(e^K, e^-K); bounded along solutions by
/// 1 + exp(||u_x(0)||_{L2}^2 / (3|a|)).
double gauge_bound(const MapState& u, double a);

/// The functional conserved by the flow with b = a K_curv / 2 on a
/// constant-curvature surface target:
///   ||D^2 u_x||^2 + (K^2/8) I(g(ux,ux)^3) - K I(g(ux,Dux)^2)
///   - (3K/2) I(g(ux,ux) g(Dux,Dux)),   I = integral over the period.
double conserved_energy(const MapState& u, double gauss_curvature);
/// Same, taking the curvature from the target; WrongTarget if it has none.
double conserved_energy(const MapState& u);

/// Relative mismatch of the per-step balance
///   d/dt ||u_x||_{L2}^2 = -2 eps ||D^2 u_x||_{L2}^2
/// across one accepted step, with a floor of 1e-12 ||u_x||_{H2}^2 in the
/// denominator so geodesic (zero-dissipation) states do not divide by zero.
double dissipation_residual(const MapState& before, const MapState& after,
                            const FlowCoefficients& c, double dt);

/// Max relative grid-space residual over the four ladder identities that
/// expand e^K D^{m+k} u_x (k = 1..4) in derivatives of V = e^K D^m u_x with
/// polynomial coefficients in K_x and its derivatives. Zero fields give 0.
double appendix_commutator_check(const MapState& u, int m, double a);

/// The field (D J) V = D(J V) - J (D V) along the curve.
Eigen::MatrixXd nabla_j_apply(const MapState& u, const TangentSection& V);

/// |integral g((D J)V, V)| normalised by ||(D J)V|| ||V|| (Cauchy-Schwarz
/// scale); ~0 certifies the pairing drops out of energy estimates.
double nabla_j_energy_pairing_check(const MapState& u, const TangentSection& V);

struct DiagnosticsRecord {
    double t = 0.0;
    double l2 = 0.0;                  // ||u_x||_{L2}^2
    std::vector<double> sobolev_sq;   // ||u_x||_{H^j}^2, j = 1..m
    double gauge_energy_sq = 0.0;     // N_m^2
    std::optional<double> energy;     // conserved functional (surfaces)
    double constraint = 0.0;          // max distance to the target
    std::optional<double> dissipation_residual;
    double gauge_bound = 1.0;
    int step = 0;
};

struct DiagnosticsOptions {
    int m = 4;
    FlowCoefficients coefficients{};
};

/// Assembles a record; `previous` (the state one step earlier) enables the
/// dissipation-residual column when eps > 0.
DiagnosticsRecord compute_diagnostics(const MapState& u, const DiagnosticsOptions& options,
                                      const MapState* previous = nullptr, double dt = 0.0);

/// CSV with columns t,l2,h1,...,hm,N_m,E,constraint,dissipation_residual,
/// gauge_bound; missing optionals are written as nan.
std::string csv_header(int m);
std::string csv_row(const DiagnosticsRecord& record);

}  // namespace dflow
