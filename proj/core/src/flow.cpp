#include "dflow/flow.hpp"

#include <vector>

#include "dflow/errors.hpp"
#include "dflow/spectral.hpp"
#include "rowops.hpp"

namespace dflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using detail::row_dots;
using detail::scale_rows;

namespace {

// All flat derivatives of f up to the given order from a single forward
// transform; entry [j] is the j-th derivative ([0] is f itself, optionally
// dealiased first).
std::vector<MatrixXd> derivatives_upto(const MatrixXd& f, const Grid& grid, int order,
                                       bool filter_base = false) {
    spectral::Spectrum coeffs = spectral::analyze(f);
    if (filter_base)
        for (int k = grid.n / 3 + 1; k <= grid.n / 2; ++k) coeffs.row(k).setZero();

    const VectorXd xi = spectral::wavenumbers(grid);
    std::vector<MatrixXd> out;
    out.reserve(order + 1);
    out.push_back(spectral::synthesize(coeffs, grid.n));
    spectral::Spectrum work = coeffs;
    for (int j = 1; j <= order; ++j) {
        for (int k = 0; k <= grid.n / 2; ++k) {
            const std::complex<double> ixi(0.0, xi(k));
            work.row(k) *= ixi;
        }
        work.row(grid.n / 2).setZero();  // odd-order content not representable
        if (j % 2 == 0) {
            // restore the even-order Nyquist contribution from the original
            const double p = std::pow(xi(grid.n / 2), j);
            work.row(grid.n / 2) = coeffs.row(grid.n / 2) * ((j % 4 == 0) ? p : -p);
        }
        out.push_back(spectral::synthesize(work, grid.n));
    }
    return out;
}

MatrixXd filtered(const MatrixXd& f, const Grid& grid) { return spectral::dealias(f, grid); }

}  // namespace

CovariantChain extrinsic_chain(const MatrixXd& v, const Grid& grid, const TargetManifold& target,
                               int depth) {
    const int max_flat = depth + 1;
    const auto dv = derivatives_upto(v, grid, max_flat);

    CovariantChain chain;
    chain.vx = dv[1];

    const MatrixXd p1 = filtered(target.second_fundamental_form(v, chain.vx, chain.vx), grid);
    chain.d1 = dv[2] + p1;
    if (depth < 2) return chain;

    const auto dp1 = derivatives_upto(p1, grid, depth - 1);
    const MatrixXd p2 = filtered(target.second_fundamental_form(v, chain.d1, chain.vx), grid);
    chain.d2 = dv[3] + dp1[1] + p2;
    if (depth < 3) return chain;

    const MatrixXd p3 = filtered(target.second_fundamental_form(v, chain.d2, chain.vx), grid);
    const MatrixXd p2x = spectral::derivative(p2, grid, 1);
    chain.vxxxx = dv[4];
    chain.d3 = dv[4] + dp1[2] + p2x + p3;
    return chain;
}

namespace {

// a D^2 u_x + J D u_x + b |v_x|^2 v_x from a prepared chain.
MatrixXd dispersive_part(const MatrixXd& v, const Grid& grid, const TargetManifold& target,
                         const FlowCoefficients& c, const CovariantChain& chain) {
    MatrixXd f = c.a * chain.d2;
    f += filtered(target.complex_structure(v, chain.d1), grid);
    f += c.b * filtered(scale_rows(chain.vx, row_dots(chain.vx, chain.vx)), grid);
    return f;
}

}  // namespace

Eigen::MatrixXd extrinsic_nonlinearity(const MatrixXd& v, const Grid& grid,
                                       const TargetManifold& target, const FlowCoefficients& c) {
    const bool dissipative = c.epsilon > 0.0;
    const CovariantChain chain = extrinsic_chain(v, grid, target, dissipative ? 3 : 2);
    MatrixXd f = dispersive_part(v, grid, target, c, chain);
    // D^3 u_x minus the flat fourth derivative: only the lower-order
    // correction terms enter the nonlinearity.
    if (dissipative) f -= c.epsilon * (chain.d3 - chain.vxxxx);
    return f;
}

Eigen::MatrixXd rhs_extrinsic(const MatrixXd& v, const Grid& grid, const TargetManifold& target,
                              const FlowCoefficients& c) {
    const bool dissipative = c.epsilon > 0.0;
    const CovariantChain chain = extrinsic_chain(v, grid, target, dissipative ? 3 : 2);
    MatrixXd f = dispersive_part(v, grid, target, c, chain);
    if (dissipative) f -= c.epsilon * chain.d3;
    return f;
}

Eigen::MatrixXd rhs_regularized_tube(const MatrixXd& Q, const Grid& grid,
                                     const TargetManifold& target, const FlowCoefficients& c) {
    MatrixXd f = extrinsic_nonlinearity(target.project(Q), grid, target, c);
    if (c.epsilon > 0.0) f -= c.epsilon * spectral::derivative(Q, grid, 4);
    return f;
}

TangentSection rhs_intrinsic(const MapState& u, const FlowCoefficients& c) {
    const bool dissipative = c.epsilon > 0.0;
    const auto secs = iterated_covariant(u, dissipative ? 3 : 2);
    const MatrixXd& ux = secs[0].vectors;

    MatrixXd f = c.a * secs[2].vectors;
    f += filtered(u.target->complex_structure(u.points, secs[1].vectors), u.grid);
    f += c.b * filtered(scale_rows(ux, row_dots(ux, ux)), u.grid);
    if (dissipative) f -= c.epsilon * secs[3].vectors;
    return {u, std::move(f)};
}

TangentSection darios_rhs(const MapState& u) {
    if (u.target->kind() != TargetKind::Sphere2)
        throw WrongTarget("binormal flow is defined for the s2 target only");
    const MatrixXd vxx = spectral::derivative(u.points, u.grid, 2);
    return {u, filtered(cross3(u.points, vxx), u.grid)};
}

TangentSection fm_rhs(const MapState& u, double a) {
    if (u.target->kind() != TargetKind::Sphere2)
        throw WrongTarget("filament hierarchy flow is defined for the s2 target only");
    const auto dv = derivatives_upto(u.points, u.grid, 3);
    MatrixXd f = filtered(cross3(u.points, dv[2]), u.grid);
    const MatrixXd triple = filtered(cross3(dv[1], cross3(u.points, dv[1])), u.grid);
    f += a * (dv[3] + 1.5 * spectral::derivative(triple, u.grid, 1));
    return {u, std::move(f)};
}

}  // namespace dflow
