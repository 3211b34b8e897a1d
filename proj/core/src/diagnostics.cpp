#include "dflow/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "dflow/errors.hpp"
#include "dflow/spectral.hpp"
#include "rowops.hpp"

namespace dflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using detail::row_dots;
using detail::scale_rows;

namespace {

VectorXd gauge_slope(const MapState& u, double a) {
    // No third-order term, nothing to absorb: the gauge is the identity.
    if (a == 0.0) return VectorXd::Zero(u.grid.n);
    const TangentSection ux = velocity(u);
    return row_dots(ux.vectors, ux.vectors) / (-3.0 * a);
}

// Exclusive prefix sum (left endpoint rule) of the slope: K(0) = 0.
VectorXd accumulate_gauge(const VectorXd& slope, double dx) {
    VectorXd k(slope.size());
    double acc = 0.0;
    for (Eigen::Index j = 0; j < slope.size(); ++j) {
        k(j) = acc;
        acc += slope(j) * dx;
    }
    return k;
}

double max_abs(const MatrixXd& m) { return m.size() ? m.array().abs().maxCoeff() : 0.0; }

}  // namespace

VectorXd gauge_factor(const MapState& u, double a) {
    return accumulate_gauge(gauge_slope(u, a), u.grid.dx());
}

TangentSection gauged_section(const MapState& u, int m, double a) {
    if (m < 0) throw std::invalid_argument("gauged_section requires m >= 0");
    const VectorXd ek = gauge_factor(u, a).array().exp();
    const auto sections = iterated_covariant(u, m);
    return {u, scale_rows(sections[m].vectors, ek)};
}

double gauge_energy(const MapState& u, int m, double a) {
    if (m < 1) throw std::invalid_argument("gauge_energy requires m >= 1");
    const double lower = sobolev_norm_sq(u, m - 1);
    const TangentSection v = gauged_section(u, m, a);
    return std::sqrt(lower + l2_norm_sq(v.vectors, u.grid));
}

double gauge_bound(const MapState& u, double a) {
    const VectorXd k = gauge_factor(u, a);
    return std::exp(k.array().abs().maxCoeff());
}

double conserved_energy(const MapState& u, double gauss_curvature) {
    const double kc = gauss_curvature;
    const auto secs = iterated_covariant(u, 2);
    const VectorXd g00 = row_dots(secs[0].vectors, secs[0].vectors);
    const VectorXd g01 = row_dots(secs[0].vectors, secs[1].vectors);
    const VectorXd g11 = row_dots(secs[1].vectors, secs[1].vectors);

    double e = l2_norm_sq(secs[2].vectors, u.grid);
    e += kc * kc / 8.0 * integrate(g00.array().cube().matrix(), u.grid);
    e -= kc * integrate(g01.array().square().matrix(), u.grid);
    e -= 1.5 * kc * integrate(g00.cwiseProduct(g11), u.grid);
    return e;
}

double conserved_energy(const MapState& u) {
    const auto kc = u.target->gauss_curvature();
    if (!kc)
        throw WrongTarget("the conserved energy functional needs a constant-curvature surface");
    return conserved_energy(u, *kc);
}

double dissipation_residual(const MapState& before, const MapState& after,
                            const FlowCoefficients& c, double dt) {
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("dissipation residual requires eps > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dissipation residual requires dt > 0");

    const double l2_before = l2_norm_sq(velocity(before).vectors, before.grid);
    const double l2_after = l2_norm_sq(velocity(after).vectors, after.grid);
    const double rate = (l2_after - l2_before) / dt;

    const auto secs_b = iterated_covariant(before, 2);
    const auto secs_a = iterated_covariant(after, 2);
    const double diss = c.epsilon * (l2_norm_sq(secs_b[2].vectors, before.grid) +
                                     l2_norm_sq(secs_a[2].vectors, after.grid));

    double h2 = l2_before;
    for (int j = 1; j <= 2; ++j) h2 += l2_norm_sq(secs_b[j].vectors, before.grid);
    const double floor = 1e-12 * h2;
    return std::abs(rate + diss) / (diss + floor);
}

double appendix_commutator_check(const MapState& u, int m, double a) {
    if (m < 0 || m + 4 > kMaxCovariantOrder)
        throw std::invalid_argument("appendix check order out of range");
    const auto secs = iterated_covariant(u, m + 4);
    const Grid& grid = u.grid;

    const VectorXd k1 = gauge_slope(u, a);
    const VectorXd k2 = spectral::derivative(k1, grid, 1);
    const VectorXd k3 = spectral::derivative(k1, grid, 2);
    const VectorXd k4 = spectral::derivative(k1, grid, 3);
    const VectorXd ek = accumulate_gauge(k1, grid.dx()).array().exp();

    // Gauged layers e^K D^j (e^{-K} . ) applied to V = e^K D^m u_x: the
    // exponential never gets differentiated on the grid (K is not periodic);
    // each layer multiplies by K_x and applies the covariant derivative.
    std::vector<MatrixXd> layer(5);
    layer[0] = secs[m].vectors;
    for (int j = 1; j <= 4; ++j) {
        const MatrixXd flat = spectral::derivative(layer[j - 1], grid, 1);
        layer[j] = scale_rows(layer[j - 1], k1) + u.target->tangent_project(u.points, flat);
    }
    std::vector<MatrixXd> v(5);
    for (int j = 0; j <= 4; ++j) v[j] = scale_rows(layer[j], ek);

    // Coefficient polynomials of the expansion.
    const VectorXd c2 = k2 - k1.array().square().matrix();
    const VectorXd c3 =
        k3 - 3.0 * k1.cwiseProduct(k2) + k1.array().cube().matrix();
    const VectorXd c4 = k4 - 4.0 * k1.cwiseProduct(k3) - 3.0 * k2.array().square().matrix() +
                        6.0 * k1.array().square().matrix().cwiseProduct(k2) -
                        k1.array().pow(4).matrix();

    MatrixXd rhs[4];
    rhs[0] = v[1] - scale_rows(v[0], k1);
    rhs[1] = v[2] - 2.0 * scale_rows(v[1], k1) - scale_rows(v[0], c2);
    rhs[2] = v[3] - 3.0 * scale_rows(v[2], k1) - 3.0 * scale_rows(v[1], c2) - scale_rows(v[0], c3);
    rhs[3] = v[4] - 4.0 * scale_rows(v[3], k1) - 6.0 * scale_rows(v[2], c2) -
             4.0 * scale_rows(v[1], c3) - scale_rows(v[0], c4);

    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const MatrixXd lhs = scale_rows(secs[m + k].vectors, ek);
        const double scale = std::max(max_abs(lhs), max_abs(rhs[k - 1]));
        if (scale == 0.0) continue;  // zero fields: residual 0
        worst = std::max(worst, max_abs(lhs - rhs[k - 1]) / scale);
    }
    return worst;
}

MatrixXd nabla_j_apply(const MapState& u, const TangentSection& V) {
    const MatrixXd jv = u.target->complex_structure(u.points, V.vectors);
    const MatrixXd d_jv =
        u.target->tangent_project(u.points, spectral::derivative(jv, u.grid, 1));
    const MatrixXd dv = u.target->tangent_project(u.points, spectral::derivative(V.vectors, u.grid, 1));
    return d_jv - u.target->complex_structure(u.points, dv);
}

double nabla_j_energy_pairing_check(const MapState& u, const TangentSection& V) {
    const MatrixXd njv = nabla_j_apply(u, V);
    const double pairing = std::abs(l2_inner(njv, V.vectors, u.grid));
    const double scale = std::sqrt(l2_norm_sq(njv, u.grid) * l2_norm_sq(V.vectors, u.grid));
    if (scale == 0.0) return 0.0;
    return pairing / scale;
}

double nabla_j_norm_bound_check(const MapState& u, const TangentSection& V) {
    const MatrixXd njv = nabla_j_apply(u, V);
    const VectorXd num = njv.rowwise().norm();
    const VectorXd den =
        velocity(u).vectors.rowwise().norm().cwiseProduct(V.vectors.rowwise().norm());

    const double den_floor = 1e-9 * (den.maxCoeff() + 1e-300);
    const double num_scale = num.maxCoeff();
    double bound = 0.0;
    bool any = false;
    for (Eigen::Index j = 0; j < num.size(); ++j) {
        if (den(j) <= den_floor) {
            if (num(j) > 1e-6 * num_scale && num(j) > 1e-12)
                throw DivisionDegenerate("|(DJ)V| does not vanish where |u_x||V| does");
            continue;
        }
        bound = std::max(bound, num(j) / den(j));
        any = true;
    }
    return any ? bound : 0.0;
}

DiagnosticsRecord compute_diagnostics(const MapState& u, const DiagnosticsOptions& options,
                                      const MapState* previous, double dt) {
    const int m = options.m;
    DiagnosticsRecord rec;
    rec.t = u.time;

    const auto secs = iterated_covariant(u, m);
    std::vector<double> terms(m + 1);
    for (int j = 0; j <= m; ++j) terms[j] = l2_norm_sq(secs[j].vectors, u.grid);

    rec.l2 = terms[0];
    rec.sobolev_sq.resize(m);
    double acc = terms[0];
    for (int j = 1; j <= m; ++j) {
        acc += terms[j];
        rec.sobolev_sq[j - 1] = acc;
    }

    const double a = options.coefficients.a;
    const VectorXd k = gauge_factor(u, a);
    const VectorXd ek = k.array().exp();
    const MatrixXd gauged = scale_rows(secs[m].vectors, ek);
    rec.gauge_energy_sq = (m >= 1 ? rec.sobolev_sq[m - 1] - terms[m] : rec.l2) +
                          l2_norm_sq(gauged, u.grid);
    rec.gauge_bound = std::exp(k.array().abs().maxCoeff());

    if (u.target->gauss_curvature()) rec.energy = conserved_energy(u);
    rec.constraint = u.constraint_violation();
    if (previous && options.coefficients.epsilon > 0.0 && dt > 0.0)
        rec.dissipation_residual = dissipation_residual(*previous, u, options.coefficients, dt);
    return rec;
}

std::string csv_header(int m) {
    std::string h = "t,l2";
    for (int j = 1; j <= m; ++j) h += ",h" + std::to_string(j);
    h += ",N_m,E,constraint,dissipation_residual,gauge_bound";
    return h;
}

namespace {
std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

std::string csv_row(const DiagnosticsRecord& rec) {
    std::string row = fmt(rec.t) + "," + fmt(rec.l2);
    for (double h : rec.sobolev_sq) row += "," + fmt(h);
    row += "," + fmt(std::sqrt(rec.gauge_energy_sq));
    row += "," + fmt(rec.energy ? *rec.energy : std::nan(""));
    row += "," + fmt(rec.constraint);
    row += "," + fmt(rec.dissipation_residual ? *rec.dissipation_residual : std::nan(""));
    row += "," + fmt(rec.gauge_bound);
    return row;
}

}  // namespace dflow
