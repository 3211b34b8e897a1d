#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dflow/diagnostics.hpp"
#include "dflow/errors.hpp"
#include "dflow/fields.hpp"
#include "dflow/target.hpp"
#include "test_util.hpp"

using namespace dflow;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testutil::max_abs;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd r(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

constexpr double kTorusR = 0.7071067811865475244;

}  // namespace

TEST_CASE("factory produces the three targets with their advertised attributes") {
    auto s2 = make_target("s2");
    CHECK(s2->kind() == TargetKind::Sphere2);
    CHECK(s2->ambient_dim() == 3);
    CHECK(s2->is_kahler());
    CHECK(s2->gauss_curvature().has_value());
    CHECK(s2->gauss_curvature().value() == 1.0);
    CHECK(s2->tube_radius() == 0.5);

    auto t2 = make_target("t2-clifford");
    CHECK(t2->kind() == TargetKind::CliffordTorus2);
    CHECK(t2->ambient_dim() == 4);
    CHECK(t2->is_kahler());
    CHECK(t2->gauss_curvature().value() == 0.0);
    CHECK(t2->circle_radius() == doctest::Approx(kTorusR).epsilon(1e-15));
    CHECK(t2->tube_radius() == doctest::Approx(kTorusR / 2.0).epsilon(1e-15));

    auto s6 = make_target("s6");
    CHECK(s6->kind() == TargetKind::Sphere6);
    CHECK(s6->ambient_dim() == 7);
    CHECK_FALSE(s6->is_kahler());
    CHECK_FALSE(s6->gauss_curvature().has_value());

    CHECK_THROWS_AS(make_target("s3"), BadParameters);
}

TEST_CASE("sphere projection is radial normalization inside the tube") {
    auto s2 = make_target("s2");
    VectorXd p = vec({0.0, 0.0, 1.4});
    VectorXd q = s2->project(p);
    CHECK(max_abs(q - vec({0.0, 0.0, 1.0})) < 1e-15);
    CHECK(s2->distance(p) == doctest::Approx(0.4).epsilon(1e-14));

    // Idempotence to round-off.
    CHECK(max_abs(s2->project(q) - q) < 1e-15);

    // Outside the tube the projection refuses.
    CHECK_THROWS_AS(s2->project(vec({0.4, 0.0, 0.0})), TubeExceeded);
}

TEST_CASE("clifford torus nearest point matches a dense-search value") {
    auto t2 = make_target("t2-clifford");
    // Independently computed: per-pair radial projection of
    // p = (0.8, 0.1, -0.3, 0.55), cross-checked by scanning 4000^2 angles.
    VectorXd p = vec({0.8, 0.1, -0.3, 0.55});
    VectorXd q_expect = vec({7.0164641544562334e-01, 8.7705801930702917e-02,
                             -3.3859958878986007e-01, 6.2076591278141036e-01});
    VectorXd q = t2->project(p);
    CHECK(max_abs(q - q_expect) < 1e-14);
    CHECK(t2->distance(p) == doctest::Approx(1.2775882579060632e-01).epsilon(1e-14));
    CHECK(max_abs(t2->project(q) - q) < 1e-15);

    // One circle factor nearly degenerate: far outside the tube.
    CHECK_THROWS_AS(t2->project(vec({0.1, 0.0, 0.9, 0.0})), TubeExceeded);
}

TEST_CASE("second fundamental form: closed forms, symmetry, normality") {
    auto s2 = make_target("s2");
    // The convention is fixed by D V = V_x + A(V, q_x); on a unit sphere
    // that makes A(X, Y) = g(X, Y) q.
    VectorXd q = vec({0.0, 0.0, 1.0});
    VectorXd X = vec({1.0, 2.0, 0.0});
    VectorXd Y = vec({-3.0, 0.5, 0.0});
    VectorXd A = s2->second_fundamental_form(q, X, Y);
    CHECK(max_abs(A - vec({0.0, 0.0, -2.0})) < 1e-14);

    // Torus block value frozen from the per-factor formula
    // A(X,Y)_i = (X_i . Y_i)/r^2 q_i at angles alpha = 0.7, beta = -1.2.
    auto t2 = make_target("t2-clifford");
    const double al = 0.7, be = -1.2;
    VectorXd qt = vec({kTorusR * std::cos(al), kTorusR * std::sin(al),
                       kTorusR * std::cos(be), kTorusR * std::sin(be)});
    VectorXd e1 = vec({-std::sin(al), std::cos(al), 0.0, 0.0});
    VectorXd e2 = vec({0.0, 0.0, -std::sin(be), std::cos(be)});
    VectorXd Xt = 1.3 * e1 - 0.4 * e2;
    VectorXd Yt = -0.7 * e1 + 2.1 * e2;
    VectorXd At = t2->second_fundamental_form(qt, Xt, Yt);
    VectorXd At_expect = vec({-9.8430167684287218e-01, -8.2906586527507609e-01,
                              -4.3045905068205648e-01, 1.1072059454708065e+00});
    CHECK(max_abs(At - At_expect) < 1e-13);

    // Symmetry, bilinearity, and normality on random tangent pairs.
    std::mt19937 rng(testutil::kSeed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto name : {"s2", "t2-clifford", "s6"}) {
        auto target = make_target(name);
        const int d = target->ambient_dim();
        VectorXd qq = target->project(
            VectorXd(testutil::random_near_points(*target, 1, rng, 0.05).row(0)));
        VectorXd Xr(d), Yr(d);
        for (int i = 0; i < d; ++i) Xr(i) = unit(rng);
        for (int i = 0; i < d; ++i) Yr(i) = unit(rng);
        Xr = target->tangent_project(qq, Xr);
        Yr = target->tangent_project(qq, Yr);

        VectorXd Axy = target->second_fundamental_form(qq, Xr, Yr);
        VectorXd Ayx = target->second_fundamental_form(qq, Yr, Xr);
        CHECK(max_abs(Axy - Ayx) < 1e-14);

        VectorXd A2 = target->second_fundamental_form(qq, 2.0 * Xr, Yr);
        CHECK(max_abs(A2 - 2.0 * Axy) < 1e-13);

        // A(X,Y) is normal: projecting it back to the tangent space kills it.
        CHECK(max_abs(target->tangent_project(qq, Axy)) < 1e-14);
    }
}

TEST_CASE("complex structure: J^2 = -id, isometry, antisymmetry, tangency") {
    std::mt19937 rng(testutil::kSeed + 1);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto name : {"s2", "t2-clifford", "s6"}) {
        auto target = make_target(name);
        const int d = target->ambient_dim();
        MatrixXd q = target->project(testutil::random_near_points(*target, 8, rng, 0.05));
        MatrixXd X(8, d), Y(8, d);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < d; ++c) X(r, c) = unit(rng);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < d; ++c) Y(r, c) = unit(rng);
        X = target->tangent_project(q, X);
        Y = target->tangent_project(q, Y);

        MatrixXd JX = target->complex_structure(q, X);
        // JX stays tangent.
        CHECK(max_abs(target->tangent_project(q, JX) - JX) < 1e-14);
        // J^2 = -id on the tangent space.
        CHECK(max_abs(target->complex_structure(q, JX) + X) < 1e-13);
        // Isometry.
        CHECK(max_abs(pointwise_dot(JX, JX) - pointwise_dot(X, X)) < 1e-13);
        // Antisymmetry g(JX, Y) = -g(X, JY).
        MatrixXd JY = target->complex_structure(q, Y);
        CHECK(max_abs(pointwise_dot(JX, Y) + pointwise_dot(X, JY)) < 1e-13);
    }

    // Pinned orientations. Sphere: J(q, X) = q x X.
    auto s2 = make_target("s2");
    VectorXd q = vec({0.0, 0.0, 1.0});
    CHECK(max_abs(s2->complex_structure(q, vec({1.0, 0.0, 0.0})) - vec({0.0, 1.0, 0.0})) <
          1e-15);
    // Torus: J rotates the first circle direction into the second.
    auto t2 = make_target("t2-clifford");
    VectorXd qt = vec({kTorusR, 0.0, kTorusR, 0.0});
    CHECK(max_abs(t2->complex_structure(qt, vec({0.0, 1.0, 0.0, 0.0})) -
                  vec({0.0, 0.0, 0.0, 1.0})) < 1e-15);
}

TEST_CASE("seven-dimensional cross product: frozen value and identities") {
    // Value computed from an independently generated multiplication table
    // (triples (i, i+1, i+3) mod 7, antisymmetrized).
    MatrixXd X(1, 7), Y(1, 7);
    X << 1, 2, -1, 0.5, 0, 3, -2;
    Y << 0.5, -1, 2, 1, -0.5, 0, 1;
    MatrixXd Z = cross7(X, Y);
    MatrixXd Z_expect(1, 7);
    Z_expect << 7.0, 2.75, -4.0, 3.0, 2.0, -2.5, 5.25;
    CHECK(max_abs(Z - Z_expect) < 1e-14);

    std::mt19937 rng(testutil::kSeed + 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    MatrixXd A(16, 7), B(16, 7);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 7; ++c) {
            A(r, c) = unit(rng);
            B(r, c) = unit(rng);
        }
    MatrixXd AB = cross7(A, B);
    // Antisymmetry.
    CHECK(max_abs(AB + cross7(B, A)) < 1e-14);
    // Orthogonality to both factors.
    CHECK(max_abs(pointwise_dot(AB, A)) < 1e-13);
    CHECK(max_abs(pointwise_dot(AB, B)) < 1e-13);
    // Norm identity |A x B|^2 = |A|^2 |B|^2 - (A . B)^2.
    VectorXd lhs = pointwise_dot(AB, AB);
    VectorXd rhs = pointwise_dot(A, A).cwiseProduct(pointwise_dot(B, B)) -
                   pointwise_dot(A, B).cwiseAbs2();
    CHECK(max_abs(lhs - rhs) < 1e-12);

    // cross3 sanity on the canonical basis.
    MatrixXd ex(1, 3), ey(1, 3);
    ex << 1, 0, 0;
    ey << 0, 1, 0;
    MatrixXd ez = cross3(ex, ey);
    CHECK(ez(0, 2) == 1.0);
    CHECK(std::abs(ez(0, 0)) + std::abs(ez(0, 1)) == 0.0);
}

TEST_CASE("J is parallel on the surfaces and not on the 6-sphere") {
    std::mt19937 rng(testutil::kSeed + 3);
    const Grid grid(128, 4.0 * M_PI);

    for (auto name : {"s2", "t2-clifford"}) {
        auto target = make_target(name);
        // Gentle curve: the identity is exact, so what the check measures is
        // the projection-induced spectral tail, which derivatives amplify.
        MapState u = testutil::random_curve(grid, target, rng, 0.08, 0.5, 12);
        TangentSection v = velocity(u);
        TangentSection dv = covariant_derivative(v);
        // (D J) V = D(JV) - J(DV) vanishes identically on a Kahler target.
        MatrixXd jd = nabla_j_apply(u, dv);
        CHECK(max_abs(jd) / std::max(1.0, max_abs(dv.vectors)) < 1e-9);
    }

    auto s6 = make_target("s6");
    MapState u = testutil::random_curve(grid, s6, rng);
    TangentSection v = velocity(u);
    TangentSection dv = covariant_derivative(v);
    CHECK(l2_norm_sq(nabla_j_apply(u, dv), grid) > 1e-4);

    // The pointwise bound |(D J) V| <= |u_x| |V| with constant one.
    double bound = nabla_j_norm_bound_check(u, dv);
    CHECK(bound <= 1.0 + 1e-9);
    CHECK(bound > 0.1);
}
