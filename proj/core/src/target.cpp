#include "dflow/target.hpp"

#include <cmath>

#include "dflow/errors.hpp"
#include "rowops.hpp"

namespace dflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using detail::row_dots;
using detail::scale_rows;

MatrixXd cross3(const MatrixXd& X, const MatrixXd& Y) {
    MatrixXd r(X.rows(), 3);
    r.col(0) = X.col(1).cwiseProduct(Y.col(2)) - X.col(2).cwiseProduct(Y.col(1));
    r.col(1) = X.col(2).cwiseProduct(Y.col(0)) - X.col(0).cwiseProduct(Y.col(2));
    r.col(2) = X.col(0).cwiseProduct(Y.col(1)) - X.col(1).cwiseProduct(Y.col(0));
    return r;
}

// Multiplication table generated by e_i x e_{i+1} = e_{i+3} with indices
// cyclic mod 7; each line (i,j,k) contributes the three cyclic products.
MatrixXd cross7(const MatrixXd& X, const MatrixXd& Y) {
    static constexpr int lines[7][3] = {{0, 1, 3}, {1, 2, 4}, {2, 3, 5}, {3, 4, 6},
                                        {4, 5, 0}, {5, 6, 1}, {6, 0, 2}};
    MatrixXd r = MatrixXd::Zero(X.rows(), 7);
    for (const auto& l : lines) {
        const int i = l[0], j = l[1], k = l[2];
        r.col(k) += X.col(i).cwiseProduct(Y.col(j)) - X.col(j).cwiseProduct(Y.col(i));
        r.col(i) += X.col(j).cwiseProduct(Y.col(k)) - X.col(k).cwiseProduct(Y.col(j));
        r.col(j) += X.col(k).cwiseProduct(Y.col(i)) - X.col(i).cwiseProduct(Y.col(k));
    }
    return r;
}

MatrixXd TargetManifold::project(const MatrixXd& ambient) const {
    const VectorXd d = distance(ambient);
    Eigen::Index worst;
    const double dmax = d.maxCoeff(&worst);
    if (!(dmax < tube_radius_))
        throw TubeExceeded(dmax, tube_radius_);
    return project_unchecked(ambient);
}

VectorXd TargetManifold::project(const VectorXd& ambient) const {
    return project(MatrixXd(ambient.transpose())).row(0);
}

double TargetManifold::distance(const VectorXd& ambient) const {
    return distance(MatrixXd(ambient.transpose()))(0);
}

VectorXd TargetManifold::tangent_project(const VectorXd& q, const VectorXd& X) const {
    return tangent_project(MatrixXd(q.transpose()), MatrixXd(X.transpose())).row(0);
}

VectorXd TargetManifold::second_fundamental_form(const VectorXd& q, const VectorXd& X,
                                                 const VectorXd& Y) const {
    return second_fundamental_form(MatrixXd(q.transpose()), MatrixXd(X.transpose()),
                                   MatrixXd(Y.transpose()))
        .row(0);
}

VectorXd TargetManifold::complex_structure(const VectorXd& q, const VectorXd& X) const {
    return complex_structure(MatrixXd(q.transpose()), MatrixXd(X.transpose())).row(0);
}

namespace {

// Unit sphere in R^d. A(q)(X,Y) = g(X,Y) q: differentiating g(q,V) = 0 along
// the curve shows V_x + g(V, q_x) q is again tangent.
class RoundSphere : public TargetManifold {
  public:
    using TargetManifold::TargetManifold;

    VectorXd distance(const MatrixXd& Q) const override {
        return (Q.rowwise().norm().array() - 1.0).abs();
    }

    MatrixXd tangent_project(const MatrixXd& q, const MatrixXd& X) const override {
        return X - scale_rows(q, row_dots(q, X));
    }

    MatrixXd second_fundamental_form(const MatrixXd& q, const MatrixXd& X,
                                     const MatrixXd& Y) const override {
        return scale_rows(q, row_dots(X, Y));
    }

  protected:
    MatrixXd project_unchecked(const MatrixXd& Q) const override {
        return scale_rows(Q, Q.rowwise().norm().cwiseInverse());
    }
};

class Sphere2 final : public RoundSphere {
  public:
    Sphere2()
        : RoundSphere(TargetKind::Sphere2, "s2", 3, 0.5, /*circle_radius=*/1.0,
                      /*kahler=*/true, /*gauss=*/1.0) {}

    MatrixXd complex_structure(const MatrixXd& q, const MatrixXd& X) const override {
        return cross3(q, X);
    }
};

class Sphere6 final : public RoundSphere {
  public:
    Sphere6()
        : RoundSphere(TargetKind::Sphere6, "s6", 7, 0.5, /*circle_radius=*/1.0,
                      /*kahler=*/false, /*gauss=*/std::nullopt) {}

    MatrixXd complex_structure(const MatrixXd& q, const MatrixXd& X) const override {
        return cross7(q, X);
    }
};

// S^1(r) x S^1(r) in R^4 with r = 1/sqrt(2); a flat Kahler surface. The
// tangent plane at q is spanned by e1 = (-q2, q1, 0, 0)/r and
// e2 = (0, 0, -q4, q3)/r, and J rotates e1 into e2.
class CliffordTorus final : public TargetManifold {
  public:
    static constexpr double kR = 0.7071067811865475244;

    CliffordTorus()
        : TargetManifold(TargetKind::CliffordTorus2, "t2-clifford", 4,
                         /*tube_radius=*/kR / 2.0, /*circle_radius=*/kR, /*kahler=*/true,
                         /*gauss=*/0.0) {}

    VectorXd distance(const MatrixXd& Q) const override {
        const VectorXd n12 = Q.leftCols(2).rowwise().norm();
        const VectorXd n34 = Q.rightCols(2).rowwise().norm();
        return ((n12.array() - kR).square() + (n34.array() - kR).square()).sqrt();
    }

    MatrixXd tangent_project(const MatrixXd& q, const MatrixXd& X) const override {
        const VectorXd c1 = circle_dot(q, X, 0);
        const VectorXd c2 = circle_dot(q, X, 2);
        MatrixXd r(q.rows(), 4);
        r.col(0) = -c1.cwiseProduct(q.col(1)) / kR;
        r.col(1) = c1.cwiseProduct(q.col(0)) / kR;
        r.col(2) = -c2.cwiseProduct(q.col(3)) / kR;
        r.col(3) = c2.cwiseProduct(q.col(2)) / kR;
        return r;
    }

    MatrixXd second_fundamental_form(const MatrixXd& q, const MatrixXd& X,
                                     const MatrixXd& Y) const override {
        const VectorXd d12 =
            (X.col(0).cwiseProduct(Y.col(0)) + X.col(1).cwiseProduct(Y.col(1))) / (kR * kR);
        const VectorXd d34 =
            (X.col(2).cwiseProduct(Y.col(2)) + X.col(3).cwiseProduct(Y.col(3))) / (kR * kR);
        MatrixXd r(q.rows(), 4);
        r.col(0) = d12.cwiseProduct(q.col(0));
        r.col(1) = d12.cwiseProduct(q.col(1));
        r.col(2) = d34.cwiseProduct(q.col(2));
        r.col(3) = d34.cwiseProduct(q.col(3));
        return r;
    }

    MatrixXd complex_structure(const MatrixXd& q, const MatrixXd& X) const override {
        const VectorXd c1 = circle_dot(q, X, 0);  // component along e1
        const VectorXd c2 = circle_dot(q, X, 2);  // component along e2
        // J X = c1 e2 - c2 e1
        MatrixXd r(q.rows(), 4);
        r.col(0) = c2.cwiseProduct(q.col(1)) / kR;
        r.col(1) = -c2.cwiseProduct(q.col(0)) / kR;
        r.col(2) = -c1.cwiseProduct(q.col(3)) / kR;
        r.col(3) = c1.cwiseProduct(q.col(2)) / kR;
        return r;
    }

  protected:
    MatrixXd project_unchecked(const MatrixXd& Q) const override {
        const VectorXd s12 = Q.leftCols(2).rowwise().norm().cwiseInverse() * kR;
        const VectorXd s34 = Q.rightCols(2).rowwise().norm().cwiseInverse() * kR;
        MatrixXd r(Q.rows(), 4);
        r.col(0) = Q.col(0).cwiseProduct(s12);
        r.col(1) = Q.col(1).cwiseProduct(s12);
        r.col(2) = Q.col(2).cwiseProduct(s34);
        r.col(3) = Q.col(3).cwiseProduct(s34);
        return r;
    }

  private:
    // Dot product of X with the unit tangent of the circle factor starting
    // at column c, i.e. with (-q_{c+1}, q_c)/r.
    static VectorXd circle_dot(const MatrixXd& q, const MatrixXd& X, int c) {
        return (X.col(c + 1).cwiseProduct(q.col(c)) - X.col(c).cwiseProduct(q.col(c + 1))) / kR;
    }
};

}  // namespace

std::shared_ptr<const TargetManifold> make_target(const std::string& name) {
    if (name == "s2") return std::make_shared<Sphere2>();
    if (name == "t2-clifford") return std::make_shared<CliffordTorus>();
    if (name == "s6") return std::make_shared<Sphere6>();
    throw BadParameters("unknown target '" + name + "' (expected s2, t2-clifford, or s6)");
}

}  // namespace dflow
