#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

namespace dflow {

enum class TargetKind { Sphere2, CliffordTorus2, Sphere6 };

/// A compact target manifold isometrically embedded in R^d, together with its
/// almost complex structure and the extrinsic data the flow needs.
///
/// All geometric operations act row-wise on (n x d) matrices so a whole grid
/// of points is processed per call; the VectorXd overloads wrap single points.
/// The bilinear form A is the correction that turns flat derivatives of a
/// tangent field into covariant ones:
///     (covariant d/dx) V = V_x + A(q)(V, q_x),   A(q)(X,Y) normal-valued.
class TargetManifold {
  public:
    virtual ~TargetManifold() = default;

    TargetKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int ambient_dim() const { return dim_; }
    /// Radius of the tube around the manifold where nearest-point projection
    /// is used; half the focal distance.
    double tube_radius() const { return tube_radius_; }
    /// Radius of the defining sphere (1) or of each torus factor circle.
    double circle_radius() const { return circle_radius_; }
    bool is_kahler() const { return kahler_; }
    /// Gauss curvature for surface targets, empty otherwise.
    std::optional<double> gauss_curvature() const { return gauss_; }

    /// Nearest-point projection of ambient points onto the manifold.
    /// Throws TubeExceeded if any row is farther than tube_radius().
    Eigen::MatrixXd project(const Eigen::MatrixXd& ambient) const;
    Eigen::VectorXd project(const Eigen::VectorXd& ambient) const;

    /// Row-wise distance to the manifold.
    virtual Eigen::VectorXd distance(const Eigen::MatrixXd& ambient) const = 0;
    double distance(const Eigen::VectorXd& ambient) const;

    /// Orthogonal projection of ambient vectors X onto T_q N, row-wise.
    virtual Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& q,
                                            const Eigen::MatrixXd& X) const = 0;
    Eigen::VectorXd tangent_project(const Eigen::VectorXd& q, const Eigen::VectorXd& X) const;

    /// The normal-valued bilinear form A(q)(X,Y) described above, row-wise.
    virtual Eigen::MatrixXd second_fundamental_form(const Eigen::MatrixXd& q,
                                                    const Eigen::MatrixXd& X,
                                                    const Eigen::MatrixXd& Y) const = 0;
    Eigen::VectorXd second_fundamental_form(const Eigen::VectorXd& q, const Eigen::VectorXd& X,
                                            const Eigen::VectorXd& Y) const;

    /// Almost complex structure J_q applied to tangent vectors, row-wise.
    virtual Eigen::MatrixXd complex_structure(const Eigen::MatrixXd& q,
                                              const Eigen::MatrixXd& X) const = 0;
    Eigen::VectorXd complex_structure(const Eigen::VectorXd& q, const Eigen::VectorXd& X) const;

  protected:
    TargetManifold(TargetKind kind, std::string name, int dim, double tube_radius,
                   double circle_radius, bool kahler, std::optional<double> gauss)
        : kind_(kind), name_(std::move(name)), dim_(dim), tube_radius_(tube_radius),
          circle_radius_(circle_radius), kahler_(kahler), gauss_(gauss) {}

    virtual Eigen::MatrixXd project_unchecked(const Eigen::MatrixXd& ambient) const = 0;

  private:
    TargetKind kind_;
    std::string name_;
    int dim_;
    double tube_radius_;
    double circle_radius_;
    bool kahler_;
    std::optional<double> gauss_;
};

/// Factory keyed by the CLI names "s2", "t2-clifford", "s6".
std::shared_ptr<const TargetManifold> make_target(const std::string& name);

/// Seven-dimensional cross product on R^7 (the multiplication table with
/// e_i x e_{i+1} = e_{i+3}, indices cyclic), applied row-wise.
Eigen::MatrixXd cross7(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

/// Ordinary cross product on R^3, applied row-wise.
Eigen::MatrixXd cross3(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

struct MapState;
struct TangentSection;

/// Smallest constant C with |(D J)V| <= C |u_x| |V| pointwise along the
/// curve, where (D J)V = D(JV) - J(DV). Rows where |u_x||V| nearly vanishes
/// are skipped; if such a row carries a non-negligible numerator the bound
/// is not finite and DivisionDegenerate is thrown.
double nabla_j_norm_bound_check(const MapState& u, const TangentSection& V);

}  // namespace dflow
