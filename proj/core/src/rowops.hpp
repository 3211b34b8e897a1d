#pragma once

#include <Eigen/Dense>

// Small row-wise helpers shared by the implementation files. Fields are
// stored as (n x d) matrices, one grid point per row, so pointwise metric
// operations become whole-column array expressions.
namespace dflow::detail {

inline Eigen::VectorXd row_dots(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return (A.array() * B.array()).rowwise().sum();
}

inline Eigen::MatrixXd scale_rows(const Eigen::MatrixXd& M, const Eigen::VectorXd& s) {
    return (M.array().colwise() * s.array()).matrix();
}

}  // namespace dflow::detail
