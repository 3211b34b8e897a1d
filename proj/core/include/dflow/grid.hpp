#pragma once

#include <Eigen/Dense>

namespace dflow {

/// Uniform periodic grid on [0, L): nodes x_j = j L / n.
struct Grid {
    Grid(int n, double length);

    int n;
    double length;

    double dx() const { return length / n; }
    Eigen::VectorXd nodes() const;

    bool operator==(const Grid& other) const = default;
};

}  // namespace dflow
