#pragma once

#include <Eigen/Dense>
#include <complex>

#include "dflow/grid.hpp"

namespace dflow::spectral {

/// Half-complex spectrum of a real field: (n/2 + 1) rows of Fourier
/// coefficients (unnormalised, FFTW convention), one column per component.
using Spectrum = Eigen::MatrixXcd;

/// Forward real-to-complex transform of each column.
Spectrum analyze(const Eigen::MatrixXd& values);

/// Inverse transform back to n grid values per column (normalised by 1/n).
Eigen::MatrixXd synthesize(const Spectrum& coeffs, int n);

/// Angular wavenumbers xi_k = 2 pi k / L for k = 0 .. n/2.
Eigen::VectorXd wavenumbers(const Grid& grid);

/// Spectral derivative of the given order of each column. The Nyquist mode
/// is zeroed for odd orders (its derivative is not representable on the
/// grid) and kept with multiplier (-1)^(order/2) xi^order for even orders.
Eigen::MatrixXd derivative(const Eigen::MatrixXd& values, const Grid& grid, int order);
Eigen::VectorXd derivative(const Eigen::VectorXd& values, const Grid& grid, int order);

/// Applies a Fourier multiplier m(xi_k), given as one value per retained
/// mode k = 0 .. n/2, to each column. The Nyquist entry should be real.
Eigen::MatrixXd apply_multiplier(const Eigen::MatrixXd& values, const Grid& grid,
                                 const Eigen::VectorXcd& multiplier);

/// Two-thirds rule: zeroes every mode with k > n/3.
Eigen::MatrixXd dealias(const Eigen::MatrixXd& values, const Grid& grid);

}  // namespace dflow::spectral
