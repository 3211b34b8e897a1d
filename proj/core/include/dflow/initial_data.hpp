#pragma once

#include <memory>
#include <string>

#include "dflow/fields.hpp"

namespace dflow {

/// Parameters for the built-in initial-curve families. Families read only
/// the fields they need:
///   constant                      a single point, zero velocity
///   great-circle (k)              winding-k equatorial circle (spheres)
///   perturbed-circle (k,amp,mode) great circle plus a projected transverse
///                                 ripple of the given mode and amplitude
///   bump (center,width,height)    constant curve plus a projected localized
///                                 bump (periodic Gaussian profile)
///   torus-winding (k1,k2)         (k1,k2) geodesic on the Clifford torus
///   s6-circle (plane_i,plane_j,k) winding-k circle in a coordinate plane
///                                 of R^7 (s6 only)
struct InitialDataSpec {
    std::string family = "great-circle";
    int k = 1;
    double amp = 0.1;
    int mode = 3;
    double center = 0.0;
    double width = 1.0;
    double height = 0.1;
    int k1 = 1;
    int k2 = 0;
    int plane_i = 1;
    int plane_j = 2;
};

/// Builds the curve at time 0. Perturbed families are assembled in the
/// ambient space and projected, so the result satisfies the constraint to
/// round-off. Throws BadParameters for out-of-range parameters or a family
/// the target does not support.
MapState make_initial_data(const Grid& grid, std::shared_ptr<const TargetManifold> target,
                           const InitialDataSpec& spec);

}  // namespace dflow
