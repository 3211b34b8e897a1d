#pragma once

#include <stdexcept>
#include <string>

namespace dflow {

// A point left the tubular neighbourhood where nearest-point projection is
// single-valued. Carries the offending distance and the tube radius.
struct TubeExceeded : std::runtime_error {
    TubeExceeded(double distance, double radius, double time = 0.0)
        : std::runtime_error("point at distance " + std::to_string(distance) +
                             " from target exceeds tube radius " + std::to_string(radius)),
          distance(distance), radius(radius), time(time) {}
    double distance;
    double radius;
    double time;
};

// Solution norm passed the configured ceiling (or became non-finite).
struct BlowupDetected : std::runtime_error {
    BlowupDetected(double time, double h1_norm)
        : std::runtime_error("H1 norm " + std::to_string(h1_norm) +
                             " exceeded blowup ceiling at t = " + std::to_string(time)),
          time(time), h1_norm(h1_norm) {}
    double time;
    double h1_norm;
};

// Fixed-point sweeps stopped contracting in the reference integrator.
struct NoContraction : std::runtime_error {
    explicit NoContraction(const std::string& what) : std::runtime_error(what) {}
};

// Operation asked of a target that does not support it (e.g. the surface
// energy functional on a target that is not a surface).
struct WrongTarget : std::logic_error {
    explicit WrongTarget(const std::string& what) : std::logic_error(what) {}
};

// A pointwise ratio check hit a vanishing denominator with a non-vanishing
// numerator, so no finite constant can be reported.
struct DivisionDegenerate : std::runtime_error {
    explicit DivisionDegenerate(const std::string& what) : std::runtime_error(what) {}
};

// Config text could not be parsed (syntax, unknown key, wrong type).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Config parsed but the requested combination is rejected.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Initial-data family parameters outside their admissible range.
struct BadParameters : std::invalid_argument {
    explicit BadParameters(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace dflow
