#include "dflow/fields.hpp"

#include <json.hpp>
#include <stdexcept>

#include "dflow/errors.hpp"
#include "dflow/spectral.hpp"
#include "rowops.hpp"

namespace dflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MapState::MapState(Grid grid, double time, Eigen::MatrixXd points,
                   std::shared_ptr<const TargetManifold> target)
    : grid(grid), time(time), points(std::move(points)), target(std::move(target)) {
    if (!this->target) throw std::invalid_argument("MapState requires a target");
    if (this->points.rows() != grid.n || this->points.cols() != this->target->ambient_dim())
        throw std::invalid_argument("MapState points must be n x ambient_dim");
}

double MapState::constraint_violation() const {
    return target->distance(points).maxCoeff();
}

double TangentSection::tangency_residual() const {
    const MatrixXd normal = vectors - base.target->tangent_project(base.points, vectors);
    return normal.array().abs().maxCoeff();
}

double integrate(const VectorXd& samples, const Grid& grid) {
    return samples.sum() * grid.dx();
}

VectorXd pointwise_dot(const MatrixXd& V, const MatrixXd& W) {
    return detail::row_dots(V, W);
}

double l2_inner(const MatrixXd& V, const MatrixXd& W, const Grid& grid) {
    return (V.array() * W.array()).sum() * grid.dx();
}

double l2_norm_sq(const MatrixXd& V, const Grid& grid) {
    return V.array().square().sum() * grid.dx();
}

TangentSection velocity(const MapState& u) {
    return {u, spectral::derivative(u.points, u.grid, 1)};
}

TangentSection covariant_derivative(const TangentSection& V) {
    const MapState& u = V.base;
    const MatrixXd flat = spectral::derivative(V.vectors, u.grid, 1);
    return {u, u.target->tangent_project(u.points, flat)};
}

std::vector<TangentSection> iterated_covariant(const MapState& u, int m) {
    if (m < 0 || m > kMaxCovariantOrder)
        throw std::invalid_argument("iterated_covariant order out of range");
    std::vector<TangentSection> out;
    out.reserve(m + 1);
    out.push_back(velocity(u));
    for (int j = 0; j < m; ++j) out.push_back(covariant_derivative(out.back()));
    return out;
}

double sobolev_norm_sq(const MapState& u, int m) {
    const auto sections = iterated_covariant(u, m);
    double total = 0.0;
    for (const auto& s : sections) total += l2_norm_sq(s.vectors, u.grid);
    return total;
}

std::string to_json(const MapState& state) {
    nlohmann::json j;
    j["time"] = state.time;
    j["L"] = state.grid.length;
    j["n"] = state.grid.n;
    j["target"] = state.target->name();
    auto points = nlohmann::json::array();
    for (Eigen::Index r = 0; r < state.points.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < state.points.cols(); ++c) row.push_back(state.points(r, c));
        points.push_back(std::move(row));
    }
    j["points"] = std::move(points);
    return j.dump();
}

MapState map_state_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("snapshot JSON: ") + e.what());
    }
    try {
        const Grid grid(j.at("n").get<int>(), j.at("L").get<double>());
        auto target = make_target(j.at("target").get<std::string>());
        const auto& points = j.at("points");
        MatrixXd values(grid.n, target->ambient_dim());
        if (static_cast<int>(points.size()) != grid.n)
            throw ParseError("snapshot JSON: wrong number of point rows");
        for (int r = 0; r < grid.n; ++r) {
            const auto& row = points.at(r);
            if (static_cast<int>(row.size()) != target->ambient_dim())
                throw ParseError("snapshot JSON: wrong point dimension");
            for (int c = 0; c < target->ambient_dim(); ++c) values(r, c) = row.at(c).get<double>();
        }
        return MapState(grid, j.at("time").get<double>(), std::move(values), std::move(target));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("snapshot JSON: ") + e.what());
    }
}

}  // namespace dflow
