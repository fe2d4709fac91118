#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"

namespace kkoop {

using Index = Eigen::Index;

/// Points in R^d, one per row. `indices` optionally carries the trajectory
/// time k of each point (empty when the set was not drawn from a trajectory).
struct PointSet {
    Eigen::MatrixXd points;
    std::vector<std::size_t> indices;

    PointSet() = default;
    explicit PointSet(Eigen::MatrixXd pts, std::vector<std::size_t> idx = {})
        : points(std::move(pts)), indices(std::move(idx)) {
        if (!indices.empty() && static_cast<Index>(indices.size()) != points.rows()) {
            throw InvalidArgument("PointSet: index count does not match point count");
        }
    }

    [[nodiscard]] Index size() const { return points.rows(); }
    [[nodiscard]] Index dim() const { return points.cols(); }
    [[nodiscard]] bool empty() const { return points.rows() == 0; }
    [[nodiscard]] bool has_indices() const { return !indices.empty(); }
    [[nodiscard]] Eigen::VectorXd point(Index i) const { return points.row(i).transpose(); }
};

/// Sequential samples (k, x_k, x_{k+1}, y_{k+1}) of an unknown map f and
/// observable G. Row r of each matrix belongs to time step steps[r].
struct TrajectoryDataset {
    std::vector<std::size_t> steps;
    Eigen::MatrixXd states;       // x_k
    Eigen::MatrixXd next_states;  // x_{k+1} = f(x_k)
    Eigen::MatrixXd outputs;      // y_{k+1} = G(x_{k+1})

    [[nodiscard]] Index size() const { return states.rows(); }
    [[nodiscard]] Index state_dim() const { return states.cols(); }
    [[nodiscard]] Index output_dim() const { return outputs.cols(); }
    [[nodiscard]] bool empty() const { return states.rows() == 0; }

    void validate() const {
        const auto n = states.rows();
        if (next_states.rows() != n || outputs.rows() != n ||
            static_cast<Index>(steps.size()) != n) {
            throw InvalidArgument("TrajectoryDataset: row counts differ between fields");
        }
        if (n > 0 && (states.cols() < 1 || next_states.cols() != states.cols() ||
                      outputs.cols() < 1)) {
            throw InvalidArgument("TrajectoryDataset: inconsistent state or output dimension");
        }
    }

    /// Row holding time step k, if present.
    [[nodiscard]] std::optional<Index> row_of(std::size_t k) const {
        // Fast path: steps are usually 0..n-1.
        if (k < steps.size() && steps[k] == k) {
            return static_cast<Index>(k);
        }
        for (std::size_t r = 0; r < steps.size(); ++r) {
            if (steps[r] == k) {
                return static_cast<Index>(r);
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] PointSet state_points() const { return PointSet(states, steps); }
    [[nodiscard]] PointSet next_state_points() const {
        std::vector<std::size_t> next(steps.size());
        for (std::size_t r = 0; r < steps.size(); ++r) {
            next[r] = steps[r] + 1;
        }
        return PointSet(next_states, std::move(next));
    }
};

}  // namespace kkoop
