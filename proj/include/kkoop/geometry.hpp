#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

/// Greedy forward thinning of an ordered candidate set. A candidate is
/// accepted iff its distance to every center accepted so far is strictly
/// greater than eta. Without a seed the first candidate is always accepted.
///
/// With a seed the seed centers come first and are kept as-is; candidates
/// already in the seed (same index) are skipped. Refining a previous result
/// with a smaller eta therefore yields nested center sets.
inline PointSet subselect_centers(const PointSet& candidates, double eta,
                                  const PointSet* seed = nullptr) {
    if (candidates.empty()) {
        throw InvalidArgument("subselect_centers: empty trajectory");
    }
    if (!(eta > 0.0)) {
        throw InvalidArgument("subselect_centers: eta must be positive");
    }
    const Index d = candidates.dim();
    if (seed != nullptr && !seed->empty() && seed->dim() != d) {
        throw InvalidArgument("subselect_centers: seed dimension mismatch");
    }

    std::vector<Index> chosen_rows;
    std::vector<Eigen::VectorXd> accepted;
    std::vector<std::size_t> accepted_idx;
    if (seed != nullptr) {
        for (Index i = 0; i < seed->size(); ++i) {
            accepted.push_back(seed->point(i));
            accepted_idx.push_back(seed->has_indices() ? seed->indices[i]
                                                       : static_cast<std::size_t>(i));
        }
    }
    const auto index_of = [&](Index r) {
        return candidates.has_indices() ? candidates.indices[r] : static_cast<std::size_t>(r);
    };

    for (Index r = 0; r < candidates.size(); ++r) {
        const std::size_t idx = index_of(r);
        if (seed != nullptr &&
            std::find(accepted_idx.begin(), accepted_idx.begin() + seed->size(), idx) !=
                accepted_idx.begin() + seed->size()) {
            continue;
        }
        bool far = true;
        for (const auto& c : accepted) {
            if (!(detail::distance(c, candidates.points.row(r)) > eta)) {
                far = false;
                break;
            }
        }
        if (far) {
            accepted.push_back(candidates.point(r));
            accepted_idx.push_back(idx);
        }
    }

    Eigen::MatrixXd pts(static_cast<Index>(accepted.size()), d);
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        pts.row(static_cast<Index>(i)) = accepted[i].transpose();
    }
    return PointSet(std::move(pts), std::move(accepted_idx));
}

inline PointSet subselect_centers(const TrajectoryDataset& trajectory, double eta,
                                  const PointSet* seed = nullptr) {
    trajectory.validate();
    if (trajectory.empty()) {
        throw InvalidArgument("subselect_centers: empty trajectory");
    }
    return subselect_centers(trajectory.state_points(), eta, seed);
}

/// max over reference points of the distance to the nearest center.
inline double fill_distance(const PointSet& centers, const PointSet& reference) {
    if (centers.empty() || reference.empty()) {
        throw InvalidArgument("fill_distance: empty input set");
    }
    if (centers.dim() != reference.dim()) {
        throw InvalidArgument("fill_distance: dimension mismatch");
    }
    double fill = 0.0;
    for (Index q = 0; q < reference.size(); ++q) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < centers.size(); ++c) {
            nearest = std::min(nearest, detail::distance(reference.points.row(q),
                                                         centers.points.row(c)));
        }
        fill = std::max(fill, nearest);
    }
    return fill;
}

inline double min_pairwise_distance(const Eigen::MatrixXd& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < pts.rows(); ++i) {
        for (Index j = i + 1; j < pts.rows(); ++j) {
            best = std::min(best, detail::distance(pts.row(i), pts.row(j)));
        }
    }
    return best;
}

/// Half the minimum pairwise distance.
inline double separation(const PointSet& centers) {
    if (centers.size() < 2) {
        throw DegenerateInput("separation: need at least 2 centers, got " +
                              std::to_string(centers.size()));
    }
    const double m = min_pairwise_distance(centers.points);
    if (!(m > 0.0)) {
        throw DegenerateInput("separation: duplicate centers");
    }
    return 0.5 * m;
}

/// Throws DegenerateInput naming the first duplicated pair.
inline void require_distinct(const Eigen::MatrixXd& pts, const char* what) {
    for (Index i = 0; i < pts.rows(); ++i) {
        for (Index j = i + 1; j < pts.rows(); ++j) {
            if (pts.row(i) == pts.row(j)) {
                throw DegenerateInput(std::string(what) + ": points " + std::to_string(i) +
                                      " and " + std::to_string(j) + " coincide");
            }
        }
    }
}

}  // namespace kkoop
