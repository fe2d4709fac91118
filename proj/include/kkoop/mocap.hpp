#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/geometry.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/koopman.hpp"
#include "kkoop/linsys.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

/// Hip, knee and ankle markers of one capture frame, in meters.
struct MarkerFrame {
    long t = 0;
    Eigen::Vector3d hip = Eigen::Vector3d::Zero();
    Eigen::Vector3d knee = Eigen::Vector3d::Zero();
    Eigen::Vector3d ankle = Eigen::Vector3d::Zero();

    [[nodiscard]] bool finite() const {
        return hip.allFinite() && knee.allFinite() && ankle.allFinite();
    }
};

/// Markers in the sagittal plane, coordinates (forward, up).
struct PlanarFrame {
    long t = 0;
    Eigen::Vector2d hip = Eigen::Vector2d::Zero();
    Eigen::Vector2d knee = Eigen::Vector2d::Zero();
    Eigen::Vector2d ankle = Eigen::Vector2d::Zero();
};

/// theta1: hip flexion, signed angle from the body-down axis to the thigh,
/// positive when the knee is forward of the hip, in (-pi, pi].
/// theta2: knee flexion, interior angle between thigh and shank, in [0, pi].
/// y1, y2: ankle relative to the hip, vertical (up positive) and forward.
struct JointAngleSample {
    long t = 0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
};

enum class Axis { X = 0, Y = 1, Z = 2 };

inline Axis parse_axis(std::string_view s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw InvalidArgument("unknown axis '" + std::string(s) + "' (expected x, y or z)");
}

inline char to_char(Axis a) { return "xyz"[static_cast<int>(a)]; }

struct SagittalAxes {
    Axis forward = Axis::X;
    Axis up = Axis::Z;
};

inline PlanarFrame project_sagittal(const MarkerFrame& frame, SagittalAxes axes = {}) {
    if (axes.forward == axes.up) {
        throw InvalidArgument("project_sagittal: forward and up axes must differ");
    }
    const auto fwd = static_cast<int>(axes.forward);
    const auto up = static_cast<int>(axes.up);
    const auto proj = [&](const Eigen::Vector3d& v) { return Eigen::Vector2d(v(fwd), v(up)); };
    return {frame.t, proj(frame.hip), proj(frame.knee), proj(frame.ankle)};
}

inline JointAngleSample joint_angles(const PlanarFrame& f) {
    const Eigen::Vector2d thigh = f.knee - f.hip;
    const Eigen::Vector2d shank = f.ankle - f.knee;
    if (!(thigh.norm() > 0.0) || !(shank.norm() > 0.0)) {
        throw DegenerateInput("joint_angles: zero-length limb segment at frame " +
                              std::to_string(f.t));
    }
    // Body-down reference (0, -1); cross and dot against it reduce to
    // thigh.x and -thigh.y.
    double theta1 = std::atan2(thigh.x(), -thigh.y());
    if (theta1 <= -std::numbers::pi) {
        theta1 = std::numbers::pi;
    }
    const double cross = thigh.x() * shank.y() - thigh.y() * shank.x();
    const double theta2 = std::atan2(std::abs(cross), thigh.dot(shank));
    const Eigen::Vector2d ankle_rel = f.ankle - f.hip;
    return {f.t, theta1, theta2, ankle_rel.y(), ankle_rel.x()};
}

struct KinematicsFit {
    KoopmanEstimate g1;  // (theta1, theta2) -> y1
    KoopmanEstimate g2;  // (theta1, theta2) -> y2
    PointSet centers;
    TrajectoryDataset dataset;
    double fill = 0.0;        // centers over all sampled angle states
    double separation = 0.0;
    double cond = 1.0;
    bool regularized = false;
};

/// Consecutive samples (t, t+1) become records with state (theta1, theta2)
/// and output (y1, y2) at the later frame. Pairs across a gap in t are dropped.
inline TrajectoryDataset kinematics_dataset(const std::vector<JointAngleSample>& samples) {
    std::vector<Index> pairs;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        if (samples[i + 1].t == samples[i].t + 1) {
            pairs.push_back(static_cast<Index>(i));
        }
    }
    TrajectoryDataset data;
    const auto n = static_cast<Index>(pairs.size());
    data.states.resize(n, 2);
    data.next_states.resize(n, 2);
    data.outputs.resize(n, 2);
    for (Index r = 0; r < n; ++r) {
        const auto& a = samples[static_cast<std::size_t>(pairs[r])];
        const auto& b = samples[static_cast<std::size_t>(pairs[r]) + 1];
        data.steps.push_back(static_cast<std::size_t>(a.t));
        data.states.row(r) << a.theta1, a.theta2;
        data.next_states.row(r) << b.theta1, b.theta2;
        data.outputs.row(r) << b.y1, b.y2;
    }
    return data;
}

inline KinematicsFit fit_kinematics(const std::vector<JointAngleSample>& samples, double eta,
                                    const KernelSpec& kernel,
                                    JitterPolicy jitter = JitterPolicy::automatic()) {
    for (const auto& s : samples) {
        if (s.t < 0) {
            throw InvalidArgument("fit_kinematics: negative frame index");
        }
    }
    KinematicsFit fit;
    fit.dataset = kinematics_dataset(samples);
    if (fit.dataset.empty()) {
        throw DegenerateInput("fit_kinematics: no consecutive frame pairs");
    }
    fit.centers = subselect_centers(fit.dataset, eta);
    if (fit.centers.size() < 2) {
        throw DegenerateInput("fit_kinematics: only " + std::to_string(fit.centers.size()) +
                              " center(s) survive subselection with eta = " +
                              format_double(eta) + "; need at least 2");
    }
    const KoopmanEstimate both = fit_pullback(fit.dataset, fit.centers, kernel, jitter);
    fit.g1 = both;
    fit.g1.alpha = both.alpha.col(0);
    fit.g2 = both;
    fit.g2.alpha = both.alpha.col(1);
    fit.fill = fill_distance(fit.centers, fit.dataset.state_points());
    fit.separation = separation(fit.centers);
    fit.cond = both.diagnostics.condition_number;
    fit.regularized = both.diagnostics.regularized();
    return fit;
}

}  // namespace kkoop
