#pragma once

#include <random>

#include <Eigen/Dense>

#include "kkoop/geometry.hpp"

namespace kkoop::testing {

/// n uniform points in [lo, hi]^d with pairwise distance at least min_gap.
inline Eigen::MatrixXd random_points(std::mt19937& rng, int n, int d, double lo, double hi,
                                     double min_gap = 1e-3) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd pts(n, d);
    int filled = 0;
    while (filled < n) {
        Eigen::RowVectorXd p(d);
        for (int j = 0; j < d; ++j) p(j) = u(rng);
        bool ok = true;
        for (int i = 0; i < filled && ok; ++i) ok = (pts.row(i) - p).norm() >= min_gap;
        if (ok) pts.row(filled++) = p;
    }
    return pts;
}

}  // namespace kkoop::testing

#include <cmath>
#include <numbers>
#include <vector>

#include "kkoop/mocap.hpp"

namespace kkoop::testing {

struct GaitLoop {
    double thigh = 0.45;
    double shank = 0.42;
    double period = 97.0;  // frames per stride
    Eigen::Vector3d hip{0.1, 0.15, 0.9};

    [[nodiscard]] double theta1(long t) const {
        return 0.35 * std::sin(2 * std::numbers::pi * t / period);
    }
    [[nodiscard]] double theta2(long t) const {
        return 0.6 + 0.5 * std::sin(2 * std::numbers::pi * t / period + 1.2);
    }

    /// Capture frame with forward = x, mediolateral = y, up = z.
    [[nodiscard]] MarkerFrame frame(long t) const {
        const double a = theta1(t), b = theta2(t);
        MarkerFrame f;
        f.t = t;
        f.hip = hip;
        f.knee = hip + thigh * Eigen::Vector3d(std::sin(a), 0.0, -std::cos(a));
        f.ankle = f.knee + shank * Eigen::Vector3d(std::sin(a - b), 0.0, -std::cos(a - b));
        return f;
    }

    [[nodiscard]] std::vector<MarkerFrame> frames(long n) const {
        std::vector<MarkerFrame> out;
        for (long t = 0; t < n; ++t) out.push_back(frame(t));
        return out;
    }
};

}  // namespace kkoop::testing
