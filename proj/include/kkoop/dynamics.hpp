#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

/// Pendulum state: x1 is momentum (rad/s), x2 is angle (rad). Unit mass,
/// rod length and gravity, so the force is -sin(x2).
struct PendulumState {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

struct PendulumConfig {
    double x1_0 = 0.0;
    double x2_0 = 2.0;
    double h = 0.1;
    std::size_t steps = 256;

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw InvalidArgument("PendulumConfig: h must be positive");
        }
        if (steps < 1) {
            throw InvalidArgument("PendulumConfig: steps must be >= 1");
        }
        if (!std::isfinite(x1_0) || !std::isfinite(x2_0)) {
            throw InvalidArgument("PendulumConfig: initial condition must be finite");
        }
    }
};

/// One Störmer–Verlet step: half kick, drift, half kick.
inline PendulumState pendulum_step(PendulumState s, double h) {
    const double p_half = s.x1 + 0.5 * h * (-std::sin(s.x2));
    const double x2_next = s.x2 + h * p_half;
    const double x1_next = p_half + 0.5 * h * (-std::sin(x2_next));
    return {x1_next, x2_next};
}

inline double pendulum_energy(PendulumState s) {
    return 0.5 * s.x1 * s.x1 - std::cos(s.x2);
}

/// G(x) = 1.5 - sin(x2) + x1^2 / 9.
template <typename Derived>
double observable_G(const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != 2) {
        throw InvalidArgument("observable_G: expected a 2-vector, got dimension " +
                              std::to_string(x.size()));
    }
    return 1.5 - std::sin(x(1)) + x(0) * x(0) / 9.0;
}

inline TrajectoryDataset simulate(const PendulumConfig& config) {
    config.validate();
    const auto n = static_cast<Index>(config.steps);
    TrajectoryDataset data;
    data.steps.resize(config.steps);
    data.states.resize(n, 2);
    data.next_states.resize(n, 2);
    data.outputs.resize(n, 1);

    PendulumState s{config.x1_0, config.x2_0};
    for (Index k = 0; k < n; ++k) {
        const PendulumState next = pendulum_step(s, config.h);
        data.steps[static_cast<std::size_t>(k)] = static_cast<std::size_t>(k);
        data.states.row(k) << s.x1, s.x2;
        data.next_states.row(k) << next.x1, next.x2;
        data.outputs(k, 0) = observable_G(data.next_states.row(k));
        s = next;
    }
    return data;
}

}  // namespace kkoop
