#pragma once

#include <cmath>
#include <vector>

#include "kkoop/errors.hpp"
#include "kkoop/kernels.hpp"

// Defaults for reproducing the pendulum and motion-capture studies. The
// step size, initial condition and gate eta are not published with the
// original experiments; the values below reproduce its 37-center count on
// the 256-step orbit (any eta in [0.229, 0.2355] does).
namespace kkoop::defaults {

inline constexpr double pendulum_eta = 0.232;
inline constexpr std::size_t pendulum_expected_centers = 37;

inline constexpr double mocap_eta = 0.5;
inline constexpr double mocap_beta = 2.0;

inline constexpr int grid_size = 60;

/// n points from `first` to `last`, equally spaced in log scale.
inline std::vector<double> geometric_schedule(double first, double last, int n) {
    if (!(first > 0.0) || !(last > 0.0) || n < 1) {
        throw InvalidArgument("geometric_schedule: endpoints must be positive and n >= 1");
    }
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(first * std::pow(last / first, t));
    }
    return out;
}

inline std::vector<double> convergence_targets() {
    return {0.5, 0.35, 0.25, 0.18, 0.12, 0.08};
}

/// Spans M = 2 (widest) up to M <= 64 on the default orbit.
inline std::vector<double> conditioning_spacings() { return geometric_schedule(3.6, 0.14, 15); }

inline std::vector<double> mineig_base_etas() { return {1.2, 0.6, 0.35, pendulum_eta}; }

inline std::vector<double> mineig_deltas() { return geometric_schedule(0.1, 0.001, 10); }

inline std::vector<KernelSpec> wendland_family() {
    std::vector<KernelSpec> out;
    for (auto f : {KernelFamily::WendlandC2, KernelFamily::WendlandC4, KernelFamily::WendlandC6}) {
        KernelSpec k;
        k.family = f;
        out.push_back(k);
    }
    return out;
}

inline std::vector<KernelSpec> matern_beta_sweep() {
    std::vector<KernelSpec> out;
    for (double b : {0.2, 0.5, 1.0, 5.0}) {
        KernelSpec k;
        k.beta = b;
        out.push_back(k);
    }
    return out;
}

}  // namespace kkoop::defaults
