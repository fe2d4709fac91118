#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/geometry.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/koopman.hpp"
#include "kkoop/linsys.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown after all workers
/// join.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Least-squares slope of log(y) against log(x) over entries with x, y > 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw InvalidArgument("loglog_slope: size mismatch");
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) {
        throw DegenerateInput("loglog_slope: need at least 2 positive points");
    }
    const auto n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (!(sxx > 0.0)) {
        throw DegenerateInput("loglog_slope: all abscissae coincide");
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Surface grids

struct Grid2D {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    Index nx = 60, ny = 60;

    [[nodiscard]] double x(Index i) const {
        return nx == 1 ? x_min : x_min + (x_max - x_min) * static_cast<double>(i) / (nx - 1);
    }
    [[nodiscard]] double y(Index j) const {
        return ny == 1 ? y_min : y_min + (y_max - y_min) * static_cast<double>(j) / (ny - 1);
    }

    /// Row-major query points, x varying slowest.
    [[nodiscard]] Eigen::MatrixXd points() const {
        Eigen::MatrixXd q(nx * ny, 2);
        for (Index i = 0; i < nx; ++i) {
            for (Index j = 0; j < ny; ++j) {
                q.row(i * ny + j) << x(i), y(j);
            }
        }
        return q;
    }
};

/// Bounding box of 2-D points, each side padded by `pad` times its extent.
inline Grid2D padded_grid(const Eigen::MatrixXd& pts, Index nx, Index ny, double pad = 0.1) {
    if (pts.rows() == 0 || pts.cols() != 2) {
        throw InvalidArgument("padded_grid: need nonempty 2-D points");
    }
    if (nx < 1 || ny < 1) {
        throw InvalidArgument("padded_grid: grid size must be positive");
    }
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    const Eigen::Vector2d lo = pts.colwise().minCoeff();
    const Eigen::Vector2d hi = pts.colwise().maxCoeff();
    const Eigen::Vector2d span = hi - lo;
    g.x_min = lo(0) - pad * span(0);
    g.x_max = hi(0) + pad * span(0);
    g.y_min = lo(1) - pad * span(1);
    g.y_max = hi(1) + pad * span(1);
    return g;
}

// ---------------------------------------------------------------------------
// Convergence: error of the pullback interpolant vs fill distance

struct ConvergenceRow {
    double target = 0.0;  // subselection gate eta
    Index centers = 0;
    double fill = 0.0;       // centers over all trajectory states
    double sup_error = 0.0;  // max |prediction - y_next| over all advanced states
    double cond = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> warnings;
    double slope = std::numeric_limits<double>::quiet_NaN();
};

/// For each target (strictly decreasing), refine the previous center set
/// with gate eta = target, so the sets are nested and the fill distance
/// over the trajectory states is at most the target.
inline ConvergenceResult convergence_study(const TrajectoryDataset& data, const KernelSpec& kernel,
                                           const std::vector<double>& targets) {
    data.validate();
    if (targets.empty()) {
        throw InvalidArgument("convergence_study: empty fill schedule");
    }
    ConvergenceResult out;
    const PointSet states = data.state_points();
    PointSet current;
    double last = std::numeric_limits<double>::infinity();
    for (const double target : targets) {
        if (!(target > 0.0) || !(target < last)) {
            out.warnings.push_back("fill target " + format_double(target) +
                                   " is not positive and strictly decreasing; skipped");
            continue;
        }
        PointSet centers = current.empty() ? subselect_centers(states, target)
                                           : subselect_centers(states, target, &current);
        const double fill = fill_distance(centers, states);
        if (fill > target) {
            out.warnings.push_back("fill target " + format_double(target) +
                                   " not achievable (got " + format_double(fill) + "); skipped");
            continue;
        }
        KoopmanEstimate est;
        try {
            est = fit_pullback(data, centers, kernel);
        } catch (const Error& e) {
            out.warnings.push_back("fill target " + format_double(target) + ": " + e.what() +
                                   "; skipped");
            continue;
        }
        const Eigen::MatrixXd pred = predict_many(est, data.next_states);
        ConvergenceRow row;
        row.target = target;
        row.centers = centers.size();
        row.fill = fill;
        row.sup_error = (pred - data.outputs).cwiseAbs().maxCoeff();
        row.cond = est.diagnostics.condition_number;
        out.rows.push_back(row);
        current = std::move(centers);
        last = target;
    }
    std::vector<double> h, e;
    for (const auto& r : out.rows) {
        h.push_back(r.fill);
        e.push_back(r.sup_error);
    }
    try {
        out.slope = loglog_slope(h, e);
    } catch (const DegenerateInput& ex) {
        out.warnings.push_back(std::string("slope: ") + ex.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conditioning of K(Xi, Xi) vs quasi-uniform spacing

struct ConditioningRow {
    std::size_t kernel_index = 0;
    KernelSpec kernel;
    double spacing = 0.0;
    Index centers = 0;
    double separation = 0.0;
    double cond = 0.0;
    double lambda_min = 0.0;
};

/// Rows ordered by (kernel, spacing) in schedule order regardless of threads.
inline std::vector<ConditioningRow> conditioning_study(const PointSet& states,
                                                       const std::vector<KernelSpec>& kernels,
                                                       const std::vector<double>& spacings,
                                                       unsigned threads = 1) {
    if (kernels.empty() || spacings.empty()) {
        throw InvalidArgument("conditioning_study: empty kernel list or spacing schedule");
    }
    for (const auto& k : kernels) k.validate();
    std::vector<PointSet> center_sets(spacings.size());
    parallel_for(spacings.size(), threads, [&](std::size_t s) {
        center_sets[s] = subselect_centers(states, spacings[s]);
    });
    std::vector<ConditioningRow> rows(kernels.size() * spacings.size());
    parallel_for(rows.size(), threads, [&](std::size_t cell) {
        const std::size_t ki = cell / spacings.size();
        const std::size_t si = cell % spacings.size();
        const PointSet& centers = center_sets[si];
        const auto diag = spectral_diagnostics(kernel_matrix(kernels[ki], centers, centers));
        ConditioningRow& r = rows[cell];
        r.kernel_index = ki;
        r.kernel = kernels[ki];
        r.spacing = spacings[si];
        r.centers = centers.size();
        r.separation = centers.size() >= 2 ? separation(centers) : 0.0;
        r.cond = diag.cond;
        r.lambda_min = diag.lambda_min;
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Minimum eigenvalue vs one shrinking pair distance at fixed fill

struct MinEigRow {
    double base_eta = 0.0;
    Index centers = 0;  // base set size, before the extra center
    double base_fill = 0.0;
    double fill = 0.0;  // with the extra center
    double base_lambda_min = 0.0;
    double delta = 0.0;
    double lambda_min = 0.0;
};

/// Unit vector from the first trajectory state toward the second; the extra
/// center is placed along it at distance delta from the first center.
inline Eigen::VectorXd trajectory_direction(const PointSet& states) {
    if (states.size() < 2) {
        throw DegenerateInput("trajectory_direction: need at least 2 states");
    }
    Eigen::VectorXd u = states.point(1) - states.point(0);
    const double n = u.norm();
    if (!(n > 0.0)) {
        throw DegenerateInput("trajectory_direction: first two states coincide");
    }
    return u / n;
}

inline std::vector<MinEigRow> mineig_study(const PointSet& states, const KernelSpec& kernel,
                                           const std::vector<double>& base_etas,
                                           const std::vector<double>& deltas,
                                           unsigned threads = 1) {
    kernel.validate();
    if (base_etas.empty() || deltas.empty()) {
        throw InvalidArgument("mineig_study: empty schedule");
    }
    for (double d : deltas) {
        if (!(d > 0.0)) {
            throw DegenerateInput("mineig_study: pair distance " + format_double(d) +
                                  " would duplicate a center");
        }
    }
    const Eigen::VectorXd u = trajectory_direction(states);
    std::vector<MinEigRow> rows(base_etas.size() * deltas.size());
    parallel_for(base_etas.size(), threads, [&](std::size_t b) {
        const PointSet base = subselect_centers(states, base_etas[b]);
        const double base_fill = fill_distance(base, states);
        const double base_lmin =
            spectral_diagnostics(kernel_matrix(kernel, base, base)).lambda_min;
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            Eigen::MatrixXd pts(base.size() + 1, base.dim());
            pts.topRows(base.size()) = base.points;
            pts.row(base.size()) = (base.point(0) + deltas[di] * u).transpose();
            const PointSet augmented(std::move(pts));
            MinEigRow& r = rows[b * deltas.size() + di];
            r.base_eta = base_etas[b];
            r.centers = base.size();
            r.base_fill = base_fill;
            r.fill = fill_distance(augmented, states);
            r.base_lambda_min = base_lmin;
            r.delta = deltas[di];
            r.lambda_min =
                spectral_diagnostics(kernel_matrix(kernel, augmented, augmented)).lambda_min;
        }
    });
    return rows;
}

}  // namespace kkoop
