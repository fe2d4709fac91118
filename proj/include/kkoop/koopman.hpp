#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/geometry.hpp"
#include "kkoop/kernels.hpp"
#include "kkoop/linsys.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

enum class EstimateMode {
    PullbackInterpolant,  // function of the advanced state z = f(x)
    ProjectedUMf,         // function of the current state x
};

inline std::string_view to_string(EstimateMode m) {
    return m == EstimateMode::PullbackInterpolant ? "PullbackInterpolant" : "ProjectedUMf";
}

inline EstimateMode parse_estimate_mode(std::string_view s) {
    if (s == "PullbackInterpolant") return EstimateMode::PullbackInterpolant;
    if (s == "ProjectedUMf") return EstimateMode::ProjectedUMf;
    throw InvalidArgument("unknown estimate mode '" + std::string(s) + "'");
}

/// A fitted kernel expansion sum_i alpha_i K(c_i, .), one column of alpha
/// per output component. The expansion centers c_i are the advanced centers
/// in pullback mode and the centers themselves in projected mode.
struct KoopmanEstimate {
    EstimateMode mode = EstimateMode::PullbackInterpolant;
    PointSet centers;
    PointSet advanced_centers;
    Eigen::MatrixXd alpha;
    KernelSpec kernel;
    SolveReport diagnostics;

    [[nodiscard]] Index size() const { return alpha.rows(); }
    [[nodiscard]] Index output_dim() const { return alpha.cols(); }

    [[nodiscard]] const Eigen::MatrixXd& expansion_points() const {
        return mode == EstimateMode::PullbackInterpolant ? advanced_centers.points
                                                         : centers.points;
    }
};

namespace detail {

inline Eigen::MatrixXd rows_at(const Eigen::MatrixXd& m, const std::vector<Index>& rows) {
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = m.row(rows[i]);
    }
    return out;
}

inline std::vector<Index> center_rows(const TrajectoryDataset& data, const PointSet& centers) {
    if (!centers.has_indices()) {
        throw InvalidArgument("centers carry no trajectory indices");
    }
    std::vector<Index> rows;
    rows.reserve(centers.indices.size());
    for (const auto k : centers.indices) {
        const auto r = data.row_of(k);
        if (!r) {
            throw InvalidArgument("center index " + std::to_string(k) +
                                  " is not a step of the dataset");
        }
        rows.push_back(*r);
    }
    return rows;
}

}  // namespace detail

/// Empirical risk minimizer over span{K(f(xi_i), .)}: interpolates the
/// outputs y_{k_i+1} at the advanced centers f(xi_i).
inline KoopmanEstimate fit_pullback(const TrajectoryDataset& data, const PointSet& centers,
                                    const KernelSpec& kernel,
                                    JitterPolicy jitter = JitterPolicy::none()) {
    data.validate();
    kernel.validate();
    if (centers.empty()) {
        throw InvalidArgument("fit_pullback: no centers");
    }
    if (centers.dim() != data.state_dim()) {
        throw InvalidArgument("fit_pullback: center dimension mismatch");
    }
    const auto rows = detail::center_rows(data, centers);
    KoopmanEstimate est;
    est.mode = EstimateMode::PullbackInterpolant;
    est.kernel = kernel;
    est.centers = centers;
    est.advanced_centers = PointSet(detail::rows_at(data.next_states, rows), [&] {
        std::vector<std::size_t> next;
        for (auto k : centers.indices) next.push_back(k + 1);
        return next;
    }());
    require_distinct(est.advanced_centers.points, "fit_pullback: advanced centers");

    const Eigen::MatrixXd k = kernel_matrix(kernel, est.advanced_centers, est.advanced_centers);
    est.diagnostics = solve_spd(k, detail::rows_at(data.outputs, rows), jitter);
    est.alpha = est.diagnostics.coefficients;
    return est;
}

/// Data-driven approximation Pi_M((Pi_M g) o f) with g known at the centers:
/// alpha = K^{-1} C^T K^{-1} g(Xi), K = K(Xi, Xi), C = K(Xi, f(Xi)).
inline KoopmanEstimate fit_umf(const PointSet& centers, const PointSet& advanced_centers,
                               const KernelSpec& kernel, const Eigen::MatrixXd& g_at_centers,
                               JitterPolicy jitter = JitterPolicy::none()) {
    kernel.validate();
    if (centers.empty()) {
        throw InvalidArgument("fit_umf: no centers");
    }
    if (advanced_centers.size() != centers.size() || advanced_centers.dim() != centers.dim()) {
        throw InvalidArgument("fit_umf: centers and advanced centers differ in shape");
    }
    if (g_at_centers.rows() != centers.size() || g_at_centers.cols() < 1) {
        throw InvalidArgument("fit_umf: g must have one row per center");
    }
    require_distinct(centers.points, "fit_umf: centers");

    const Eigen::MatrixXd k = kernel_matrix(kernel, centers, centers);
    const Eigen::MatrixXd c = kernel_matrix(kernel, centers.points, advanced_centers.points);
    const SolveReport inner = solve_spd(k, g_at_centers, jitter);
    SolveReport outer = solve_spd(k, c.transpose() * inner.coefficients, jitter);

    KoopmanEstimate est;
    est.mode = EstimateMode::ProjectedUMf;
    est.kernel = kernel;
    est.centers = centers;
    est.advanced_centers = advanced_centers;
    est.alpha = outer.coefficients;
    est.diagnostics = std::move(outer);
    return est;
}

inline KoopmanEstimate fit_umf(const TrajectoryDataset& data, const PointSet& centers,
                               const KernelSpec& kernel, const Eigen::MatrixXd& g_at_centers,
                               JitterPolicy jitter = JitterPolicy::none()) {
    data.validate();
    const auto rows = detail::center_rows(data, centers);
    std::vector<std::size_t> next;
    for (auto k : centers.indices) next.push_back(k + 1);
    return fit_umf(centers, PointSet(detail::rows_at(data.next_states, rows), std::move(next)),
                   kernel, g_at_centers, jitter);
}

/// g = G use case: G(x_k) is read from the previous record's y_{k}. A center
/// at the first step has no observed G value and is rejected.
inline KoopmanEstimate fit_umf(const TrajectoryDataset& data, const PointSet& centers,
                               const KernelSpec& kernel,
                               JitterPolicy jitter = JitterPolicy::none()) {
    data.validate();
    Eigen::MatrixXd g(centers.size(), data.output_dim());
    for (Index i = 0; i < centers.size(); ++i) {
        const std::size_t k = centers.has_indices() ? centers.indices[i] : 0;
        const auto prev = k > 0 ? data.row_of(k - 1) : std::nullopt;
        if (!prev) {
            throw InvalidArgument("fit_umf: output at step " + std::to_string(k) +
                                  " was not observed; pass g_at_centers explicitly");
        }
        g.row(i) = data.outputs.row(*prev);
    }
    return fit_umf(data, centers, kernel, g, jitter);
}

template <typename Derived>
Eigen::VectorXd predict(const KoopmanEstimate& est, const Eigen::MatrixBase<Derived>& x) {
    const Eigen::VectorXd psi = kernel_sections(est.kernel, est.expansion_points(), x);
    return est.alpha.transpose() * psi;
}

/// Row-per-query batch form of predict.
inline Eigen::MatrixXd predict_many(const KoopmanEstimate& est, const Eigen::MatrixXd& queries) {
    if (queries.cols() != est.expansion_points().cols()) {
        throw InvalidArgument("predict: query dimension mismatch");
    }
    return kernel_matrix(est.kernel, queries, est.expansion_points()) * est.alpha;
}

/// (1/M) sum ||truth_i - predicted_i||^2, one row per sample.
inline double empirical_risk(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& predicted) {
    if (truth.rows() == 0) {
        throw InvalidArgument("empirical_risk: empty sample list");
    }
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
        throw InvalidArgument("empirical_risk: shape mismatch");
    }
    return (truth - predicted).rowwise().squaredNorm().sum() / static_cast<double>(truth.rows());
}

// ---------------------------------------------------------------------------
// EDMD

struct EdmdOperator {
    Eigen::MatrixXd a;
    PointSet basis_centers;  // empty when the basis is not kernel sections
    KernelSpec kernel;
    Index rank = 0;
    bool rank_deficient = false;
    double residual = 0.0;  // ||A Psi(X) - Psi(X+)||_F
};

/// A = argmin ||A Psi(X) - Psi(X+)||_F, the minimum-norm least-squares
/// solution A^T = pinv(Psi(X)^T) Psi(X+)^T via complete orthogonal
/// decomposition.
inline EdmdOperator edmd_fit(const Eigen::MatrixXd& psi_x, const Eigen::MatrixXd& psi_xplus) {
    if (psi_x.size() == 0) {
        throw InvalidArgument("edmd_fit: empty data matrix");
    }
    if (psi_x.rows() != psi_xplus.rows() || psi_x.cols() != psi_xplus.cols()) {
        throw InvalidArgument("edmd_fit: Psi(X) and Psi(X+) differ in shape");
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(psi_x.transpose());
    EdmdOperator op;
    op.a = cod.solve(psi_xplus.transpose()).transpose();
    op.rank = cod.rank();
    op.rank_deficient = op.rank < psi_x.rows();
    op.residual = (op.a * psi_x - psi_xplus).norm();
    return op;
}

/// EDMD with the kernel-section basis psi = (K(xi_1, .), ..., K(xi_M, .)):
/// Psi(X) = K(Xi, Xi), Psi(X+) = K(Xi, f(Xi)).
inline EdmdOperator edmd_fit_kernel_basis(const PointSet& centers,
                                          const PointSet& advanced_centers,
                                          const KernelSpec& kernel) {
    kernel.validate();
    if (centers.size() != advanced_centers.size() || centers.dim() != advanced_centers.dim()) {
        throw InvalidArgument("edmd_fit_kernel_basis: centers and advanced centers differ");
    }
    auto op = edmd_fit(kernel_matrix(kernel, centers, centers),
                       kernel_matrix(kernel, centers.points, advanced_centers.points));
    op.basis_centers = centers;
    op.kernel = kernel;
    return op;
}

/// g_coeffs^T A psi, with psi the basis evaluated at the query point.
inline double edmd_apply_psi(const EdmdOperator& op, const Eigen::VectorXd& g_coeffs,
                             const Eigen::VectorXd& psi) {
    if (g_coeffs.size() != op.a.rows() || psi.size() != op.a.cols()) {
        throw InvalidArgument("edmd_apply: dimension mismatch");
    }
    return g_coeffs.dot(op.a * psi);
}

/// g_coeffs^T A psi(x) for a kernel-section operator.
template <typename Derived>
double edmd_apply(const EdmdOperator& op, const Eigen::VectorXd& g_coeffs,
                  const Eigen::MatrixBase<Derived>& x) {
    if (op.basis_centers.empty()) {
        throw InvalidArgument("edmd_apply: operator has no kernel-section basis");
    }
    return edmd_apply_psi(op, g_coeffs, kernel_sections(op.kernel, op.basis_centers.points, x));
}

/// Coefficients of g in the kernel-section basis from its values at the
/// basis centers (kernel interpolation).
inline Eigen::MatrixXd edmd_coefficients(const EdmdOperator& op, const Eigen::MatrixXd& g_at_centers,
                                         JitterPolicy jitter = JitterPolicy::none()) {
    if (op.basis_centers.empty()) {
        throw InvalidArgument("edmd_coefficients: operator has no kernel-section basis");
    }
    return solve_spd(kernel_matrix(op.kernel, op.basis_centers, op.basis_centers), g_at_centers,
                     jitter)
        .coefficients;
}

}  // namespace kkoop
