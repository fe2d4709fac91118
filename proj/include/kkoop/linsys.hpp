#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "kkoop/errors.hpp"
#include "kkoop/format.hpp"
#include "kkoop/types.hpp"

namespace kkoop {

struct JitterPolicy {
    enum class Kind { None, Fixed, Auto };
    Kind kind = Kind::None;
    double lambda = 0.0;  // used by Fixed only

    static JitterPolicy none() { return {}; }
    static JitterPolicy fixed(double lambda) { return {Kind::Fixed, lambda}; }
    static JitterPolicy automatic() { return {Kind::Auto, 0.0}; }
};

struct SpectralDiagnostics {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double cond = 1.0;  // +inf when lambda_min <= 0
};

/// Solution of (K + jitter I) alpha = rhs plus diagnostics of the matrix
/// that was actually factorized.
struct SolveReport {
    Eigen::MatrixXd coefficients;
    double condition_number = 1.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double jitter_used = 0.0;

    [[nodiscard]] bool regularized() const { return jitter_used > 0.0; }
};

inline void require_symmetric(const Eigen::MatrixXd& k, const char* what) {
    if (k.rows() != k.cols()) {
        throw InvalidArgument(std::string(what) + ": matrix is not square");
    }
    const double scale = k.cwiseAbs().maxCoeff();
    const double asym = (k - k.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        throw InvalidArgument(std::string(what) + ": matrix is not symmetric (max |K - K^T| = " +
                              format_double(asym) + ")");
    }
}

inline SpectralDiagnostics spectral_diagnostics(const Eigen::MatrixXd& k) {
    require_symmetric(k, "spectral_diagnostics");
    if (k.rows() == 0) {
        throw InvalidArgument("spectral_diagnostics: empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NotPositiveDefinite("spectral_diagnostics: eigensolver did not converge");
    }
    SpectralDiagnostics out;
    out.lambda_min = eig.eigenvalues()(0);
    out.lambda_max = eig.eigenvalues()(k.rows() - 1);
    out.cond = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min
                                    : std::numeric_limits<double>::infinity();
    return out;
}

/// Solves (K + lambda I) alpha = rhs by Cholesky. Auto jitter starts at 0
/// and escalates through {1e-12, 1e-10, 1e-8} * trace(K)/M on failure.
inline SolveReport solve_spd(const Eigen::MatrixXd& k, const Eigen::MatrixXd& rhs,
                             JitterPolicy policy = JitterPolicy::none()) {
    require_symmetric(k, "solve_spd");
    const Index m = k.rows();
    if (m == 0) {
        throw InvalidArgument("solve_spd: empty system");
    }
    if (rhs.rows() != m) {
        throw InvalidArgument("solve_spd: rhs has " + std::to_string(rhs.rows()) +
                              " rows, expected " + std::to_string(m));
    }

    std::vector<double> ladder;
    switch (policy.kind) {
        case JitterPolicy::Kind::None:
            ladder = {0.0};
            break;
        case JitterPolicy::Kind::Fixed:
            if (!(policy.lambda >= 0.0)) {
                throw InvalidArgument("solve_spd: jitter must be nonnegative");
            }
            ladder = {policy.lambda};
            break;
        case JitterPolicy::Kind::Auto: {
            const double unit = k.trace() / static_cast<double>(m);
            ladder = {0.0, 1e-12 * unit, 1e-10 * unit, 1e-8 * unit};
            break;
        }
    }

    for (const double lambda : ladder) {
        Eigen::MatrixXd shifted = k;
        shifted.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        const auto spec = spectral_diagnostics(shifted);
        // A Cholesky that squeaks through on a numerically indefinite matrix
        // is treated as a failure so the ladder can continue.
        if (!(spec.lambda_min > 0.0)) {
            continue;
        }
        SolveReport report;
        report.coefficients = llt.solve(rhs);
        report.condition_number = spec.cond;
        report.min_eigenvalue = spec.lambda_min;
        report.max_eigenvalue = spec.lambda_max;
        report.jitter_used = lambda;
        return report;
    }
    throw NotPositiveDefinite("solve_spd: factorization failed (M = " + std::to_string(m) +
                              ", last jitter " + format_double(ladder.back()) + ")");
}

}  // namespace kkoop
