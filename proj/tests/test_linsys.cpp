#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kkoop/kernels.hpp"
#include "kkoop/linsys.hpp"
#include "test_support.hpp"

using namespace kkoop;

namespace {

double matern_unit() { return (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0)); }

Eigen::Matrix2d two_center_matrix() {
    const double k = matern_unit();
    Eigen::Matrix2d m;
    m << 1, k, k, 1;
    return m;
}

}  // namespace

TEST(SolveSpd, IdentitySystem) {
    const Eigen::MatrixXd b = Eigen::Vector3d(1.0, -2.0, 0.5);
    const auto r = solve_spd(Eigen::MatrixXd::Identity(3, 3), b);
    EXPECT_EQ(r.coefficients, b);
    EXPECT_DOUBLE_EQ(r.condition_number, 1.0);
    EXPECT_FALSE(r.regularized());
}

TEST(SolveSpd, TwoByTwoClosedFormOracle) {
    const double k = matern_unit();
    // [[1,k],[k,1]]^{-1} [1,0]^T = [1, -k] / (1 - k^2)
    const double det = 1.0 - k * k;
    const auto r = solve_spd(two_center_matrix(), Eigen::Vector2d(1.0, 0.0));
    EXPECT_NEAR(r.coefficients(0), 1.0 / det, 1e-14);
    EXPECT_NEAR(r.coefficients(1), -k / det, 1e-14);
    EXPECT_NEAR(r.coefficients(0), 1.3049, 1e-4);
    EXPECT_NEAR(r.coefficients(1), -0.6307, 1e-4);
}

TEST(SolveSpd, DiagonalConditionNumber) {
    Eigen::Matrix2d k;
    k << 2, 0, 0, 1;
    EXPECT_DOUBLE_EQ(solve_spd(k, Eigen::Vector2d(1, 1)).condition_number, 2.0);
}

TEST(SolveSpd, RejectsNonSymmetricAndShapeErrors) {
    Eigen::Matrix2d k;
    k << 1, 0.5, 0.4, 1;
    EXPECT_THROW(solve_spd(k, Eigen::Vector2d(1, 1)), InvalidArgument);
    EXPECT_THROW(solve_spd(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(1, 1, 1)),
                 InvalidArgument);
    EXPECT_THROW(solve_spd(Eigen::MatrixXd::Identity(2, 3), Eigen::Vector2d(1, 1)),
                 InvalidArgument);
}

TEST(SolveSpd, SingularMatrixWithoutJitterFails) {
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
    EXPECT_THROW(solve_spd(ones, Eigen::Vector3d(1, 2, 3)), NotPositiveDefinite);
}

TEST(SolveSpd, AutoJitterRecoversAndIsFlagged) {
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
    const auto r = solve_spd(ones, Eigen::Vector3d(1, 1, 1), JitterPolicy::automatic());
    EXPECT_TRUE(r.regularized());
    EXPECT_GT(r.jitter_used, 0.0);
    EXPECT_LE(r.jitter_used, 1e-8);
    EXPECT_GE(r.condition_number, 1.0);
}

TEST(SolveSpd, IndefiniteFailsEvenWithAutoJitter) {
    Eigen::Matrix2d k;
    k << 1, 2, 2, 1;
    EXPECT_THROW(solve_spd(k, Eigen::Vector2d(1, 1), JitterPolicy::automatic()),
                 NotPositiveDefinite);
}

TEST(SolveSpd, FixedJitterSolvesShiftedSystem) {
    const auto r = solve_spd(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(2, 4),
                             JitterPolicy::fixed(1.0));
    EXPECT_NEAR(r.coefficients(0), 1.0, 1e-15);
    EXPECT_NEAR(r.coefficients(1), 2.0, 1e-15);
    EXPECT_EQ(r.jitter_used, 1.0);
}

// Residual bound on random well-conditioned kernel systems.
TEST(SolveSpd, ResidualSmallForWellConditionedKernels) {
    std::mt19937 rng(17);
    KernelSpec spec;
    spec.beta = 0.3;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd p = kkoop::testing::random_points(rng, 25, 2, -2, 2, 0.1);
        const Eigen::MatrixXd k = kernel_matrix(spec, p, p);
        const Eigen::MatrixXd rhs = Eigen::MatrixXd::Random(25, 3);
        const auto r = solve_spd(k, rhs);
        ASSERT_LT(r.condition_number, 1e8);
        const double resid = (k * r.coefficients - rhs).cwiseAbs().maxCoeff();
        EXPECT_LE(resid, 1e-8 * rhs.cwiseAbs().maxCoeff());
    }
}

TEST(Spectral, IdentityAndDiagonal) {
    const auto id = spectral_diagnostics(Eigen::MatrixXd::Identity(4, 4));
    EXPECT_DOUBLE_EQ(id.lambda_min, 1.0);
    EXPECT_DOUBLE_EQ(id.lambda_max, 1.0);
    EXPECT_DOUBLE_EQ(id.cond, 1.0);
    Eigen::Matrix2d d;
    d << 4, 0, 0, 1;
    const auto s = spectral_diagnostics(d);
    EXPECT_DOUBLE_EQ(s.lambda_min, 1.0);
    EXPECT_DOUBLE_EQ(s.lambda_max, 4.0);
    EXPECT_DOUBLE_EQ(s.cond, 4.0);
}

TEST(Spectral, TwoCenterMaternOracle) {
    // Eigenvalues of [[1,k],[k,1]] are 1 -+ k.
    const double k = matern_unit();
    const auto s = spectral_diagnostics(two_center_matrix());
    EXPECT_NEAR(s.lambda_min, 1.0 - k, 1e-14);
    EXPECT_NEAR(s.lambda_max, 1.0 + k, 1e-14);
    EXPECT_NEAR(s.cond, (1.0 + k) / (1.0 - k), 1e-12);
    EXPECT_NEAR(s.cond, 2.8711, 1e-4);
}

TEST(Spectral, RejectsNonSymmetric) {
    Eigen::Matrix2d k;
    k << 1, 0.3, 0.0, 1;
    EXPECT_THROW(spectral_diagnostics(k), InvalidArgument);
}

TEST(Spectral, ExtremesBracketRayleighQuotients) {
    std::mt19937 rng(23);
    KernelSpec spec;
    spec.family = KernelFamily::WendlandC4;
    spec.support_scale = 1.5;
    const Eigen::MatrixXd p = kkoop::testing::random_points(rng, 20, 2, -1, 1, 0.05);
    const Eigen::MatrixXd k = kernel_matrix(spec, p, p);
    const auto s = spectral_diagnostics(k);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd v = Eigen::VectorXd::Random(20);
        const double rq = v.dot(k * v) / v.squaredNorm();
        EXPECT_GE(rq, s.lambda_min * (1 - 1e-12));
        EXPECT_LE(rq, s.lambda_max * (1 + 1e-12));
    }
    // cond >= max diag / min diag
    EXPECT_GE(s.cond, k.diagonal().maxCoeff() / k.diagonal().minCoeff());
}
