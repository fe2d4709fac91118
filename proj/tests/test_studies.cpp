#include <cmath>

#include <gtest/gtest.h>

#include "kkoop/dynamics.hpp"
#include "kkoop/experiment_defaults.hpp"
#include "kkoop/studies.hpp"

using namespace kkoop;

TEST(LogLogSlope, RecoversPowerLaw) {
    std::vector<double> h{0.5, 0.25, 0.125, 0.0625}, e;
    for (double x : h) e.push_back(3.0 * std::pow(x, 2.5));
    EXPECT_NEAR(loglog_slope(h, e), 2.5, 1e-12);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), DegenerateInput);
    EXPECT_THROW(loglog_slope({1.0, 1.0}, {1.0, 2.0}), DegenerateInput);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) throw DegenerateInput("boom");
                              }),
                 DegenerateInput);
}

TEST(PaddedGrid, TenPercentPadding) {
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 10, 2;
    const auto g = padded_grid(p, 3, 2);
    EXPECT_DOUBLE_EQ(g.x_min, -1.0);
    EXPECT_DOUBLE_EQ(g.x_max, 11.0);
    EXPECT_DOUBLE_EQ(g.y_min, -0.2);
    EXPECT_DOUBLE_EQ(g.y_max, 2.2);
    const auto q = g.points();
    ASSERT_EQ(q.rows(), 6);
    EXPECT_EQ(q.row(0), Eigen::RowVector2d(-1.0, -0.2));
    EXPECT_EQ(q.row(5), Eigen::RowVector2d(11.0, 2.2));
}

TEST(Convergence, AllSamplesInterpolateEverywhere) {
    const auto data = simulate(PendulumConfig{});
    // Below the smallest pairwise gap every state becomes a center.
    const auto res = convergence_study(data, KernelSpec{}, {1e-4});
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_EQ(res.rows[0].centers, 256);
    EXPECT_LE(res.rows[0].sup_error, 1e-8);
}

TEST(Convergence, DefaultScheduleDecays) {
    const auto data = simulate(PendulumConfig{});
    const auto res = convergence_study(data, KernelSpec{}, defaults::convergence_targets());
    ASSERT_EQ(res.rows.size(), defaults::convergence_targets().size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        EXPECT_LE(res.rows[i].fill, res.rows[i].target);
        if (i > 0) {
            EXPECT_GE(res.rows[i].centers, res.rows[i - 1].centers);
            EXPECT_LE(res.rows[i].sup_error, 1.1 * res.rows[i - 1].sup_error);
        }
    }
    EXPECT_GT(res.slope, 0.0);
}

TEST(Convergence, NonDecreasingTargetsAreSkipped) {
    const auto data = simulate(PendulumConfig{});
    const auto res = convergence_study(data, KernelSpec{}, {0.5, 0.6, 0.3});
    EXPECT_EQ(res.rows.size(), 2u);
    EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(Conditioning, RowsOrderedAndMonotoneForMatern) {
    const auto states = simulate(PendulumConfig{}).state_points();
    const auto spacings = defaults::conditioning_spacings();
    const auto kernels = defaults::matern_beta_sweep();
    const auto serial = conditioning_study(states, kernels, spacings, 1);
    const auto threaded = conditioning_study(states, kernels, spacings, 4);
    ASSERT_EQ(serial.size(), kernels.size() * spacings.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].kernel_index, i / spacings.size());
        EXPECT_EQ(serial[i].spacing, spacings[i % spacings.size()]);
        EXPECT_EQ(serial[i].cond, threaded[i].cond);
    }
    EXPECT_EQ(serial.front().centers, 2);
    EXPECT_LE(serial[spacings.size() - 1].centers, 64);
    // beta ordering at every spacing
    for (std::size_t s = 0; s < spacings.size(); ++s) {
        for (std::size_t k = 1; k < kernels.size(); ++k) {
            EXPECT_GE(serial[k * spacings.size() + s].cond, serial[(k - 1) * spacings.size() + s].cond);
        }
    }
}

// In the densely sampled end of the schedule (spacing well below the
// support radius) higher-smoothness Wendland kernels are worse conditioned.
TEST(Conditioning, WendlandSmoothnessOrderingAtSmallSpacing) {
    const auto states = simulate(PendulumConfig{}).state_points();
    const auto rows = conditioning_study(states, defaults::wendland_family(), {0.15, 0.12});
    for (std::size_t s = 0; s < 2; ++s) {
        EXPECT_GE(rows[2 * 2 + s].cond, rows[1 * 2 + s].cond);
        EXPECT_GE(rows[1 * 2 + s].cond, rows[0 * 2 + s].cond);
    }
}

TEST(MinEig, ShrinkingPairLowersMinimumEigenvalue) {
    const auto states = simulate(PendulumConfig{}).state_points();
    KernelSpec spec;
    spec.family = KernelFamily::WendlandC2;
    const auto deltas = defaults::mineig_deltas();
    const auto rows = mineig_study(states, spec, {0.6, 0.35}, deltas);
    ASSERT_EQ(rows.size(), 2 * deltas.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].base_eta == rows[i - 1].base_eta) {
            EXPECT_LE(rows[i].lambda_min, rows[i - 1].lambda_min);
        }
    }
}

TEST(MinEig, FarExtraCenterLeavesMinimumEigenvalueAlone) {
    // Extra center beyond the support of every base center: the matrix is
    // block diagonal with a unit block.
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 0.1, 0, 0.5, 0;
    const PointSet states(pts);
    KernelSpec spec;
    spec.family = KernelFamily::WendlandC2;
    const auto rows = mineig_study(states, spec, {0.3}, {5.0});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].lambda_min, rows[0].base_lambda_min, 0.1 * rows[0].base_lambda_min);
}

TEST(MinEig, ZeroDistanceRejected) {
    const auto states = simulate(PendulumConfig{}).state_points();
    EXPECT_THROW(mineig_study(states, KernelSpec{}, {0.5}, {0.1, 0.0}), DegenerateInput);
}
