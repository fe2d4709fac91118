#include <random>

#include <gtest/gtest.h>

#include "kkoop/dynamics.hpp"
#include "kkoop/experiment_defaults.hpp"
#include "kkoop/geometry.hpp"
#include "test_support.hpp"

using namespace kkoop;

namespace {

PointSet line(std::initializer_list<double> xs) {
    Eigen::MatrixXd p(static_cast<Index>(xs.size()), 1);
    Index i = 0;
    for (double x : xs) p(i++, 0) = x;
    return PointSet(p);
}

}  // namespace

TEST(Subselect, HandTraceOfGreedyGate) {
    const auto c = subselect_centers(line({0.0, 0.3, 0.7, 1.5}), 0.5);
    ASSERT_EQ(c.size(), 3);
    EXPECT_EQ(c.points(0, 0), 0.0);
    EXPECT_EQ(c.points(1, 0), 0.7);
    EXPECT_EQ(c.points(2, 0), 1.5);
    EXPECT_EQ(c.indices, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(Subselect, SmallEtaKeepsEverything) {
    const auto c = subselect_centers(line({0.0, 0.3, 0.7, 1.5}), 0.1);
    EXPECT_EQ(c.size(), 4);
}

TEST(Subselect, EqualDistanceIsRejected) {
    const auto c = subselect_centers(line({0.0, 0.5, 1.0}), 0.5);
    // 0.5 sits exactly at eta from the first center; 1.0 is strictly beyond.
    EXPECT_EQ(c.indices, (std::vector<std::size_t>{0, 2}));
}

TEST(Subselect, KeepsTrajectoryStepIndices) {
    Eigen::MatrixXd p(3, 1);
    p << 0.0, 0.1, 2.0;
    const auto c = subselect_centers(PointSet(p, {10, 11, 12}), 0.5);
    EXPECT_EQ(c.indices, (std::vector<std::size_t>{10, 12}));
}

TEST(Subselect, Errors) {
    EXPECT_THROW(subselect_centers(PointSet(Eigen::MatrixXd(0, 2)), 0.1), InvalidArgument);
    EXPECT_THROW(subselect_centers(line({0.0}), 0.0), InvalidArgument);
    EXPECT_THROW(subselect_centers(TrajectoryDataset{}, 0.1), InvalidArgument);
}

TEST(Subselect, SeededRefinementIsNested) {
    const auto data = simulate(PendulumConfig{});
    const auto states = data.state_points();
    const auto coarse = subselect_centers(states, 0.5);
    const auto fine = subselect_centers(states, 0.2, &coarse);
    ASSERT_GE(fine.size(), coarse.size());
    for (Index i = 0; i < coarse.size(); ++i) {
        EXPECT_EQ(fine.indices[i], coarse.indices[i]);
        EXPECT_EQ(fine.points.row(i), coarse.points.row(i));
    }
    EXPECT_GT(separation(fine), 0.1);
    EXPECT_LE(fill_distance(fine, states), 0.2);
}

TEST(Subselect, PendulumDefaultsGiveThirtySevenCenters) {
    const auto data = simulate(PendulumConfig{});
    EXPECT_EQ(subselect_centers(data, defaults::pendulum_eta).size(), 37);
    // The whole window of gates reported in the defaults header works.
    EXPECT_EQ(subselect_centers(data, 0.2295).size(), 37);
    EXPECT_EQ(subselect_centers(data, 0.235).size(), 37);
}

// Invariants on random trajectories: separation > eta / 2, fill <= eta,
// determinism.
TEST(Subselect, RandomTrajectoryInvariants) {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> eta_dist(0.05, 0.6);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::MatrixXd p = kkoop::testing::random_points(rng, 80, 2, -1, 1);
        const PointSet cand(p);
        const double eta = eta_dist(rng);
        const auto c = subselect_centers(cand, eta);
        const auto again = subselect_centers(cand, eta);
        EXPECT_EQ(c.points, again.points);
        EXPECT_EQ(c.indices, again.indices);
        if (c.size() >= 2) EXPECT_GT(separation(c), eta / 2);
        EXPECT_LE(fill_distance(c, cand), eta);
    }
}

TEST(FillDistance, Examples) {
    EXPECT_EQ(fill_distance(line({0, 1, 2}), line({0, 1, 2})), 0.0);
    EXPECT_EQ(fill_distance(line({0}), line({0, 1})), 1.0);
    EXPECT_EQ(fill_distance(line({0, 2}), line({0, 1, 2})), 1.0);
}

TEST(FillDistance, Errors) {
    EXPECT_THROW(fill_distance(PointSet(Eigen::MatrixXd(0, 1)), line({0})), InvalidArgument);
    EXPECT_THROW(fill_distance(line({0}), PointSet(Eigen::MatrixXd::Zero(1, 2))), InvalidArgument);
}

TEST(FillDistance, MonotoneUnderAddingCenters) {
    std::mt19937 rng(5);
    const Eigen::MatrixXd ref = kkoop::testing::random_points(rng, 200, 2, 0, 1);
    const PointSet reference(ref);
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= 40; ++m) {
        const PointSet centers(Eigen::MatrixXd(ref.topRows(m)));
        const double f = fill_distance(centers, reference);
        EXPECT_LE(f, prev);
        prev = f;
    }
}

TEST(Separation, Examples) {
    EXPECT_EQ(separation(line({0, 1})), 0.5);
    EXPECT_EQ(separation(line({0, 1, 3})), 0.5);
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 3, 4;
    EXPECT_DOUBLE_EQ(separation(PointSet(p)), 2.5);
}

TEST(Separation, Errors) {
    EXPECT_THROW(separation(line({1.0})), DegenerateInput);
    EXPECT_THROW(separation(line({1.0, 2.0, 1.0})), DegenerateInput);
}
