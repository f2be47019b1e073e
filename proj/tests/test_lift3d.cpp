#include <gtest/gtest.h>

#include <cmath>

#include "horseshoe/lift3d.hpp"
#include "oracles.hpp"
#include "property.hpp"

using namespace horseshoe;

namespace {
const Parameters P{};

/** Greedy grid separation when F^{-1} contracts z: only the j = 0 distance matters. */
int greedy_grid_count(int grid, double eps) {
    const double step = fiber_length / (grid - 1);
    int count = 1;
    double last = 0.0;
    for (int g = 1; g < grid; ++g)
        if (g * step - last > eps) {
            ++count;
            last = g * step;
        }
    return count;
}
}  // namespace

TEST(Semiconjugacy, ResidualVanishes) {
    EXPECT_LE(semiconjugacy_residual(P, 10000, 1), 1e-12);
    EXPECT_EQ(semiconjugacy_residual(P, 2000, 9, 1), semiconjugacy_residual(P, 2000, 9, 4));
    const Parameters q{0.2, 0.3, 7.0, 3.8};
    EXPECT_LE(semiconjugacy_residual(q, 2000, 2), 1e-12);
}

TEST(Semiconjugacy, DirectPointwise) {
    prop::Gen g(41);
    for (int c = 0; c < prop::cases; ++c) {
        const auto ow = g.word(g.integer(2, 12));
        const PlanePoint x = cylinder_sample(Word(ow.begin(), ow.end()), P);
        const auto gx = apply_G(x, P);
        ASSERT_TRUE(gx);
        // pi(F^{-1}(X)) = G(pi(X)) for a lift X of x, on the branch of x's rectangle.
        const Point3 Y = apply_F_inverse(section_point(x), F_branch_for_rect(x.rect), P);
        const auto base = locate(project_pi(Y), P);
        ASSERT_TRUE(base);
        EXPECT_EQ(base->rect, gx->rect);
        EXPECT_NEAR(base->x, gx->x, 1e-12);
        EXPECT_NEAR(base->y, gx->y, 1e-12);
    }
}

TEST(Section, HeightsMustLieInTheSlab) {
    EXPECT_DOUBLE_EQ(section_point({1, 0.1, 0.5}).z, 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(section_point({3, 0.1, 0.5}).z, 11.0 / 12.0);
    EXPECT_THROW(section_point({1, 0.1, 0.5}, 0.5, 0.9), lift_error);
    EXPECT_THROW(section_point({3, 0.1, 0.5}, 0.05, 0.5), lift_error);
}

TEST(Fiber, CountsAreConstantInN) {
    const auto st = build_equilibrium(Potential::constant(0.0), 8, P);
    Rng rng(3, 0);
    const auto orb = sample_orbit(st, 25, rng);
    std::vector<int> ns;
    for (int n = 1; n <= 20; ++n) ns.push_back(n);
    for (double eps : {fiber_length / 8, fiber_length / 3, fiber_length}) {
        const auto rep = fiber_separated_counts(orb.points[0], orb.itinerary, ns, eps, P, 1001);
        EXPECT_TRUE(rep.constant);
        for (int c : rep.counts) EXPECT_EQ(c, greedy_grid_count(1001, eps)) << eps;
    }
    EXPECT_EQ(greedy_grid_count(1001, fiber_length), 1);
    EXPECT_THROW(fiber_separated_counts(orb.points[0], Word{}, ns, 0.1, P), lift_error);
    EXPECT_THROW(fiber_separated_counts(orb.points[0], orb.itinerary, {1000}, 0.1, P), lift_error);
}

TEST(Lift, IntegralOfLiftedPotentialEqualsBase) {
    for (const auto& phi : {Potential::constant(0.3), Potential::affine_in_y(0.0, 0.2), Potential::center_log_derivative(0.05, P.sigma)}) {
        const auto st = build_equilibrium(phi, 6, P);
        const auto rep = lift_report(st, 4);
        double base = 0.0;
        for (std::size_t e = 0; e < st.tm.nnz(); ++e) base += st.mu[st.tm.col[e]] * st.prob[e] * st.tm.phi[e];
        EXPECT_NEAR(rep.base, base, 1e-14);
        for (const auto& r : rep.rows) {
            EXPECT_LE(r.difference, 1e-6) << phi.describe() << " n=" << r.n;
            EXPECT_NEAR(r.alt_section, r.lifted, 1e-12);
            EXPECT_LE(r.invariance_gap, 1e-12);
        }
    }
}

TEST(Lift, ZObservableAtDepthZero) {
    const auto st = build_equilibrium(Potential::affine_in_y(0.0, 0.2), 6, P);
    double p1 = 0.0;
    for (std::size_t i = 0; i < st.tm.size(); ++i)
        if (plane_of(st.tm.words[i][0]) == Plane::P1) p1 += st.mu[i];
    const Observable3 z = [](const Point3& Q) { return Q.z; };
    EXPECT_NEAR(lift_integral(st, z, 0), (1.0 - p1) / 12.0 + 11.0 * p1 / 12.0, 1e-14);
    // Every lift lies in the slabs; F^{-1} contracts heights towards the bottom of each slab image.
    for (int n = 1; n <= 3; ++n) {
        const double v = lift_integral(st, z, n);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Lift, LiftedPotentialIgnoresZ) {
    for (const auto& phi : {Potential::affine_in_y(0.1, -0.2), Potential::center_log_derivative(-0.05, P.sigma)})
        EXPECT_EQ(lifted_z_deviation(phi, P, 500, 9, 4), 0.0);
    const auto lift = lifted_potential(Potential::affine_in_y(0.0, 0.2), P);
    EXPECT_NEAR(lift({0.1, 0.5, 0.05}), 0.1, 1e-15);
    EXPECT_THROW(lift({0.5, 0.5, 0.05}), lift_error);
}

TEST(PointCloud, SizesAndGenerations) {
    const auto cloud = generation_point_cloud(5, P);
    std::size_t expected = 0;
    for (int g = 1; g <= 5; ++g) expected += oracle::words(g).size();
    ASSERT_EQ(cloud.size(), expected);
    EXPECT_EQ(cloud.front().generation, 1);
    EXPECT_EQ(cloud.back().generation, 5);
    for (const auto& c : cloud) EXPECT_GE(slab_of(c.point.z), 0);
    EXPECT_THROW(generation_point_cloud(13, P), capacity_error);
}

TEST(EntropyEquality, ConstantFiberAddsNothing) {
    FiberReport fiber;
    fiber.n_values = {1, 20};
    fiber.counts = {8, 8};
    fiber.constant = true;
    const auto rep = entropy_equality_report(fiber, 40);
    EXPECT_EQ(rep.fiber_entropy, 0.0);
    EXPECT_NEAR(rep.ratio_growth, std::log(oracle::golden_root()), 1e-12);
    EXPECT_EQ(rep.htop_F, rep.ratio_growth);
    // (1/n) log N(n) approaches log omega only at rate O(1/n).
    EXPECT_NEAR(rep.word_growth, std::log(static_cast<double>(oracle::fib(43))) / 40.0, 1e-12);
    EXPECT_GT(rep.word_growth - rep.log_omega, 0.01);
}
