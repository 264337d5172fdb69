#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sbridge/generators.hpp"
#include "sbridge/measures.hpp"

using namespace sbridge;

TEST(Grid, MidpointCellsCoverTheInterval) {
    auto g = Grid::uniform(-1, 3, 8);
    ASSERT_EQ(g.size(), 8u);
    EXPECT_DOUBLE_EQ(g.nodes(0).front(), -0.75);
    EXPECT_DOUBLE_EQ(g.nodes(0).back(), 2.75);
    double total = 0;
    for (double w : g.weights()) total += w;
    EXPECT_NEAR(total, 4.0, 1e-14);
}

TEST(Grid, TwoDimensionalIndexIsRowMajor) {
    auto g = Grid::uniform2d(0, 1, 3, 0, 2, 4);
    EXPECT_EQ(g.size(), 12u);
    EXPECT_EQ(g.index(2, 1), 9u);
    auto m = g.multi(9);
    EXPECT_EQ(m[0], 2u);
    EXPECT_EQ(m[1], 1u);
    EXPECT_NEAR(g.weight(0), 1.0 / 3 * 0.5, 1e-15);
}

TEST(DiscreteMeasure, RejectsBadWeights) {
    auto g = Grid::uniform(0, 1, 3);
    EXPECT_THROW(DiscreteMeasure(g, {0.5, 0.6, -0.1}), std::invalid_argument);
    EXPECT_THROW(DiscreteMeasure(g, {0.5, 0.6, 0.1}), std::invalid_argument);
    EXPECT_NO_THROW(DiscreteMeasure(g, {0.5, 0.4, 0.1}));
}

TEST(RelativeEntropy, InfiniteOffReferenceSupport) {
    auto g = Grid::uniform(0, 1, 2);
    DiscreteMeasure p(g, {0.5, 0.5}), q(g, {1.0, 0.0});
    EXPECT_TRUE(std::isinf(relative_entropy(p, q)));
    EXPECT_NEAR(relative_entropy(q, p), std::log(2.0), 1e-15);
}

TEST(RelativeEntropy, SymmetricClosedForm) {
    auto g = Grid::uniform(0, 1, 2);
    const double a = 0.3, b = 0.6;
    DiscreteMeasure p(g, {a, 1 - a}), q(g, {b, 1 - b});
    const double expect = (a - b) * std::log(a / b) + (b - a) * std::log((1 - a) / (1 - b));
    EXPECT_NEAR(symmetric_entropy(p, q), expect, 1e-14);
    EXPECT_NEAR(symmetric_entropy(p, q), symmetric_entropy(q, p), 1e-15);
}

TEST(RelativeEntropy, LebesgueOfUniformIsMinusLogLength) {
    auto g = Grid::uniform(0, 4, 40);
    auto u = DiscreteMeasure::normalized(g, std::vector<double>(40, 1.0));
    EXPECT_NEAR(relative_entropy(u, ReferenceMeasure::lebesgue(g)), -std::log(4.0), 1e-12);
}

TEST(ReferenceMeasure, GaussianLogMassMatchesMass) {
    auto g = Grid::uniform(-5, 5, 50);
    auto m = ReferenceMeasure::gaussian(g, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::exp(m.log_mass()[i]), m.mass()[i], 1e-15);
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-6);
}

TEST(Gradient, ExactOnAffineFunctions) {
    auto g = Grid::uniform(-1, 1, 11);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 3 * g.nodes(0)[i] - 1;
    for (const auto& p : gradient(g, f)) EXPECT_NEAR(p[0], 3.0, 1e-12);
}

TEST(Gradient, UndefinedCellsGetZero) {
    auto g = Grid::uniform(0, 5, 5);
    std::vector<double> f{0, 1, 2, 3, 4};
    std::vector<char> def{1, 1, 0, 1, 0};
    auto grad = gradient(g, f, def);
    EXPECT_DOUBLE_EQ(grad[2][0], 0.0);
    EXPECT_DOUBLE_EQ(grad[4][0], 0.0);
    EXPECT_NEAR(grad[0][0], 1.0, 1e-15);
    EXPECT_NEAR(grad[3][0], 0.0, 1e-15);  // isolated defined cell
}

TEST(Moments, GaussianMeasure) {
    auto g = Grid::uniform(-10, 12, 800);
    auto p = gaussian_measure(g, {1, 0}, 1.5);
    EXPECT_NEAR(first_moment(p)[0], 1.0, 1e-6);
    EXPECT_NEAR(second_moment(p), 1 + 2.25, 1e-3);
}

TEST(Csv, RoundTrip) {
    auto g = Grid::uniform(-2, 2, 16);
    auto p = gaussian_measure(g, {0.3, 0}, 0.7);
    std::stringstream ss;
    write_csv(ss, p);
    auto q = read_csv(ss);
    ASSERT_EQ(q.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], p[i], 1e-14);
}

TEST(Generators, BatteryStreamsAreDeterministic) {
    auto g = Grid::uniform(-6, 6, 64);
    auto [a1, b1] = random_pair(g, 7, 3);
    auto [a2, b2] = random_pair(g, 7, 3);
    auto [a3, b3] = random_pair(g, 7, 4);
    EXPECT_EQ(a1.weights(), a2.weights());
    EXPECT_EQ(b1.weights(), b2.weights());
    EXPECT_NE(a1.weights(), a3.weights());
}

TEST(Generators, PerturbationKeepsMassAndPositivity) {
    auto g = Grid::uniform(-6, 6, 64);
    for (std::uint64_t item = 0; item < 20; ++item) {
        auto f = perturbation_family(g, 11, item, 0.3, 0.0);
        double total = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_GE(f.mu_bar[i], 0.0);
            EXPECT_LE(std::abs(f.mu_bar[i] - f.mu[i]), 0.3 * f.mu[i] + 1e-14);
            total += f.mu_bar[i];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_EQ(f.nu.weights(), f.nu_bar.weights());
    }
}

TEST(Generators, UniformRealInRange) {
    auto rng = battery_stream(1, 2);
    for (int k = 0; k < 1000; ++k) {
        double u = uniform_real(rng, -2, 5);
        EXPECT_GE(u, -2.0);
        EXPECT_LT(u, 5.0);
    }
}
