#include <gtest/gtest.h>

#include <cmath>

#include "sbridge/generators.hpp"
#include "sbridge/schrodinger.hpp"

using namespace sbridge;

namespace {

double integrate(const std::vector<double>& f, const DiscreteMeasure& p) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (p[i] > 0) s += f[i] * p[i];
    return s;
}

double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

}  // namespace

class SolveProperty : public ::testing::TestWithParam<std::uint64_t> {};

// Property: marginals, normalization and the two cost formulas agree.
TEST_P(SolveProperty, MarginalsNormalizationAndCost) {
    auto g = Grid::uniform(-6, 6, 96);
    auto [mu, nu] = random_pair(g, 424242, GetParam());
    auto sol = solve(mu, nu, GibbsKernel::ou(g, 0.3, 1.0), SolveOptions{1e-10});
    ASSERT_TRUE(sol.converged);
    auto p = plan(sol);
    EXPECT_LT(tv(p.row_marginal, mu.weights()), 1e-9);
    EXPECT_LT(tv(p.col_marginal, nu.weights()), 1e-9);
    EXPECT_NEAR(p.total_mass(), 1.0, 1e-9);
    EXPECT_NEAR(integrate(sol.phi, mu) - sol.H_mu, integrate(sol.psi, nu) - sol.H_nu, 1e-10);
    EXPECT_NEAR(schrodinger_cost(sol), schrodinger_cost_direct(sol), 1e-7 * std::max(1.0, sol.cost_CT));
    EXPECT_GE(sol.cost_CT + 1e-9, std::max(sol.H_mu, sol.H_nu));
    EXPECT_NEAR(sol.cost_ST, sol.T() * (sol.cost_CT - sol.H_mu - sol.H_nu), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, SolveProperty, ::testing::Range<std::uint64_t>(0, 6));

TEST(Solve, PotentialsUndefinedOffSupport) {
    auto g = Grid::uniform(-3, 3, 30);
    auto mu = uniform_measure(g, {-1, 0}, {1, 0});
    auto nu = gaussian_measure(g, {0.5, 0}, 0.8);
    auto sol = solve(mu, nu, GibbsKernel::heat(g, 0.5));
    ASSERT_TRUE(sol.converged);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(std::isnan(sol.phi[i]), !(mu[i] > 0));
    auto lf = log_f(sol);
    EXPECT_TRUE(std::isinf(lf[0]) && lf[0] < 0);
}

TEST(Solve, RejectsMismatchedGrids) {
    auto g1 = Grid::uniform(0, 1, 10), g2 = Grid::uniform(0, 1, 11);
    EXPECT_THROW(solve(gaussian_measure(g1, {0.5, 0}, 0.2), gaussian_measure(g2, {0.5, 0}, 0.2),
                       GibbsKernel::heat(g1, 0.1)),
                 std::invalid_argument);
}

TEST(Solve, IterationCapReportsNonConvergence) {
    auto g = Grid::uniform(-6, 6, 64);
    auto [mu, nu] = random_pair(g, 1, 0);
    SolveOptions o;
    o.max_iter = 2;
    auto sol = solve(mu, nu, GibbsKernel::ou(g, 0.05, 1.0), o);
    EXPECT_FALSE(sol.converged);
    EXPECT_GT(sol.marginal_residual, o.tol);
}

TEST(Solve, IdenticalSolutionsGiveZeroPlanDistance) {
    auto g = Grid::uniform(-4, 4, 40);
    auto [mu, nu] = random_pair(g, 5, 0);
    auto K = GibbsKernel::ou(g, 0.4, 1.0);
    auto a = plan(solve(mu, nu, K)), b = plan(solve(mu, nu, K));
    EXPECT_NEAR(plan_symmetric_entropy(a, b), 0.0, 1e-12);
    EXPECT_NEAR(plan_tv_distance(a, b), 0.0, 1e-12);
}

// Closed-form entropic cost between 1d Gaussians with |x-y|^2 cost and
// eps H(pi | mu x nu): optimal cross-covariance c = (sqrt(eps^2 + 16 s^2 t^2) - eps) / 4.
TEST(Eot, GaussianClosedForm) {
    const double a = 0.0, s = 1.0, b = 1.0, t = 1.2;
    auto g = Grid::uniform(-8, 9, 340);
    auto mu = gaussian_measure(g, {a, 0}, s), nu = gaussian_measure(g, {b, 0}, t);
    for (double eps : {0.5, 1.0, 2.0}) {
        const double c = (std::sqrt(eps * eps + 16 * s * s * t * t) - eps) / 4;
        const double rho = c / (s * t);
        const double expect = (a - b) * (a - b) + s * s + t * t - 2 * c - 0.5 * eps * std::log(1 - rho * rho);
        auto r = eot_quadratic_direct(mu, nu, eps, SolveOptions{1e-11});
        ASSERT_TRUE(r.converged);
        EXPECT_NEAR(r.cost, expect, 2e-3 * expect) << "eps=" << eps;
    }
}

TEST(Eot, TimeDictionaryInvertsSinh) {
    for (double kappa : {0.1, 1.0, 3.0})
        for (double eps : {0.01, 0.5, 4.0}) {
            double T = sp_time_from_epsilon(eps, kappa);
            EXPECT_NEAR(std::sinh(kappa * T), eps * kappa / 4, 1e-12 * std::max(1.0, eps * kappa));
        }
}

TEST(Eot, SchrodingerRouteMatchesDirect) {
    auto g = Grid::uniform(-6, 7, 160);
    auto mu = gaussian_measure(g, {0, 0}, 1.0);
    auto nu = mixture_measure(g, {{0.5, {1.0, 0}, 0.7}, {0.5, {2.5, 0}, 0.5}});
    for (double kappa : {0.5, 2.0}) {
        auto via = eot_via_sp(mu, nu, 0.6, kappa, SolveOptions{1e-11});
        auto direct = eot_quadratic_direct(mu, nu, 0.6, SolveOptions{1e-11});
        EXPECT_NEAR(via.cost, direct.cost, 1e-8 * std::abs(direct.cost)) << "kappa=" << kappa;
    }
}
