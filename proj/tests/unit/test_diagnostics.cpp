#include <gtest/gtest.h>

#include <cmath>

#include "sbridge/diagnostics.hpp"
#include "sbridge/generators.hpp"

using namespace sbridge;

namespace {

const Grid& grid() {
    static const Grid g = Grid::uniform(-6, 6, 128);
    return g;
}

SchrodingerSolution solved(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double T = 0.25) {
    auto s = solve(mu, nu, GibbsKernel::ou(grid(), T, 1.0), SolveOptions{1e-10});
    EXPECT_TRUE(s.converged);
    return s;
}

StabilityIngredients sample_ingredients(std::mt19937_64& rng) {
    StabilityIngredients s;
    s.T = uniform_real(rng, 0.05, 2);
    s.E = uniform_real(rng, 0.05, 3);
    s.Hsym_mu = uniform_real(rng, 0, 1);
    s.Hsym_nu = uniform_real(rng, 0, 1);
    for (double* v : {&s.gap_mu, &s.gap_nu, &s.gap_mu_bar, &s.gap_nu_bar, &s.I_mu, &s.I_nu, &s.I_mu_bar, &s.I_nu_bar})
        *v = uniform_real(rng, 0, 5);
    for (double* v : {&s.n_mu, &s.n_nu, &s.n_mu_bar, &s.n_nu_bar}) *v = uniform_real(rng, 0, 0.5);
    if (rng() % 3 == 0) s.n_nu = s.n_nu_bar = 0;
    if (rng() % 5 == 0) s.n_mu = std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

TEST(Corrector, TwoWaysOfIntegratingAgree) {
    auto [mu, nu] = random_pair(grid(), 8, 0);
    auto s = solved(mu, nu);
    EXPECT_NEAR(corrector_norm_nu(s), corrector_norm_nu_plan_marginal(s), 1e-7 * corrector_norm_nu(s));
}

// Property: both corrector bounds hold on random pairs.
TEST(Corrector, RandomPairsPass) {
    for (std::uint64_t item = 0; item < 5; ++item) {
        auto [mu, nu] = random_pair(grid(), 9, item);
        auto [a, b] = corrector_check(solved(mu, nu));
        EXPECT_TRUE(a.pass) << a.lhs << " > " << a.rhs;
        EXPECT_TRUE(b.pass) << b.lhs << " > " << b.rhs;
        EXPECT_EQ(a.name, "corrector_nu");
        EXPECT_EQ(b.name, "corrector_mu");
    }
}

TEST(Corrector, StationaryBridgeHasNoCorrection) {
    auto K = GibbsKernel::ou(grid(), 0.5, 1.0);
    auto m = DiscreteMeasure::normalized(grid(), K.reference().mass());
    auto s = solve(m, m, K, SolveOptions{1e-11});
    ASSERT_TRUE(s.converged);
    EXPECT_LT(corrector_norm_nu(s), 1e-8);
    EXPECT_LT(corrector_norm_mu(s), 1e-8);
    EXPECT_NEAR(s.cost_CT, s.H_mu, 1e-8);
}

TEST(Corrector, NonConvergedSolutionThrows) {
    auto [mu, nu] = random_pair(grid(), 8, 1);
    SolveOptions o;
    o.max_iter = 1;
    auto s = solve(mu, nu, GibbsKernel::ou(grid(), 0.25, 1.0), o);
    ASSERT_FALSE(s.converged);
    EXPECT_THROW(corrector_check(s), NotConverged);
}

// Property: the two independently written right-hand side evaluators agree.
TEST(Recheck, EvaluatorsAgree) {
    auto rng = battery_stream(77, 0);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = sample_ingredients(rng);
        auto same = [](double a, double b) {
            if (std::isinf(a) || std::isinf(b)) return a == b;
            return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
        };
        EXPECT_TRUE(same(rhs_stab_plans(s), recheck::rhs_stab_plans(s)));
        EXPECT_TRUE(same(rhs_stab_plans_fisher(s), recheck::rhs_stab_plans_fisher(s)));
        EXPECT_TRUE(same(rhs_stab_cost(s), recheck::rhs_stab_cost(s)));
        EXPECT_TRUE(same(rhs_stab_cost_fisher(s), recheck::rhs_stab_cost_fisher(s)));
    }
}

TEST(Stability, ClosedFormRhs) {
    StabilityIngredients s;
    s.T = 0.5;
    s.E = 0.25;
    s.Hsym_mu = 0.1;
    s.Hsym_nu = 0.3;
    s.gap_mu = 4;
    s.gap_mu_bar = 1;
    s.gap_nu = 9;
    s.gap_nu_bar = 16;
    s.n_mu = 0.1;
    s.n_mu_bar = 0.2;
    s.n_nu = 0.3;
    s.n_nu_bar = 0.4;
    const double corr = 2 * 0.1 + 1 * 0.2 + 3 * 0.3 + 4 * 0.4;
    EXPECT_NEAR(rhs_stab_plans(s), 0.4 + corr / 0.5, 1e-14);
    EXPECT_NEAR(rhs_stab_cost(s), 0.5 * 0.1 + 0.5 / 0.5 * corr, 1e-14);
}

TEST(Stability, ZeroNormTimesInfiniteGapIsZero) {
    StabilityIngredients s;
    s.T = 1;
    s.E = 1;
    s.gap_nu = std::numeric_limits<double>::infinity();
    s.n_nu = 0;
    EXPECT_DOUBLE_EQ(rhs_stab_plans(s), 0.0);
}

TEST(Stability, IdenticalSolutionsGiveZeroSides) {
    auto [mu, nu] = random_pair(grid(), 4, 0);
    auto a = solved(mu, nu);
    auto [p, f] = plan_stability_check(a, a);
    EXPECT_NEAR(p.lhs, 0.0, 1e-12);
    EXPECT_NEAR(p.rhs, 0.0, 1e-12);
    EXPECT_TRUE(p.pass);
    EXPECT_TRUE(f.pass);
}

// Property: plan and cost bounds hold along perturbation families.
TEST(Stability, PerturbationFamiliesPass) {
    for (std::uint64_t item = 0; item < 3; ++item) {
        auto fam = perturbation_family(grid(), 12, item, 0.2, 0.2);
        auto a = solved(fam.mu, fam.nu), b = solved(fam.mu_bar, fam.nu_bar);
        auto [p, pf] = plan_stability_check(a, b);
        EXPECT_TRUE(p.pass) << p.lhs << " > " << p.rhs;
        EXPECT_TRUE(pf.pass);
        auto cost = cost_stability_check(a, b, {}, true, SolveOptions{1e-10});
        ASSERT_EQ(cost.size(), 3u);
        for (const auto& r : cost) EXPECT_TRUE(r.pass) << r.name << ": " << r.lhs << " > " << r.rhs;
        EXPECT_EQ(cost.back().name, "stab_cost_frozen");
    }
}

TEST(Stability, OneMarginalReportWhenOnlyNuMoves) {
    auto fam = perturbation_family(grid(), 13, 0, 0, 0.3);
    auto a = solved(fam.mu, fam.nu), b = solved(fam.mu_bar, fam.nu_bar);
    auto cost = cost_stability_check(a, b);
    bool found = false;
    for (const auto& r : cost)
        if (r.name == "stab_cost_one_marginal") {
            found = true;
            EXPECT_TRUE(r.pass);
        }
    EXPECT_TRUE(found);
}

TEST(Eot, ConstantClosedForm) {
    EXPECT_NEAR(eot_constant(0.5, 1), 0.25 * std::log(2 * M_PI), 1e-15);
    EXPECT_NEAR(eot_constant(0.1, 2), 0.1 * std::log(0.4 * M_PI), 1e-15);
}

TEST(Eot, StabilityReportsPass) {
    auto g = Grid::uniform(-6, 6, 96);
    auto fam = perturbation_family(g, 21, 0, 0.2, 0.2);
    EotStabilityOptions o;
    o.solve.tol = 1e-10;
    o.kappa = 1.0;
    auto res = quadratic_eot_stability_check({fam.mu, fam.nu}, {fam.mu_bar, fam.nu_bar}, 0.5, o);
    ASSERT_TRUE(res.converged);
    ASSERT_EQ(res.reports.size(), 4u);
    for (const auto& r : res.reports) EXPECT_TRUE(r.pass) << r.name << ": " << r.lhs << " > " << r.rhs;
    EXPECT_LE(res.small_noise_limit_rhs, res.reports.front().rhs + 1e-12);
}

TEST(SolutionDigest, DependsOnInputsOnly) {
    auto [mu, nu] = random_pair(grid(), 3, 0);
    auto a = solved(mu, nu), b = solved(mu, nu);
    EXPECT_EQ(solution_digest(a), solution_digest(b));
    auto c = solved(mu, nu, 0.3);
    EXPECT_NE(solution_digest(a), solution_digest(c));
}
