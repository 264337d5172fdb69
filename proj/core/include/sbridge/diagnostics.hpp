#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sbridge/report.hpp"
#include "sbridge/schrodinger.hpp"

namespace sbridge {

struct SobolevContext {
    double cg_tol = 1e-10;
};

// ||grad log P_T f||^2 integrated against nu (and the mirror quantity with g
// against mu).
double corrector_norm_nu(const SchrodingerSolution& sol);
double corrector_norm_mu(const SchrodingerSolution& sol);
// Same integrand, integrated against the plan's second marginal.
double corrector_norm_nu_plan_marginal(const SchrodingerSolution& sol);

// Reports "corrector_nu" and "corrector_mu": lhs <= (C_T - H(.|m)) / E_{2kappa}(T).
std::pair<InequalityReport, InequalityReport> corrector_check(const SchrodingerSolution& sol, double kappa);
std::pair<InequalityReport, InequalityReport> corrector_check(const SchrodingerSolution& sol);

// Raw numbers every stability bound is assembled from. "bar" quantities
// belong to the second solution.
struct StabilityIngredients {
    double T = 0, E = 0;
    double Hsym_mu = 0, Hsym_nu = 0;
    double CT = 0, CT_bar = 0;
    double S_T = 0, S_T_bar = 0;
    // C_T - H(.|m), clamped at 0 when negative by round-off
    double gap_mu = 0, gap_nu = 0, gap_mu_bar = 0, gap_nu_bar = 0;
    // ||mu - mu_bar||_{H^-1(mu)}, ||nu - nu_bar||_{H^-1(nu)}, ||mu_bar - mu||_{H^-1(mu_bar)}, ...
    double n_mu = 0, n_nu = 0, n_mu_bar = 0, n_nu_bar = 0;
    double I_mu = 0, I_nu = 0, I_mu_bar = 0, I_nu_bar = 0;
    std::vector<std::string> notes;
    bool gap_violation = false;
};

StabilityIngredients stability_ingredients(const SchrodingerSolution& a, const SchrodingerSolution& b,
                                           const SobolevContext& ctx = {});

double rhs_stab_plans(const StabilityIngredients& s);
double rhs_stab_plans_fisher(const StabilityIngredients& s);
double rhs_stab_cost(const StabilityIngredients& s);
double rhs_stab_cost_fisher(const StabilityIngredients& s);

// Second, separately written evaluator of the same right-hand sides.
namespace recheck {
double rhs_stab_plans(const StabilityIngredients& s);
double rhs_stab_plans_fisher(const StabilityIngredients& s);
double rhs_stab_cost(const StabilityIngredients& s);
double rhs_stab_cost_fisher(const StabilityIngredients& s);
}  // namespace recheck

// Reports "stab_plans" and "stab_plans_fisher".
std::pair<InequalityReport, InequalityReport> plan_stability_check(const SchrodingerSolution& a,
                                                                   const SchrodingerSolution& b,
                                                                   const SobolevContext& ctx = {});

// Reports "stab_cost" and "stab_cost_fisher". When exactly one marginal
// differs, also "stab_cost_one_marginal" (no entropy term). When both differ
// and `bridge` solves are allowed, also "stab_cost_frozen" which routes
// through the intermediate problem (mu, nu_bar).
std::vector<InequalityReport> cost_stability_check(const SchrodingerSolution& a, const SchrodingerSolution& b,
                                                   const SobolevContext& ctx = {}, bool bridge = true,
                                                   const SolveOptions& bridge_opts = {});

struct MarginalPair {
    DiscreteMeasure mu, nu;
};

struct EotStabilityOptions {
    SolveOptions solve;
    SobolevContext sobolev;
    double kappa = 0;  // > 0 adds the finite-kappa reports
};

struct EotStabilityResult {
    std::vector<InequalityReport> reports;
    double cost = 0, cost_bar = 0;
    // right-hand side of the small-noise limit bound
    double small_noise_limit_rhs = 0;
    bool converged = true;
};

// "eot_cost_stab", "eot_plan_stab" (the kappa -> 0 bounds with C_eps) and,
// for kappa > 0, "eot_cost_stab_kappa", "eot_plan_stab_kappa".
EotStabilityResult quadratic_eot_stability_check(const MarginalPair& a, const MarginalPair& b, double epsilon,
                                                 const EotStabilityOptions& opts = {});

// C_eps = (d eps / 2) log(4 pi eps).
double eot_constant(double epsilon, int dim);

// Hash of the marginals and kernel metadata of a solution pair.
std::string solution_digest(const SchrodingerSolution& a, const SchrodingerSolution* b = nullptr);

}  // namespace sbridge
