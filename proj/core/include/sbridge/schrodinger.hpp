#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sbridge/kernels.hpp"
#include "sbridge/measures.hpp"

namespace sbridge {

struct SolveOptions {
    double tol = 1e-9;
    std::size_t max_iter = 100000;
    bool record_history = false;
};

struct Infeasible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normalized fg-decomposition. phi, psi are NaN off the supports of mu, nu.
struct SchrodingerSolution {
    DiscreteMeasure mu, nu;
    GibbsKernel kernel;
    ReferenceMeasure ref;
    std::vector<double> phi, psi;
    double cost_CT = 0;  // H(pi | R_{0,T}) = int phi dmu + int psi dnu
    double cost_ST = 0;  // T C_T - T H(mu|m) - T H(nu|m)
    double H_mu = 0, H_nu = 0;
    std::size_t iterations = 0;
    double marginal_residual = 0;  // max of the two marginal TV-norm errors
    bool converged = false;
    std::vector<double> residual_history;

    double T() const { return kernel.T(); }
};

struct Plan {
    std::size_t n = 0;
    std::vector<double> log_weights;  // row-major n x n, -inf off support
    std::vector<double> row_marginal, col_marginal;

    double total_mass() const;
};

// Alternating log-domain updates of the Schrödinger system, then the
// symmetric normalization int phi dmu - H(mu|m) = int psi dnu - H(nu|m).
SchrodingerSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GibbsKernel& K,
                          const ReferenceMeasure& ref, const SolveOptions& opts = {});
SchrodingerSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GibbsKernel& K,
                          const SolveOptions& opts = {});

// -inf off support, otherwise the stored potential.
std::vector<double> log_f(const SchrodingerSolution& sol);
std::vector<double> log_g(const SchrodingerSolution& sol);

Plan plan(const SchrodingerSolution& sol);

double schrodinger_cost(const SchrodingerSolution& sol);
double entropic_cost(const SchrodingerSolution& sol);
// H(pi|R) by direct double summation over the plan.
double schrodinger_cost_direct(const SchrodingerSolution& sol);

// H^sym between two plans on the same grid; +inf on support mismatch.
double plan_symmetric_entropy(const Plan& a, const Plan& b);
// sum |a - b| over pairs.
double plan_tv_distance(const Plan& a, const Plan& b);

// Phi_T = T phi - T log(dmu/dm), Psi_T = T psi - T log(dnu/dm).
struct EotPotentials {
    std::vector<double> Phi, Psi;
};
EotPotentials eot_potentials_from_sp(const SchrodingerSolution& sol);

struct EotResult {
    double epsilon = 0;
    double cost = 0;  // int |x-y|^2 dpi + eps H(pi | mu x nu)
    Plan plan;
    std::vector<double> f, g;  // log-potentials against mu x nu, NaN off support
    std::size_t iterations = 0;
    double marginal_residual = 0;
    bool converged = false;
};

EotResult eot_quadratic_direct(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double epsilon,
                               const SolveOptions& opts = {});

// Solves sinh(kappa T) = eps kappa / 4.
double sp_time_from_epsilon(double epsilon, double kappa);

// S^eps = (eps/T) S_T - (d eps/2) log(1 - e^{-2 kappa T}) + (1 - e^{-kappa T})(M2(mu) + M2(nu)).
double eot_cost_from_sp(double S_T, double epsilon, double kappa, double T, int dim, double M2_mu,
                        double M2_nu);

struct EotViaSp {
    double cost = 0;
    double T = 0;
    SchrodingerSolution sp;
};

EotViaSp eot_via_sp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double epsilon, double kappa,
                    const SolveOptions& opts = {});

}  // namespace sbridge
