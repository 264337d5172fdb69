#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbridge/report.hpp"
#include "sbridge/schrodinger.hpp"

namespace sbridge {

// rho_t = P_t f * P_{T-t} g * m as cell masses.
struct EntropicInterpolation {
    std::vector<double> times;
    std::vector<std::vector<double>> densities;
    std::string source_digest;
    std::vector<std::string> warnings;  // bandwidth guard hits
};

// n_times >= 2 equally spaced times from 0 to T inclusive.
EntropicInterpolation interpolate(const SchrodingerSolution& sol, std::size_t n_times);

// rho_t at one time, plus log P_t f on the whole grid.
struct Slice {
    double t = 0;
    std::vector<double> rho;
    std::vector<double> log_Ptf;
    std::string warning;
};
Slice interpolation_slice(const SchrodingerSolution& sol, double t);

// alpha(t) = int |grad log P_t f|^2 d rho_t.
double corrector_energy(const SchrodingerSolution& sol, const Slice& s);

// "bbs_identity": C_T against H(nu|m) + int_0^T alpha(t) dt by midpoint rule.
// lhs is the relative gap, rhs the 2% threshold.
struct DynamicCost {
    InequalityReport report;
    double cost = 0;        // C_T from the solver
    double quadrature = 0;  // H(nu|m) + sum alpha(t_k) dt
    double relative_gap = 0;
    std::vector<std::string> warnings;
};
DynamicCost dynamic_cost_check(const SchrodingerSolution& sol, std::size_t n_times);

// "gronwall_decay": alpha(t) >= e^{2 kappa (T-t)} alpha(T) on the mesh
// t_k = kT/n, k = 1..n, reported at the tightest point; "gronwall_monotone":
// the largest relative increase of e^{2 kappa t} alpha(t) along the mesh
// against the 1e-3 jitter allowance.
struct GronwallResult {
    InequalityReport decay;
    InequalityReport monotone;
    std::vector<double> times, alpha;
    std::vector<std::string> warnings;
};
GronwallResult gronwall_decay_check(const SchrodingerSolution& sol, double kappa, std::size_t n_times);

struct SmallTimeRow {
    double T = 0;
    double TC = 0;        // T * C_T
    double w2_sq_4 = 0;   // W2^2 / 4
    double gap = 0;       // |T C_T - W2^2/4|
    double rel_gap = 0;   // gap / (W2^2/4), gap when the target is 0
    bool guard_ok = true;
    std::size_t iterations = 0;
    bool converged = true;
};

struct SmallTimeCurve {
    std::vector<SmallTimeRow> rows;
    bool monotone_gap = true;  // strictly decreasing along the (decreasing) T list
};

// kappa > 0 uses the OU kernel, kappa == 0 the heat kernel. 1d only; W2 uses
// the piecewise-constant reading of the grid measures.
SmallTimeCurve small_time_cost_curve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const std::vector<double>& T_list, double kappa,
                                     const SolveOptions& opts = {});

struct TransportMapPair {
    std::vector<double> x;                // cell centres on supp mu
    std::vector<double> schrodinger_map;  // x - 2T grad phi
    std::vector<double> brenier_map;
    double l2_error = 0;       // in L2(mu)
    double pushforward_w2 = 0; // W2(S_# mu, nu)
};

struct GradientRow {
    double T = 0;
    double l2_error = 0;
    double pushforward_w2 = 0;
    bool guard_ok = true;
    bool converged = true;
    TransportMapPair maps;
};

struct GradientExperiment {
    std::vector<GradientRow> rows;
    bool decreasing = true;
};

// Brenier map from the quantile functions of mu and nu (cell reading),
// evaluated at the centres of supp mu.
std::vector<double> brenier_map_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// `brenier` overrides the quantile map, e.g. with an analytic oracle.
GradientExperiment gradient_convergence_experiment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                                   const std::vector<double>& T_list, double kappa,
                                                   const SolveOptions& opts = {},
                                                   std::function<double(double)> brenier = {});

}  // namespace sbridge
