#pragma once

#include <vector>

#include "sbridge/schrodinger.hpp"

namespace sbridge::detail {

struct ScalingResult {
    std::vector<double> a, b;  // -inf off the supports
    std::size_t iterations = 0;
    double residual_row = 0, residual_col = 0;
    bool converged = false;
    std::vector<double> history;
};

// Plan pi_ij = exp(a_i + b_j + L_ij + lr_i + lc_j) with L symmetric.
// Alternates a- and b-updates until the row marginal is within tol of mu
// (the column marginal is exact after each b-update).
ScalingResult scale(const double* L, std::size_t n, const std::vector<double>& lr,
                    const std::vector<double>& lc, const std::vector<double>& mu,
                    const std::vector<double>& nu, const SolveOptions& opts);

Plan assemble_plan(const double* L, std::size_t n, const std::vector<double>& a,
                   const std::vector<double>& b, const std::vector<double>& lr,
                   const std::vector<double>& lc);

}  // namespace sbridge::detail
