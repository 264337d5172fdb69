#include <array>
#include <cmath>
#include <utility>

#include "sbridge/diagnostics.hpp"

// Independent evaluation of the stability right-hand sides, written against
// the displayed formulas term by term.
namespace sbridge::recheck {

namespace {

using Term = std::pair<double, double>;  // (prefactor^2 argument, norm)

std::array<Term, 4> pairs(const StabilityIngredients& s) {
    return {Term{s.gap_mu, s.n_mu}, Term{s.gap_nu, s.n_nu}, Term{s.gap_mu_bar, s.n_mu_bar},
            Term{s.gap_nu_bar, s.n_nu_bar}};
}

double sum_sqrt_terms(const StabilityIngredients& s) {
    double acc = 0;
    for (auto [g, n] : pairs(s))
        if (n != 0) acc += std::sqrt(g) * n;
    return acc;
}

}  // namespace

double rhs_stab_plans(const StabilityIngredients& s) {
    const double inv = 1.0 / std::sqrt(s.E);
    return (s.Hsym_mu + s.Hsym_nu) + inv * sum_sqrt_terms(s);
}

double rhs_stab_plans_fisher(const StabilityIngredients& s) {
    const std::array<double, 4> fisher{s.I_mu, s.I_nu, s.I_mu_bar, s.I_nu_bar};
    const auto p = pairs(s);
    double acc = 0;
    for (std::size_t k = 0; k < 4; ++k)
        if (p[k].second != 0) acc += (std::sqrt(fisher[k]) + std::sqrt(p[k].first)) * p[k].second;
    return acc / std::sqrt(s.E);
}

double rhs_stab_cost(const StabilityIngredients& s) {
    const double ent = s.Hsym_mu < s.Hsym_nu ? s.Hsym_mu : s.Hsym_nu;
    return s.T * (ent + sum_sqrt_terms(s) / std::sqrt(s.E));
}

double rhs_stab_cost_fisher(const StabilityIngredients& s) { return recheck::rhs_stab_plans_fisher(s); }

}  // namespace sbridge::recheck
