#include "sbridge/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "json.hpp"
#include "sbridge/diagnostics.hpp"

namespace sbridge {

std::string solution_json(const SchrodingerSolution& sol) {
    nlohmann::ordered_json j;
    j["kind"] = "solution";
    j["grid"] = sol.kernel.grid().describe();
    j["kernel"] = kernel_kind_name(sol.kernel.kind());
    j["T"] = sol.T();
    j["kappa"] = sol.kernel.kappa();
    j["cost_CT"] = sol.cost_CT;
    j["cost_ST"] = sol.cost_ST;
    j["H_mu"] = sol.H_mu;
    j["H_nu"] = sol.H_nu;
    j["iterations"] = sol.iterations;
    j["marginal_residual"] = sol.marginal_residual;
    j["converged"] = sol.converged;
    if (!sol.kernel.warning().empty()) j["warning"] = sol.kernel.warning();
    j["digest"] = solution_digest(sol);
    return j.dump();
}

void write_potentials_csv(std::ostream& os, const SchrodingerSolution& sol) {
    const Grid& g = sol.kernel.grid();
    os << (g.dim() == 1 ? "x" : "x,y") << ",mu,nu,phi,psi\n";
    os << std::setprecision(17);
    auto field = [&](double v) {
        if (std::isfinite(v)) os << v;
    };
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto p = g.point(i);
        os << p[0];
        if (g.dim() == 2) os << ',' << p[1];
        os << ',' << sol.mu[i] << ',' << sol.nu[i] << ',';
        field(sol.phi[i]);
        os << ',';
        field(sol.psi[i]);
        os << '\n';
    }
}

void write_plan_csv(std::ostream& os, const SchrodingerSolution& sol, double threshold) {
    auto p = plan(sol);
    os << "i,j,weight\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) {
            double w = std::exp(p.log_weights[i * p.n + j]);
            if (w > threshold) os << i << ',' << j << ',' << w << '\n';
        }
}

}  // namespace sbridge
