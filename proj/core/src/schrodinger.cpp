#include "sbridge/schrodinger.hpp"

#include <cmath>
#include <limits>

#include "sinkhorn.hpp"

namespace sbridge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> to_stored(const std::vector<double>& pot) {
    std::vector<double> s(pot);
    for (double& v : s)
        if (v == kNegInf) v = kNaN;
    return s;
}

std::vector<double> to_log(const std::vector<double>& stored) {
    std::vector<double> s(stored);
    for (double& v : s)
        if (std::isnan(v)) v = kNegInf;
    return s;
}

double integrate(const std::vector<double>& pot, const DiscreteMeasure& p) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) s += pot[i] * p[i];
    return s;
}

}  // namespace

double Plan::total_mass() const {
    double s = 0;
    for (double lw : log_weights) s += std::exp(lw);
    return s;
}

SchrodingerSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GibbsKernel& K,
                          const ReferenceMeasure& ref, const SolveOptions& opts) {
    require_same_grid(mu.grid(), nu.grid(), "solve");
    require_same_grid(mu.grid(), K.grid(), "solve");
    require_same_grid(mu.grid(), ref.grid(), "solve");
    if (!(opts.tol > 0)) throw std::invalid_argument("solve: tol must be positive");
    const bool gauss_ref = ref.kind() == RefKind::Gaussian;
    const bool ou = K.kind() == KernelKind::OrnsteinUhlenbeck;
    if (gauss_ref != ou || (ou && ref.kappa() != K.kappa()))
        throw StructuralError("solve: kernel and reference measure do not match");

    const auto& lm = ref.log_mass();
    auto r = detail::scale(K.row(0), K.n(), lm, lm, mu.weights(), nu.weights(), opts);

    SchrodingerSolution s{mu, nu, K, ref, {}, {}, 0, 0, 0, 0, 0, 0, false, {}};
    s.H_mu = relative_entropy(mu, ref);
    s.H_nu = relative_entropy(nu, ref);
    // symmetric normalization: shift phi by c, psi by -c
    const double left = integrate(r.a, mu) - s.H_mu;
    const double right = integrate(r.b, nu) - s.H_nu;
    const double c = 0.5 * (right - left);
    for (std::size_t i = 0; i < r.a.size(); ++i) {
        if (r.a[i] != kNegInf) r.a[i] += c;
        if (r.b[i] != kNegInf) r.b[i] -= c;
    }
    s.phi = to_stored(r.a);
    s.psi = to_stored(r.b);
    s.cost_CT = integrate(r.a, mu) + integrate(r.b, nu);
    s.cost_ST = K.T() * (s.cost_CT - s.H_mu - s.H_nu);
    s.iterations = r.iterations;
    s.marginal_residual = std::max(r.residual_row, r.residual_col);
    s.converged = r.converged;
    s.residual_history = std::move(r.history);
    return s;
}

SchrodingerSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GibbsKernel& K,
                          const SolveOptions& opts) {
    return solve(mu, nu, K, K.reference(), opts);
}

std::vector<double> log_f(const SchrodingerSolution& sol) { return to_log(sol.phi); }
std::vector<double> log_g(const SchrodingerSolution& sol) { return to_log(sol.psi); }

Plan plan(const SchrodingerSolution& sol) {
    const auto& lm = sol.ref.log_mass();
    return detail::assemble_plan(sol.kernel.row(0), sol.kernel.n(), log_f(sol), log_g(sol), lm, lm);
}

double schrodinger_cost(const SchrodingerSolution& sol) { return sol.cost_CT; }

double entropic_cost(const SchrodingerSolution& sol) { return sol.cost_ST; }

double schrodinger_cost_direct(const SchrodingerSolution& sol) {
    const std::size_t n = sol.kernel.n();
    const auto& lm = sol.ref.log_mass();
    Plan p = plan(sol);
    double h = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double lw = p.log_weights[i * n + j];
            if (lw == kNegInf) continue;
            double log_r = sol.kernel.log_at(i, j) + lm[i] + lm[j];
            h += std::exp(lw) * (lw - log_r);
        }
    return h;
}

double plan_symmetric_entropy(const Plan& a, const Plan& b) {
    if (a.n != b.n) throw StructuralError("plan_symmetric_entropy: size mismatch");
    double h = 0;
    for (std::size_t k = 0; k < a.log_weights.size(); ++k) {
        double la = a.log_weights[k], lb = b.log_weights[k];
        if (la == kNegInf && lb == kNegInf) continue;
        if (la == kNegInf || lb == kNegInf) return std::numeric_limits<double>::infinity();
        h += (std::exp(la) - std::exp(lb)) * (la - lb);
    }
    return h;
}

double plan_tv_distance(const Plan& a, const Plan& b) {
    if (a.n != b.n) throw StructuralError("plan_tv_distance: size mismatch");
    double s = 0;
    for (std::size_t k = 0; k < a.log_weights.size(); ++k)
        s += std::abs(std::exp(a.log_weights[k]) - std::exp(b.log_weights[k]));
    return s;
}

EotPotentials eot_potentials_from_sp(const SchrodingerSolution& sol) {
    const double T = sol.T();
    const auto& lm = sol.ref.log_mass();
    EotPotentials e{sol.phi, sol.psi};
    for (std::size_t i = 0; i < e.Phi.size(); ++i) {
        if (sol.mu[i] > 0) e.Phi[i] = T * sol.phi[i] - T * (std::log(sol.mu[i]) - lm[i]);
        if (sol.nu[i] > 0) e.Psi[i] = T * sol.psi[i] - T * (std::log(sol.nu[i]) - lm[i]);
    }
    return e;
}

EotResult eot_quadratic_direct(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double epsilon,
                               const SolveOptions& opts) {
    require_same_grid(mu.grid(), nu.grid(), "eot_quadratic_direct");
    if (!(epsilon > 0)) throw std::invalid_argument("eot_quadratic_direct: epsilon must be positive");
    const Grid& g = mu.grid();
    const std::size_t n = g.size();
    std::vector<double> L(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) L[i * n + j] = L[j * n + i] = -g.sq_dist(i, j) / epsilon;
    std::vector<double> lr(n), lc(n);
    for (std::size_t i = 0; i < n; ++i) {
        lr[i] = mu[i] > 0 ? std::log(mu[i]) : kNegInf;
        lc[i] = nu[i] > 0 ? std::log(nu[i]) : kNegInf;
    }
    auto r = detail::scale(L.data(), n, lr, lc, mu.weights(), nu.weights(), opts);
    EotResult e;
    e.epsilon = epsilon;
    e.plan = detail::assemble_plan(L.data(), n, r.a, r.b, lr, lc);
    double transport = 0, entropy = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double lw = e.plan.log_weights[i * n + j];
            if (lw == kNegInf) continue;
            double w = std::exp(lw);
            transport += w * g.sq_dist(i, j);
            entropy += w * (lw - lr[i] - lc[j]);
        }
    e.cost = transport + epsilon * entropy;
    e.f = to_stored(r.a);
    e.g = to_stored(r.b);
    e.iterations = r.iterations;
    e.marginal_residual = std::max(r.residual_row, r.residual_col);
    e.converged = r.converged;
    return e;
}

double sp_time_from_epsilon(double epsilon, double kappa) {
    if (!(epsilon > 0) || !(kappa > 0)) throw std::invalid_argument("sp_time_from_epsilon: inputs must be positive");
    return std::asinh(epsilon * kappa / 4) / kappa;
}

double eot_cost_from_sp(double S_T, double epsilon, double kappa, double T, int dim, double M2_mu,
                        double M2_nu) {
    return epsilon / T * S_T - 0.5 * dim * epsilon * std::log(-std::expm1(-2 * kappa * T)) +
           (-std::expm1(-kappa * T)) * (M2_mu + M2_nu);
}

EotViaSp eot_via_sp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double epsilon, double kappa,
                    const SolveOptions& opts) {
    const double T = sp_time_from_epsilon(epsilon, kappa);
    auto K = GibbsKernel::ou(mu.grid(), T, kappa);
    auto sol = solve(mu, nu, K, opts);
    EotViaSp out{0, T, std::move(sol)};
    out.cost = eot_cost_from_sp(out.sp.cost_ST, epsilon, kappa, T, mu.grid().dim(), second_moment(mu),
                                second_moment(nu));
    return out;
}

}  // namespace sbridge
