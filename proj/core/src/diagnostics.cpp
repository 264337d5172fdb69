#include "sbridge/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sbridge/kernels.hpp"
#include "sbridge/sobolev.hpp"

namespace sbridge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kClamp = 1e-8;
constexpr double kRecheckTol = 1e-10;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_converged(const SchrodingerSolution& s, const char* what) {
    if (!s.converged) throw NotConverged(std::string(what) + ": solution did not converge");
}

// C_T - H clamped at 0 when round-off pushes it below.
double clamp_gap(double g, const char* what, std::vector<std::string>& notes, bool& violation) {
    if (g >= 0) return g;
    if (g >= -kClamp) {
        notes.push_back(std::string(what) + " clamped from " + num(g));
        return 0;
    }
    violation = true;
    notes.push_back(std::string(what) + " negative: " + num(g));
    return 0;
}

// a * n with 0 * inf = 0
double term(double a, double n) { return n == 0 ? 0.0 : a * n; }

double weighted_sq_grad(const std::vector<Point>& grad, const std::vector<double>& w, int dim) {
    double s = 0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (w[i] <= 0) continue;
        double g2 = 0;
        for (int a = 0; a < dim; ++a) g2 += grad[i][a] * grad[i][a];
        s += w[i] * g2;
    }
    return s;
}

std::vector<Point> grad_log_PTf(const SchrodingerSolution& sol) {
    auto v = apply_semigroup(sol.kernel, log_f(sol), sol.ref);
    return gradient(sol.kernel.grid(), v);
}

std::vector<Point> grad_log_PTg(const SchrodingerSolution& sol) {
    auto v = apply_semigroup(sol.kernel, log_g(sol), sol.ref);
    return gradient(sol.kernel.grid(), v);
}

void check_rhs(InequalityReport& r, double other) {
    if (std::isinf(r.rhs) && std::isinf(other)) return;
    if (!(std::abs(r.rhs - other) <= kRecheckTol * std::max(1.0, std::abs(r.rhs))))
        flag(r, "rhs recheck mismatch: " + num(r.rhs) + " vs " + num(other));
}

void attach(InequalityReport& r, const StabilityIngredients& s) {
    for (const auto& n : s.notes) r.notes.push_back(n);
    if (s.gap_violation) flag(r, "negative C_T - H beyond round-off");
}

void same_problem(const SchrodingerSolution& a, const SchrodingerSolution& b, const char* what) {
    require_same_grid(a.mu.grid(), b.mu.grid(), what);
    if (a.kernel.kind() != b.kernel.kind() || a.T() != b.T() || a.kernel.kappa() != b.kernel.kappa())
        throw StructuralError(std::string(what) + ": solutions use different kernels");
}

double atom_w2(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.grid().dim() == 1) return wasserstein2_1d(a, b);
    try {
        return wasserstein2_exact_small(a, b);
    } catch (const std::invalid_argument&) {
        return kNaN;
    }
}

// Marginal-only quantities shared by the SP and EOT bounds.
struct MarginalTerms {
    double Hsym_mu, Hsym_nu;
    double n_mu, n_nu, n_mu_bar, n_nu_bar;
};

MarginalTerms marginal_terms(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DiscreteMeasure& mub,
                             const DiscreteMeasure& nub, double cg_tol) {
    MarginalTerms t;
    t.Hsym_mu = symmetric_entropy(mu, mub);
    t.Hsym_nu = symmetric_entropy(nu, nub);
    t.n_mu = h_minus_one_norm(difference(mu, mub), mu, cg_tol);
    t.n_nu = h_minus_one_norm(difference(nu, nub), nu, cg_tol);
    t.n_mu_bar = h_minus_one_norm(difference(mub, mu), mub, cg_tol);
    t.n_nu_bar = h_minus_one_norm(difference(nub, nu), nub, cg_tol);
    return t;
}

}  // namespace

double eot_constant(double epsilon, int dim) { return 0.5 * dim * epsilon * std::log(4 * M_PI * epsilon); }

std::string solution_digest(const SchrodingerSolution& a, const SchrodingerSolution* b) {
    Digest d;
    for (const SchrodingerSolution* s : {&a, b}) {
        if (!s) continue;
        d.add(kernel_kind_name(s->kernel.kind())).add(s->T()).add(s->kernel.kappa());
        d.add(std::span<const double>(s->mu.weights())).add(std::span<const double>(s->nu.weights()));
    }
    return d.hex();
}

double corrector_norm_nu(const SchrodingerSolution& sol) {
    return weighted_sq_grad(grad_log_PTf(sol), sol.nu.weights(), sol.kernel.grid().dim());
}

double corrector_norm_mu(const SchrodingerSolution& sol) {
    return weighted_sq_grad(grad_log_PTg(sol), sol.mu.weights(), sol.kernel.grid().dim());
}

double corrector_norm_nu_plan_marginal(const SchrodingerSolution& sol) {
    return weighted_sq_grad(grad_log_PTf(sol), plan(sol).col_marginal, sol.kernel.grid().dim());
}

std::pair<InequalityReport, InequalityReport> corrector_check(const SchrodingerSolution& sol, double kappa) {
    require_converged(sol, "corrector_check");
    const double E = curvature_factor(kappa, sol.T());
    std::vector<std::string> notes;
    bool bad = false;
    const double gnu = clamp_gap(sol.cost_CT - sol.H_nu, "C_T - H(nu|m)", notes, bad);
    const double gmu = clamp_gap(sol.cost_CT - sol.H_mu, "C_T - H(mu|m)", notes, bad);
    const std::string dg = solution_digest(sol);
    auto rn = make_report("corrector_nu", corrector_norm_nu(sol), gnu / E, kDefaultRule, dg);
    auto rm = make_report("corrector_mu", corrector_norm_mu(sol), gmu / E, kDefaultRule, dg);
    for (auto* r : {&rn, &rm}) {
        for (const auto& n : notes) r->notes.push_back(n);
        if (bad) flag(*r, "negative C_T - H beyond round-off");
        if (sol.kernel.kind() == KernelKind::HeatLebesgue) r->notes.push_back("heat reference: heuristic");
    }
    return {rn, rm};
}

std::pair<InequalityReport, InequalityReport> corrector_check(const SchrodingerSolution& sol) {
    return corrector_check(sol, sol.kernel.curvature());
}

StabilityIngredients stability_ingredients(const SchrodingerSolution& a, const SchrodingerSolution& b,
                                           const SobolevContext& ctx) {
    same_problem(a, b, "stability_ingredients");
    require_converged(a, "stability_ingredients");
    require_converged(b, "stability_ingredients");
    StabilityIngredients s;
    s.T = a.T();
    s.E = curvature_factor(a.kernel.curvature(), s.T);
    auto m = marginal_terms(a.mu, a.nu, b.mu, b.nu, ctx.cg_tol);
    s.Hsym_mu = m.Hsym_mu;
    s.Hsym_nu = m.Hsym_nu;
    s.n_mu = m.n_mu;
    s.n_nu = m.n_nu;
    s.n_mu_bar = m.n_mu_bar;
    s.n_nu_bar = m.n_nu_bar;
    s.CT = a.cost_CT;
    s.CT_bar = b.cost_CT;
    s.S_T = a.cost_ST;
    s.S_T_bar = b.cost_ST;
    s.gap_mu = clamp_gap(a.cost_CT - a.H_mu, "C_T - H(mu|m)", s.notes, s.gap_violation);
    s.gap_nu = clamp_gap(a.cost_CT - a.H_nu, "C_T - H(nu|m)", s.notes, s.gap_violation);
    s.gap_mu_bar = clamp_gap(b.cost_CT - b.H_mu, "C_T - H(mu_bar|m)", s.notes, s.gap_violation);
    s.gap_nu_bar = clamp_gap(b.cost_CT - b.H_nu, "C_T - H(nu_bar|m)", s.notes, s.gap_violation);
    s.I_mu = fisher_information(a.mu, a.ref);
    s.I_nu = fisher_information(a.nu, a.ref);
    s.I_mu_bar = fisher_information(b.mu, b.ref);
    s.I_nu_bar = fisher_information(b.nu, b.ref);
    return s;
}

namespace {

double correction(const StabilityIngredients& s) {
    return term(std::sqrt(s.gap_mu), s.n_mu) + term(std::sqrt(s.gap_nu), s.n_nu) +
           term(std::sqrt(s.gap_mu_bar), s.n_mu_bar) + term(std::sqrt(s.gap_nu_bar), s.n_nu_bar);
}

}  // namespace

double rhs_stab_plans(const StabilityIngredients& s) {
    return s.Hsym_mu + s.Hsym_nu + correction(s) / std::sqrt(s.E);
}

double rhs_stab_plans_fisher(const StabilityIngredients& s) {
    double t = term(std::sqrt(s.I_mu) + std::sqrt(s.gap_mu), s.n_mu) +
               term(std::sqrt(s.I_nu) + std::sqrt(s.gap_nu), s.n_nu) +
               term(std::sqrt(s.I_mu_bar) + std::sqrt(s.gap_mu_bar), s.n_mu_bar) +
               term(std::sqrt(s.I_nu_bar) + std::sqrt(s.gap_nu_bar), s.n_nu_bar);
    return t / std::sqrt(s.E);
}

double rhs_stab_cost(const StabilityIngredients& s) {
    return s.T * std::min(s.Hsym_mu, s.Hsym_nu) + s.T / std::sqrt(s.E) * correction(s);
}

double rhs_stab_cost_fisher(const StabilityIngredients& s) { return rhs_stab_plans_fisher(s); }

std::pair<InequalityReport, InequalityReport> plan_stability_check(const SchrodingerSolution& a,
                                                                   const SchrodingerSolution& b,
                                                                   const SobolevContext& ctx) {
    auto s = stability_ingredients(a, b, ctx);
    const double lhs = plan_symmetric_entropy(plan(a), plan(b));
    const std::string dg = solution_digest(a, &b);
    auto rp = make_report("stab_plans", lhs, rhs_stab_plans(s), kDefaultRule, dg);
    auto rf = make_report("stab_plans_fisher", lhs, rhs_stab_plans_fisher(s), kDefaultRule, dg);
    check_rhs(rp, recheck::rhs_stab_plans(s));
    check_rhs(rf, recheck::rhs_stab_plans_fisher(s));
    for (auto* r : {&rp, &rf}) {
        attach(*r, s);
        if (std::isinf(lhs)) r->notes.push_back("plans have different supports");
    }
    return {rp, rf};
}

std::vector<InequalityReport> cost_stability_check(const SchrodingerSolution& a, const SchrodingerSolution& b,
                                                   const SobolevContext& ctx, bool bridge,
                                                   const SolveOptions& bridge_opts) {
    auto s = stability_ingredients(a, b, ctx);
    const std::string dg = solution_digest(a, &b);
    std::vector<InequalityReport> out;
    out.push_back(make_report("stab_cost", std::abs(b.cost_ST - a.cost_ST), rhs_stab_cost(s), kDefaultRule, dg));
    check_rhs(out.back(), recheck::rhs_stab_cost(s));
    attach(out.back(), s);
    out.push_back(make_report("stab_cost_fisher", std::abs(b.cost_CT - a.cost_CT), rhs_stab_cost_fisher(s),
                              kDefaultRule, dg));
    check_rhs(out.back(), recheck::rhs_stab_cost_fisher(s));
    attach(out.back(), s);

    const bool same_mu = a.mu.weights() == b.mu.weights();
    const bool same_nu = a.nu.weights() == b.nu.weights();
    if (same_mu != same_nu) {
        // one frozen marginal: the entropy term is not needed
        double rhs = s.T / std::sqrt(s.E) * correction(s);
        out.push_back(make_report("stab_cost_one_marginal", std::abs(b.cost_ST - a.cost_ST), rhs, kDefaultRule, dg));
        attach(out.back(), s);
    } else if (!same_mu && bridge) {
        // (mu, nu) -> (mu, nu_bar) -> (mu_bar, nu_bar), each step with one marginal frozen
        auto mid = solve(a.mu, b.nu, a.kernel, a.ref, bridge_opts);
        require_converged(mid, "cost_stability_check");
        auto s1 = stability_ingredients(a, mid, ctx);
        auto s2 = stability_ingredients(mid, b, ctx);
        double rhs = s1.T / std::sqrt(s1.E) * correction(s1) + s2.T / std::sqrt(s2.E) * correction(s2);
        out.push_back(make_report("stab_cost_frozen", std::abs(b.cost_ST - a.cost_ST), rhs, kDefaultRule, dg));
        attach(out.back(), s1);
        attach(out.back(), s2);
    }
    return out;
}

EotStabilityResult quadratic_eot_stability_check(const MarginalPair& a, const MarginalPair& b, double epsilon,
                                                 const EotStabilityOptions& opts) {
    const Grid& grid = a.mu.grid();
    require_same_grid(grid, a.nu.grid(), "quadratic_eot_stability_check");
    require_same_grid(grid, b.mu.grid(), "quadratic_eot_stability_check");
    require_same_grid(grid, b.nu.grid(), "quadratic_eot_stability_check");
    const int d = grid.dim();

    auto ea = eot_quadratic_direct(a.mu, a.nu, epsilon, opts.solve);
    auto eb = eot_quadratic_direct(b.mu, b.nu, epsilon, opts.solve);
    if (!ea.converged || !eb.converged) throw NotConverged("quadratic_eot_stability_check: EOT solve did not converge");

    EotStabilityResult res;
    res.cost = ea.cost;
    res.cost_bar = eb.cost;

    auto m = marginal_terms(a.mu, a.nu, b.mu, b.nu, opts.sobolev.cg_tol);
    auto leb = ReferenceMeasure::lebesgue(grid);
    const double Hl_mu = relative_entropy(a.mu, leb), Hl_nu = relative_entropy(a.nu, leb);
    const double Hl_mub = relative_entropy(b.mu, leb), Hl_nub = relative_entropy(b.nu, leb);
    if (!std::isfinite(Hl_mu + Hl_nu + Hl_mub + Hl_nub))
        throw std::invalid_argument("quadratic_eot_stability_check: Lebesgue entropy is infinite");

    const double Ce = eot_constant(epsilon, d);
    std::vector<std::string> notes;
    bool bad = false;
    const double p_mu = clamp_gap(ea.cost + epsilon * Hl_nu + Ce, "S + eps H(nu) + C_eps", notes, bad);
    const double p_nu = clamp_gap(ea.cost + epsilon * Hl_mu + Ce, "S + eps H(mu) + C_eps", notes, bad);
    const double p_mub = clamp_gap(eb.cost + epsilon * Hl_nub + Ce, "S_bar + eps H(nu_bar) + C_eps", notes, bad);
    const double p_nub = clamp_gap(eb.cost + epsilon * Hl_mub + Ce, "S_bar + eps H(mu_bar) + C_eps", notes, bad);
    const double corr = 2 * (term(std::sqrt(p_mu), m.n_mu) + term(std::sqrt(p_nu), m.n_nu) +
                             term(std::sqrt(p_mub), m.n_mu_bar) + term(std::sqrt(p_nub), m.n_nu_bar));

    Digest dg;
    dg.add("eot").add(epsilon);
    for (const auto* p : {&a.mu, &a.nu, &b.mu, &b.nu}) dg.add(std::span<const double>(p->weights()));
    const std::string digest = dg.hex();

    const double lhs_cost = std::abs(eb.cost - ea.cost);
    const double lhs_plan = epsilon * plan_symmetric_entropy(ea.plan, eb.plan);
    res.reports.push_back(
        make_report("eot_cost_stab", lhs_cost, epsilon * std::min(m.Hsym_mu, m.Hsym_nu) + corr, kDefaultRule, digest));
    res.reports.push_back(
        make_report("eot_plan_stab", lhs_plan, epsilon * (m.Hsym_mu + m.Hsym_nu) + corr, kDefaultRule, digest));
    for (auto& r : res.reports) {
        for (const auto& n : notes) r.notes.push_back(n);
        if (bad) flag(r, "negative square-root argument beyond round-off");
    }

    const double w_ab = atom_w2(a.mu, a.nu), w_bb = atom_w2(b.mu, b.nu);
    res.small_noise_limit_rhs = 2 * w_ab * (m.n_mu + m.n_nu) + 2 * w_bb * (m.n_mu_bar + m.n_nu_bar);

    if (opts.kappa > 0) {
        auto sa = eot_via_sp(a.mu, a.nu, epsilon, opts.kappa, opts.solve);
        auto sb = eot_via_sp(b.mu, b.nu, epsilon, opts.kappa, opts.solve);
        auto s = stability_ingredients(sa.sp, sb.sp, opts.sobolev);
        const double T = sa.T;
        const double shrink = -std::expm1(-opts.kappa * T);
        const double w_mu = atom_w2(b.mu, a.mu), w_nu = atom_w2(b.nu, a.nu);
        const double moments = (std::sqrt(second_moment(b.mu)) + std::sqrt(second_moment(a.mu))) * w_mu +
                               (std::sqrt(second_moment(b.nu)) + std::sqrt(second_moment(a.nu))) * w_nu;
        auto rc = make_report("eot_cost_stab_kappa", lhs_cost,
                              epsilon / T * rhs_stab_cost(s) + shrink * moments, kDefaultRule, digest);
        check_rhs(rc, epsilon / T * recheck::rhs_stab_cost(s) + shrink * moments);
        auto rp = make_report("eot_plan_stab_kappa", lhs_plan, epsilon * rhs_stab_plans(s), kDefaultRule, digest);
        check_rhs(rp, epsilon * recheck::rhs_stab_plans(s));
        for (auto* r : {&rc, &rp}) {
            attach(*r, s);
            r->notes.push_back("kappa=" + num(opts.kappa) + " T=" + num(T));
        }
        if (std::isnan(moments)) rc.notes.push_back("W2 unavailable for this grid size");
        res.reports.push_back(std::move(rc));
        res.reports.push_back(std::move(rp));
    }
    return res;
}

}  // namespace sbridge
