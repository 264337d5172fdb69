#include "sbridge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbridge/diagnostics.hpp"
#include "sbridge/kernels.hpp"
#include "sbridge/sobolev.hpp"

namespace sbridge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> propagate(const SchrodingerSolution& sol, const std::vector<double>& log_h, double t,
                              std::string& warning) {
    if (t == 0) return log_h;
    auto K = GibbsKernel::same_kind(sol.kernel, t);
    if (!K.warning().empty() && warning.empty()) warning = K.warning();
    return apply_semigroup(K, log_h, sol.ref);
}

void require_converged(const SchrodingerSolution& s, const char* what) {
    if (!s.converged) throw NotConverged(std::string(what) + ": solution did not converge");
}

}  // namespace

Slice interpolation_slice(const SchrodingerSolution& sol, double t) {
    const double T = sol.T();
    if (!(t >= 0 && t <= T)) throw std::invalid_argument("interpolation_slice: t outside [0, T]");
    Slice s;
    s.t = t;
    s.log_Ptf = propagate(sol, log_f(sol), t, s.warning);
    auto b = propagate(sol, log_g(sol), T - t, s.warning);
    const auto& lm = sol.ref.log_mass();
    s.rho.assign(lm.size(), 0.0);
    for (std::size_t i = 0; i < lm.size(); ++i) {
        if (s.log_Ptf[i] == kNegInf || b[i] == kNegInf) continue;
        s.rho[i] = std::exp(s.log_Ptf[i] + b[i] + lm[i]);
    }
    return s;
}

EntropicInterpolation interpolate(const SchrodingerSolution& sol, std::size_t n_times) {
    require_converged(sol, "interpolate");
    if (n_times < 2) throw std::invalid_argument("interpolate: need at least two times");
    EntropicInterpolation out;
    out.source_digest = solution_digest(sol);
    const double T = sol.T();
    for (std::size_t k = 0; k < n_times; ++k) {
        double t = k + 1 == n_times ? T : T * static_cast<double>(k) / static_cast<double>(n_times - 1);
        auto s = interpolation_slice(sol, t);
        out.times.push_back(t);
        out.densities.push_back(std::move(s.rho));
        if (!s.warning.empty()) out.warnings.push_back("t=" + std::to_string(t) + ": " + s.warning);
    }
    return out;
}

double corrector_energy(const SchrodingerSolution& sol, const Slice& s) {
    const Grid& g = sol.kernel.grid();
    std::vector<char> defined(s.log_Ptf.size());
    for (std::size_t i = 0; i < defined.size(); ++i) defined[i] = std::isfinite(s.log_Ptf[i]);
    auto grad = gradient(g, s.log_Ptf, defined);
    double a = 0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (s.rho[i] <= 0) continue;
        double g2 = 0;
        for (int d = 0; d < g.dim(); ++d) g2 += grad[i][d] * grad[i][d];
        a += s.rho[i] * g2;
    }
    return a;
}

DynamicCost dynamic_cost_check(const SchrodingerSolution& sol, std::size_t n_times) {
    require_converged(sol, "dynamic_cost_check");
    if (n_times < 16) throw std::invalid_argument("dynamic_cost_check: need at least 16 time slices");
    const double T = sol.T();
    const double dt = T / static_cast<double>(n_times);
    DynamicCost out;
    double integral = 0;
    for (std::size_t k = 0; k < n_times; ++k) {
        auto s = interpolation_slice(sol, (static_cast<double>(k) + 0.5) * dt);
        integral += dt * corrector_energy(sol, s);
        if (!s.warning.empty()) out.warnings.push_back("t=" + std::to_string(s.t) + ": " + s.warning);
    }
    out.cost = sol.cost_CT;
    out.quadrature = sol.H_nu + integral;
    out.relative_gap = std::abs(out.quadrature - out.cost) / std::max(std::abs(out.cost), 1e-300);
    Digest d;
    d.add(solution_digest(sol)).add(static_cast<std::uint64_t>(n_times));
    out.report = make_report("bbs_identity", out.relative_gap, 0.02, PassRule{0, 0}, d.hex());
    if (!out.warnings.empty()) out.report.notes.push_back("under-resolved: bandwidth guard fired at small t");
    return out;
}

GronwallResult gronwall_decay_check(const SchrodingerSolution& sol, double kappa, std::size_t n_times) {
    require_converged(sol, "gronwall_decay_check");
    if (n_times < 2) throw std::invalid_argument("gronwall_decay_check: need at least two times");
    const double T = sol.T();
    GronwallResult out;
    for (std::size_t k = 1; k <= n_times; ++k) {
        double t = k == n_times ? T : T * static_cast<double>(k) / static_cast<double>(n_times);
        auto s = interpolation_slice(sol, t);
        out.times.push_back(t);
        out.alpha.push_back(corrector_energy(sol, s));
        if (!s.warning.empty()) out.warnings.push_back("t=" + std::to_string(t) + ": " + s.warning);
    }
    const double aT = out.alpha.back();
    Digest d;
    d.add(solution_digest(sol)).add(kappa).add(static_cast<std::uint64_t>(n_times));

    std::size_t worst = out.alpha.size() - 1;
    double worst_rel = std::numeric_limits<double>::infinity();
    // the last mesh point is t = T, where both sides coincide
    for (std::size_t k = 0; k + 1 < out.alpha.size(); ++k) {
        double lhs = std::exp(2 * kappa * (T - out.times[k])) * aT;
        double rel = (out.alpha[k] - lhs) / std::max(std::abs(out.alpha[k]), 1e-300);
        if (rel < worst_rel) {
            worst_rel = rel;
            worst = k;
        }
    }
    out.decay = make_report("gronwall_decay", std::exp(2 * kappa * (T - out.times[worst])) * aT, out.alpha[worst],
                            kDefaultRule, d.hex());
    out.decay.notes.push_back("tightest at t=" + std::to_string(out.times[worst]));

    // e^{2 kappa t} alpha(t) should not increase; tiny values are compared
    // against the curve's scale so round-off near zero does not count.
    double scale = 0;
    for (std::size_t k = 0; k < out.alpha.size(); ++k)
        scale = std::max(scale, std::exp(2 * kappa * out.times[k]) * out.alpha[k]);
    double max_inc = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < out.alpha.size(); ++k) {
        double a = std::exp(2 * kappa * out.times[k]) * out.alpha[k];
        double b = std::exp(2 * kappa * out.times[k + 1]) * out.alpha[k + 1];
        max_inc = std::max(max_inc, (b - a) / std::max(a, 1e-12 * scale + 1e-300));
    }
    if (out.alpha.size() < 2) max_inc = 0;
    out.monotone = make_report("gronwall_monotone", max_inc, 1e-3, PassRule{0, 0}, d.hex());
    if (!out.warnings.empty()) {
        out.decay.notes.push_back("under-resolved: bandwidth guard fired at small t");
        out.monotone.notes.push_back("under-resolved: bandwidth guard fired at small t");
    }
    return out;
}

SmallTimeCurve small_time_cost_curve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const std::vector<double>& T_list, double kappa, const SolveOptions& opts) {
    require_same_grid(mu.grid(), nu.grid(), "small_time_cost_curve");
    if (mu.grid().dim() != 1) throw std::invalid_argument("small_time_cost_curve: 1d marginals only");
    for (std::size_t k = 1; k < T_list.size(); ++k)
        if (!(T_list[k] < T_list[k - 1])) throw std::invalid_argument("small_time_cost_curve: T_list must decrease");
    const double w2 = wasserstein2_1d(mu, nu, 0, Representation::Cells);
    SmallTimeCurve out;
    for (double T : T_list) {
        auto K = kappa > 0 ? GibbsKernel::ou(mu.grid(), T, kappa) : GibbsKernel::heat(mu.grid(), T);
        auto sol = solve(mu, nu, K, opts);
        SmallTimeRow r;
        r.T = T;
        r.TC = T * sol.cost_CT;
        r.w2_sq_4 = 0.25 * w2 * w2;
        r.gap = std::abs(r.TC - r.w2_sq_4);
        r.rel_gap = r.w2_sq_4 > 0 ? r.gap / r.w2_sq_4 : r.gap;
        r.guard_ok = bandwidth_ok(mu.grid(), T);
        r.iterations = sol.iterations;
        r.converged = sol.converged;
        out.rows.push_back(r);
    }
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        if (!(out.rows[k].gap < out.rows[k - 1].gap)) out.monotone_gap = false;
    return out;
}

std::vector<double> brenier_map_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_grid(mu.grid(), nu.grid(), "brenier_map_1d");
    const Grid& g = mu.grid();
    if (g.dim() != 1) throw std::invalid_argument("brenier_map_1d: 1d only");
    const std::size_t n = g.size();
    // cell edges and the cumulative distribution of nu at them
    std::vector<double> edge(n + 1), Fnu(n + 1, 0.0);
    edge[0] = g.nodes(0)[0] - 0.5 * g.width(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
        edge[j + 1] = g.nodes(0)[j] + 0.5 * g.width(0, j);
        Fnu[j + 1] = Fnu[j] + nu[j];
    }
    auto quantile = [&](double u) {
        std::size_t j = std::upper_bound(Fnu.begin() + 1, Fnu.end(), u) - Fnu.begin() - 1;
        j = std::min(j, n - 1);
        while (j + 1 < n && nu[j] == 0) ++j;
        if (nu[j] == 0) return edge[j + 1];
        double frac = std::clamp((u - Fnu[j]) / nu[j], 0.0, 1.0);
        return edge[j] + frac * (edge[j + 1] - edge[j]);
    };
    std::vector<double> out;
    double F = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i] > 0) out.push_back(quantile(F + 0.5 * mu[i]));
        F += mu[i];
    }
    return out;
}

GradientExperiment gradient_convergence_experiment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                                   const std::vector<double>& T_list, double kappa,
                                                   const SolveOptions& opts, std::function<double(double)> brenier) {
    require_same_grid(mu.grid(), nu.grid(), "gradient_convergence_experiment");
    const Grid& g = mu.grid();
    if (g.dim() != 1) throw std::invalid_argument("gradient_convergence_experiment: 1d only");
    const auto mask = support_mask(mu.weights());
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (mu[i] > 0) {
            xs.push_back(g.nodes(0)[i]);
            ws.push_back(mu[i]);
        }
    std::vector<double> bmap;
    if (brenier) {
        for (double x : xs) bmap.push_back(brenier(x));
    } else {
        bmap = brenier_map_1d(mu, nu);
    }
    std::vector<double> ys, vs;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (nu[j] > 0) {
            ys.push_back(g.nodes(0)[j]);
            vs.push_back(nu[j]);
        }

    GradientExperiment out;
    for (double T : T_list) {
        auto K = kappa > 0 ? GibbsKernel::ou(g, T, kappa) : GibbsKernel::heat(g, T);
        auto sol = solve(mu, nu, K, opts);
        auto grad = gradient(g, sol.phi, mask);
        GradientRow row;
        row.T = T;
        row.guard_ok = bandwidth_ok(g, T);
        row.converged = sol.converged;
        row.maps.x = xs;
        row.maps.brenier_map = bmap;
        double err = 0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(mu[i] > 0)) continue;
            double s = xs[k] - 2 * T * grad[i][0];
            row.maps.schrodinger_map.push_back(s);
            err += ws[k] * (s - bmap[k]) * (s - bmap[k]);
            ++k;
        }
        row.l2_error = row.maps.l2_error = std::sqrt(err);
        row.pushforward_w2 = row.maps.pushforward_w2 =
            wasserstein2_points_1d(row.maps.schrodinger_map, ws, ys, vs);
        out.rows.push_back(std::move(row));
    }
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        if (!(out.rows[k].l2_error < out.rows[k - 1].l2_error)) out.decreasing = false;
    return out;
}

}  // namespace sbridge
