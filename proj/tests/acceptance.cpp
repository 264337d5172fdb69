// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sbridge/diagnostics.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/generators.hpp"
#include "sbridge/kernels.hpp"
#include "sbridge/orlicz.hpp"
#include "sbridge/schrodinger.hpp"
#include "sbridge/sobolev.hpp"

using namespace sbridge;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Tally {
    bool ok = true;
    std::vector<std::string> failures;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
    void report(const InequalityReport& r, const std::string& where) {
        require(r.pass && !r.vacuous, where + " " + r.name + " slack=" + std::to_string(r.relative_slack));
    }
    std::string joined() const {
        std::string s;
        for (std::size_t k = 0; k < failures.size() && k < 4; ++k) s += (k ? "; " : "") + failures[k];
        if (failures.size() > 4) s += "; +" + std::to_string(failures.size() - 4) + " more";
        return s;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Grid battery_grid() { return Grid::uniform(-6.0, 6.0, 256); }

SolveOptions strict() {
    SolveOptions o;
    o.tol = 1e-9;
    o.max_iter = 100000;
    return o;
}

// 1. Schrödinger-system residual on the random pair battery.
Outcome c1() {
    Tally t;
    const Grid g = battery_grid();
    auto K = GibbsKernel::ou(g, 0.25, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::size_t max_it = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto [mu, nu] = random_pair(g, kSeed, k);
        auto s = solve(mu, nu, K, strict());
        worst = std::max(worst, s.marginal_residual);
        max_it = std::max(max_it, s.iterations);
        t.require(s.converged && s.marginal_residual <= 1e-9, "pair " + std::to_string(k));
    }
    const double secs = seconds_since(t0);
    t.require(secs <= 60, "runtime");
    return {t.ok, fmt("worst residual %.2e", worst) + ", max iterations " + std::to_string(max_it) +
                      fmt(", %.1f s", secs) + (t.ok ? "" : " | " + t.joined())};
}

// 2. SP <-> EOT dictionary on the Gaussian pair.
Outcome c2() {
    Tally t;
    const Grid g = Grid::uniform(-8.0, 10.0, 256);
    auto mu = gaussian_measure(g, {0, 0}, 1.0);
    auto nu = gaussian_measure(g, {1, 0}, 1.5);
    SolveOptions o;
    o.tol = 1e-11;
    double worst_cost = 0, worst_tv = 0, worst_kappa = 0;
    for (double eps : {0.1, 0.5, 1.0}) {
        auto direct = eot_quadratic_direct(mu, nu, eps, o);
        t.require(direct.converged, "direct eps=" + std::to_string(eps));
        double lo = INFINITY, hi = -INFINITY;
        for (double kappa : {0.5, 1.0, 2.0}) {
            auto via = eot_via_sp(mu, nu, eps, kappa, o);
            t.require(via.sp.converged, "sp solve");
            double rel = std::abs(via.cost - direct.cost) / std::abs(direct.cost);
            double tv = plan_tv_distance(plan(via.sp), direct.plan);
            worst_cost = std::max(worst_cost, rel);
            worst_tv = std::max(worst_tv, tv);
            lo = std::min(lo, via.cost);
            hi = std::max(hi, via.cost);
        }
        worst_kappa = std::max(worst_kappa, (hi - lo) / std::abs(direct.cost));
    }
    t.require(worst_cost <= 1e-6, "cost agreement");
    t.require(worst_tv <= 1e-6, "plan TV");
    t.require(worst_kappa <= 1e-5, "kappa independence");
    return {t.ok, fmt("cost rel %.2e", worst_cost) + fmt(", plan TV %.2e", worst_tv) +
                      fmt(", kappa spread %.2e", worst_kappa)};
}

// 3. Corrector estimates.
Outcome c3() {
    Tally t;
    const Grid g = battery_grid();
    double worst = INFINITY;
    for (double T : {0.1, 0.5}) {
        auto K = GibbsKernel::ou(g, T, 1.0);
        for (std::uint64_t k = 0; k < 20; ++k) {
            auto [mu, nu] = random_pair(g, kSeed, k);
            auto s = solve(mu, nu, K, strict());
            auto [rn, rm] = corrector_check(s, 1.0);
            t.report(rn, "T=" + std::to_string(T));
            t.report(rm, "T=" + std::to_string(T));
            worst = std::min({worst, rn.relative_slack, rm.relative_slack});
        }
    }
    return {t.ok, fmt("min relative slack %.3e", worst) + (t.ok ? "" : " | " + t.joined())};
}

struct FamilyRun {
    SchrodingerSolution a, b;
};

FamilyRun solve_family(const PerturbedPairs& p, const GibbsKernel& K) {
    return {solve(p.mu, p.nu, K, strict()), solve(p.mu_bar, p.nu_bar, K, strict())};
}

// 4. Plan stability on perturbation families.
Outcome c4() {
    Tally t;
    const Grid g = battery_grid();
    auto K = GibbsKernel::ou(g, 0.25, 1.0);
    double worst = INFINITY;
    for (double eps : {0.05, 0.1, 0.2})
        for (std::uint64_t k = 0; k < 10; ++k) {
            auto fam = perturbation_family(g, kSeed + 4, k, eps, eps);
            auto run = solve_family(fam, K);
            auto [rp, rf] = plan_stability_check(run.a, run.b);
            t.report(rp, "eps=" + std::to_string(eps));
            t.report(rf, "eps=" + std::to_string(eps));
            worst = std::min({worst, rp.relative_slack, rf.relative_slack});
        }
    auto fam = perturbation_family(g, kSeed + 4, 0, 0.0, 0.0);
    auto s = solve(fam.mu, fam.nu, K, strict());
    auto [rp, rf] = plan_stability_check(s, s);
    double zero = std::max({std::abs(rp.lhs), std::abs(rp.rhs), std::abs(rf.lhs), std::abs(rf.rhs)});
    t.require(zero <= 1e-8, "zero perturbation");
    return {t.ok, fmt("min relative slack %.3f", worst) + fmt(", zero case max side %.1e", zero) +
                      (t.ok ? "" : " | " + t.joined())};
}

// 5. Cost and quadratic EOT stability.
Outcome c5() {
    Tally t;
    const Grid g = battery_grid();
    auto K = GibbsKernel::ou(g, 0.25, 1.0);
    double worst = INFINITY;
    for (double eps : {0.05, 0.1, 0.2})
        for (std::uint64_t k = 0; k < 10; ++k) {
            auto fam = perturbation_family(g, kSeed + 4, k, eps, eps);
            auto run = solve_family(fam, K);
            for (const auto& r : cost_stability_check(run.a, run.b, {}, true, strict())) {
                t.report(r, "eps=" + std::to_string(eps));
                worst = std::min(worst, r.relative_slack);
            }
            auto one = perturbation_family(g, kSeed + 4, k, 0.0, eps);
            auto run1 = solve_family(one, K);
            for (const auto& r : cost_stability_check(run1.a, run1.b)) t.report(r, "one-marginal");

            EotStabilityOptions eo;
            eo.kappa = 1.0;
            auto er = quadratic_eot_stability_check({fam.mu, fam.nu}, {fam.mu_bar, fam.nu_bar}, 0.5, eo);
            for (const auto& r : er.reports) {
                t.report(r, "eot eps=" + std::to_string(eps));
                worst = std::min(worst, r.relative_slack);
            }
        }
    // small-noise sequence along one family
    auto fam = perturbation_family(g, kSeed + 4, 0, 0.1, 0.1);
    std::vector<double> norm_slack;
    std::string seq;
    for (double e : {0.5, 0.25, 0.125}) {
        auto er = quadratic_eot_stability_check({fam.mu, fam.nu}, {fam.mu_bar, fam.nu_bar}, e);
        const auto& r = er.reports[0];
        norm_slack.push_back(r.relative_slack);
        seq += fmt2(" %.3f(%.3f)", r.relative_slack, er.small_noise_limit_rhs / r.rhs);
        if (e == 0.125)
            for (const auto& rr : er.reports) t.report(rr, "final eps");
    }
    for (std::size_t k = 1; k < norm_slack.size(); ++k)
        t.require(norm_slack[k] <= norm_slack[k - 1], "normalized slack increased");
    return {t.ok, fmt("min relative slack %.3f", worst) + ", small-noise normalized slack" + seq +
                      (t.ok ? "" : " | " + t.joined())};
}

// 6. Small-time limit of the cost.
Outcome c6() {
    Tally t;
    const Grid g = Grid::uniform(-8.0, 10.0, 512);
    auto mu = gaussian_measure(g, {0, 0}, 1.0);
    auto nu = gaussian_measure(g, {1, 0}, 1.5);
    const auto t0 = std::chrono::steady_clock::now();
    auto curve = small_time_cost_curve(mu, nu, {0.4, 0.2, 0.1, 0.05}, 1.0, strict());
    const double secs = seconds_since(t0);
    std::string gaps;
    for (const auto& r : curve.rows) {
        gaps += fmt(" %.4f", r.rel_gap);
        t.require(r.converged, "solve");
    }
    t.require(curve.monotone_gap, "gap not strictly decreasing");
    t.require(curve.rows.back().rel_gap <= 0.05, "final relative gap > 5%");
    t.require(secs <= 120, "runtime");
    return {t.ok, "relative gaps" + gaps + fmt(", %.1f s", secs) + (t.ok ? "" : " | " + t.joined())};
}

// 7. Schrödinger map against the Brenier map.
Outcome c7() {
    Tally t;
    const Grid g = Grid::uniform(-8.0, 10.0, 512);
    auto mu = gaussian_measure(g, {0, 0}, 1.0);
    auto nu = gaussian_measure(g, {1, 0}, 1.5);
    auto ex = gradient_convergence_experiment(mu, nu, {0.4, 0.2, 0.1, 0.05, 0.025}, 1.0, strict(),
                                              [](double x) { return 1.0 + 1.5 * x; });
    std::string errs;
    for (const auto& r : ex.rows) errs += fmt(" %.4f", r.l2_error);
    t.require(ex.decreasing, "errors not strictly decreasing");
    const double ratio = ex.rows.back().l2_error / ex.rows.front().l2_error;
    t.require(ratio <= 0.2, "final/initial > 20%");

    const Grid gc = Grid::uniform(-6.0, 6.0, 384);
    auto m = gaussian_measure(gc, {0.25, 0}, 1.0);
    const double dx = gc.max_width();
    const double Tmin = 2 * dx * dx;  // smallest T passing the bandwidth guard
    auto ctl = gradient_convergence_experiment(m, m, {Tmin}, 1.0, strict(), [](double x) { return x; });
    const double ctl_err = ctl.rows.back().l2_error;
    t.require(ctl_err < 1e-3, "control error");
    return {t.ok, "errors" + errs + fmt(", ratio %.3f", ratio) + fmt2(", control %.2e at T=%.5f", ctl_err, Tmin) +
                      (t.ok ? "" : " | " + t.joined())};
}

// 8. Dynamic cost identity and Grönwall decay.
Outcome c8() {
    Tally t;
    const Grid g = Grid::uniform(-8.0, 10.0, 512);
    auto mu = gaussian_measure(g, {0, 0}, 1.0);
    auto nu = gaussian_measure(g, {1, 0}, 1.5);
    auto s = solve(mu, nu, GibbsKernel::ou(g, 0.5, 1.0), strict());
    auto d64 = dynamic_cost_check(s, 64);
    auto d128 = dynamic_cost_check(s, 128);
    t.report(d64.report, "64 slices");
    t.require(d128.relative_gap <= d64.relative_gap, "refinement");
    auto gr = gronwall_decay_check(s, 1.0, 32);
    t.report(gr.decay, "kappa=1");

    const Grid g0 = Grid::uniform(-8.0, 10.0, 256);
    auto mu0 = gaussian_measure(g0, {0, 0}, 1.0);
    auto nu0 = gaussian_measure(g0, {1, 0}, 1.5);
    auto s0 = solve(mu0, nu0, GibbsKernel::heat(g0, 0.5), strict());
    auto gr0 = gronwall_decay_check(s0, 0.0, 64);
    t.report(gr0.monotone, "kappa=0");
    t.report(gr0.decay, "kappa=0");
    return {t.ok, fmt2("gap %.2e at 64, %.2e at 128", d64.relative_gap, d128.relative_gap) +
                      fmt(", kappa=0 max relative increase %.2e", gr0.monotone.lhs) +
                      (t.ok ? "" : " | " + t.joined())};
}

// 9. H^-1 against W2.
Outcome c9() {
    Tally t;
    const Grid g = battery_grid();
    double worst = INFINITY;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const double eps = 0.05 + 0.15 * static_cast<double>(k % 4) / 3.0;
        auto fam = perturbation_family(g, kSeed + 9, k, eps, 0.0);
        auto r = w2_h_minus_one_comparison(fam.mu, fam.mu_bar);
        t.report(r, "instance " + std::to_string(k));
        worst = std::min(worst, r.relative_slack);
    }
    double lp_gap = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        auto rng = battery_stream(kSeed + 90, k);
        const std::size_t n = 8 + rng() % 40;
        const Grid gc = Grid::uniform(-3.0, 3.0, n);
        auto a = random_positive_measure(gc, rng);
        auto b = random_positive_measure(gc, rng);
        lp_gap = std::max(lp_gap, std::abs(wasserstein2_1d(a, b) - wasserstein2_exact_small(a, b)));
    }
    t.require(lp_gap <= 1e-8, "quantile vs LP");
    const Grid two = Grid::uniform(-0.5, 1.5, 2);
    DiscreteMeasure half(two, {0.5, 0.5});
    const double s = 0.3;
    double h = h_minus_one_norm(SignedMeasure{two, {s, -s}}, half);
    const double closed = std::sqrt(2.0) * s;
    t.require(std::abs(h - closed) <= 1e-10, "two-cell closed form");
    return {t.ok, fmt("min relative slack %.3f", worst) + fmt(", quantile/LP max diff %.1e", lp_gap) +
                      fmt(", two-cell error %.1e", std::abs(h - closed)) + (t.ok ? "" : " | " + t.joined())};
}

// 10. Orlicz identities and log-integrability bounds.
Outcome c10() {
    Tally t;
    double id_err = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        auto rng = battery_stream(kSeed + 10, k);
        auto c = random_orlicz_context(rng, 8 + rng() % 57, OrliczFlavor::General);
        std::vector<double> dens(c.h.size());
        for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = c.p_meas[i] / c.base[i];
        double H = relative_entropy(c.p_meas, c.base);
        double n = luxemburg_norm(dens, c.base, YoungFunction::ThetaStar);
        id_err = std::max(id_err, std::abs(n - std::exp(H - 1)));
    }
    t.require(id_err <= 1e-6, "theta* identity");

    std::size_t count = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        auto rng = battery_stream(kSeed + 100, k);
        const std::size_t n = 4 + rng() % 61;
        auto gen = random_orlicz_context(rng, n, OrliczFlavor::General);
        t.report(log_integrability_bound(gen, LogBoundVariant::B1), "seed " + std::to_string(k));
        t.report(log_integrability_bound(gen, LogBoundVariant::B1NoMeasure), "seed " + std::to_string(k));
        auto low = random_orlicz_context(rng, n, OrliczFlavor::ExponentAtMostOne);
        t.report(log_integrability_bound(low, LogBoundVariant::Final), "seed " + std::to_string(k));
        auto up = random_orlicz_context(rng, n, OrliczFlavor::AllAboveOne);
        t.report(log_integrability_bound(up, LogBoundVariant::Extreme), "seed " + std::to_string(k));
        auto down = random_orlicz_context(rng, n, OrliczFlavor::AllBelowOne);
        t.report(log_integrability_bound(down, LogBoundVariant::Extreme), "seed " + std::to_string(k));
        count += 5;
    }
    const Grid two = Grid::uniform(0.0, 1.0, 2);
    OrliczContext c{DiscreteMeasure(two, {0.5, 0.5}), {2.0, 0.5}, DiscreteMeasure(two, {0.75, 0.25}), 1, 1};
    for (auto v : {LogBoundVariant::B1, LogBoundVariant::B1NoMeasure, LogBoundVariant::Final}) {
        auto r = log_integrability_bound(c, v);
        t.report(r, "two-cell");
        t.require(std::abs(r.lhs - std::log(2.0)) <= 1e-12, "two-cell lhs");
        ++count;
    }
    return {t.ok, fmt("theta* identity max error %.1e", id_err) + ", " + std::to_string(count) +
                      " bound reports" + (t.ok ? "" : " | " + t.joined())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"schrodinger system residual", c1},   {"sp/eot dictionary", c2},
        {"corrector estimates", c3},           {"plan stability", c4},
        {"cost and eot stability", c5},        {"small-time cost limit", c6},
        {"schrodinger vs brenier map", c7},    {"dynamic cost and gronwall", c8},
        {"h^-1 vs w2", c9},                    {"orlicz bounds", c10},
    };
    std::set<int> only;
    for (int k = 1; k < argc; ++k) only.insert(std::stoi(argv[k]));
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s  %2d  %-30s %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
