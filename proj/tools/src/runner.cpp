#include "sbridge_tools/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sbridge/diagnostics.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/kernels.hpp"
#include "sbridge/orlicz.hpp"
#include "sbridge/schrodinger.hpp"
#include "sbridge/serialize.hpp"
#include "sbridge/sobolev.hpp"

namespace sbridge::tools {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kAssumptions =
    "integrability condition (I) on the reference is assumed, not checked on grids; "
    "marginals are mollified densities bounded below on their support (grid analog of H2, bounded-density branch)";

// Everything a scenario produces, in declaration order.
struct Sink {
    std::vector<InequalityReport> reports;
    std::vector<json> tables;
};

std::string describe_kernel(const ExperimentConfig& c) {
    std::ostringstream os;
    os << c.kernel.kind;
    if (c.kernel.T > 0) os << " T=" << c.kernel.T;
    if (c.kernel.kind == "ou" || c.kernel.kappa > 0) os << " kappa=" << c.kernel.kappa;
    return os.str();
}

class Csv {
public:
    Csv(const ExperimentConfig& cfg, const std::string& digest, const std::string& name) : path_(name) {
        out_.open(fs::path(cfg.out_dir) / name);
        out_ << "# scenario=" << cfg.scenario << "; grid=" << make_grid(cfg.grid).describe()
             << "; kernel=" << describe_kernel(cfg) << "; tol=" << cfg.tol << "; cg_tol=" << cfg.cg_tol
             << "; seed=" << (cfg.seed ? std::to_string(*cfg.seed) : "none") << "; config_digest=" << digest << '\n';
        out_ << std::setprecision(12);
    }
    std::ofstream& os() { return out_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

json table_line(const std::string& name, const std::string& path, std::size_t rows) {
    json j;
    j["kind"] = "table";
    j["name"] = name;
    j["path"] = path;
    j["rows"] = rows;
    return j;
}

SolveOptions solve_opts(const ExperimentConfig& c) {
    SolveOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    return o;
}

GibbsKernel make_kernel(const ExperimentConfig& c, const Grid& g, double T) {
    return c.kernel.kind == "heat" ? GibbsKernel::heat(g, T) : GibbsKernel::ou(g, T, c.kernel.kappa);
}

double curvature(const ExperimentConfig& c) { return c.kernel.kind == "heat" ? 0.0 : c.kernel.kappa; }

std::uint64_t seed_of(const ExperimentConfig& c) { return c.seed.value_or(0); }

SchrodingerSolution solve_checked(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GibbsKernel& K,
                                  const ExperimentConfig& c, const std::string& what) {
    auto s = solve(mu, nu, K, solve_opts(c));
    if (!s.converged)
        throw NotConverged(what + ": solver stopped after " + std::to_string(s.iterations) +
                           " iterations with residual " + std::to_string(s.marginal_residual));
    return s;
}

std::pair<DiscreteMeasure, DiscreteMeasure> base_pair(const ExperimentConfig& c, const Grid& g, std::size_t item) {
    if (c.mu && c.nu) return {make_marginal(*c.mu, g, seed_of(c)), make_marginal(*c.nu, g, seed_of(c))};
    return random_pair(g, seed_of(c), item);
}

PerturbedPairs family(const ExperimentConfig& c, const Grid& g, std::size_t item, double eps) {
    const double em = c.perturb == "nu" ? 0.0 : eps;
    const double en = c.perturb == "mu" ? 0.0 : eps;
    if (!(c.mu && c.nu)) return perturbation_family(g, seed_of(c), item, em, en);
    auto [mu, nu] = base_pair(c, g, item);
    auto rng = battery_stream(seed_of(c), item);
    auto h = random_perturbation_direction(mu, rng);
    auto k = random_perturbation_direction(nu, rng);
    auto mub = em == 0 ? mu : perturb(mu, h, em);
    auto nub = en == 0 ? nu : perturb(nu, k, en);
    return {mu, nu, mub, nub};
}

void tag(std::vector<InequalityReport>& rs, const std::string& note) {
    for (auto& r : rs) r.notes.push_back(note);
}

std::string label(std::size_t item, double eps) {
    std::ostringstream os;
    os << "item=" << item << " eps=" << eps;
    return os.str();
}

// scenarios ---------------------------------------------------------------

void run_solve(const ExperimentConfig& c, const std::string& digest, Sink& sink) {
    const Grid g = make_grid(c.grid);
    auto [mu, nu] = base_pair(c, g, 0);
    auto s = solve_checked(mu, nu, make_kernel(c, g, c.kernel.T), c, "solve");
    {
        std::ofstream out(fs::path(c.out_dir) / "solution.json");
        out << solution_json(s) << '\n';
    }
    Csv pot(c, digest, "potentials.csv");
    write_potentials_csv(pot.os(), s);
    sink.tables.push_back(table_line("solution", "solution.json", 1));
    sink.tables.push_back(table_line("potentials", pot.path(), g.size()));
    auto r = make_report("solve_residual", s.marginal_residual, c.tol, PassRule{0, 0}, solution_digest(s));
    r.notes.push_back("iterations=" + std::to_string(s.iterations));
    sink.reports.push_back(std::move(r));
}

void run_corrector(const ExperimentConfig& c, const std::string&, Sink& sink) {
    const Grid g = make_grid(c.grid);
    std::vector<double> Ts = c.T_list.empty() ? std::vector<double>{c.kernel.T} : c.T_list;
    for (double T : Ts) {
        auto K = make_kernel(c, g, T);
        auto batch = ordered_map(c.count, c.threads, [&](std::size_t k) {
            auto [mu, nu] = base_pair(c, g, k);
            auto s = solve_checked(mu, nu, K, c, "corrector item " + std::to_string(k));
            auto [a, b] = corrector_check(s, curvature(c));
            std::vector<InequalityReport> v{a, b};
            tag(v, "item=" + std::to_string(k) + " T=" + std::to_string(T));
            return v;
        });
        for (auto& v : batch) sink.reports.insert(sink.reports.end(), v.begin(), v.end());
    }
}

template <class Check>
void run_family_battery(const ExperimentConfig& c, Sink& sink, Check check) {
    const Grid g = make_grid(c.grid);
    auto K = make_kernel(c, g, c.kernel.T);
    for (double eps : c.eps) {
        auto batch = ordered_map(c.count, c.threads, [&](std::size_t k) {
            auto f = family(c, g, k, eps);
            auto a = solve_checked(f.mu, f.nu, K, c, label(k, eps));
            auto b = solve_checked(f.mu_bar, f.nu_bar, K, c, label(k, eps));
            auto v = check(a, b);
            tag(v, label(k, eps) + " marginals=" + c.perturb);
            return v;
        });
        for (auto& v : batch) sink.reports.insert(sink.reports.end(), v.begin(), v.end());
    }
}

void run_stability(const ExperimentConfig& c, const std::string&, Sink& sink) {
    SobolevContext ctx{c.cg_tol};
    run_family_battery(c, sink, [&](const SchrodingerSolution& a, const SchrodingerSolution& b) {
        auto [p, f] = plan_stability_check(a, b, ctx);
        return std::vector<InequalityReport>{p, f};
    });
}

void run_cost_stability(const ExperimentConfig& c, const std::string&, Sink& sink) {
    SobolevContext ctx{c.cg_tol};
    run_family_battery(c, sink, [&](const SchrodingerSolution& a, const SchrodingerSolution& b) {
        return cost_stability_check(a, b, ctx, true, solve_opts(c));
    });
}

void run_eot_stability(const ExperimentConfig& c, const std::string& digest, Sink& sink) {
    const Grid g = make_grid(c.grid);
    EotStabilityOptions eo;
    eo.solve = solve_opts(c);
    eo.sobolev.cg_tol = c.cg_tol;
    eo.kappa = c.kernel.kind == "ou" ? c.kernel.kappa : 0.0;
    Csv csv(c, digest, "eot_stability.csv");
    csv.os() << "epsilon,eps,item,lhs,rhs,normalized_slack,small_noise_limit_rhs\n";
    std::size_t rows = 0;
    for (double e : c.epsilon)
        for (double eps : c.eps) {
            auto batch = ordered_map(c.count, c.threads, [&](std::size_t k) {
                auto f = family(c, g, k, eps);
                auto res = quadratic_eot_stability_check({f.mu, f.nu}, {f.mu_bar, f.nu_bar}, e, eo);
                tag(res.reports, label(k, eps) + " epsilon=" + std::to_string(e));
                return res;
            });
            for (std::size_t k = 0; k < batch.size(); ++k) {
                const auto& r = batch[k].reports.front();
                csv.os() << e << ',' << eps << ',' << k << ',' << r.lhs << ',' << r.rhs << ',' << r.relative_slack
                         << ',' << batch[k].small_noise_limit_rhs << '\n';
                ++rows;
                sink.reports.insert(sink.reports.end(), batch[k].reports.begin(), batch[k].reports.end());
            }
        }
    sink.tables.push_back(table_line("eot_stability", csv.path(), rows));
}

void run_smalltime(const ExperimentConfig& c, const std::string& digest, Sink& sink) {
    const Grid g = make_grid(c.grid);
    auto [mu, nu] = base_pair(c, g, 0);
    auto curve = small_time_cost_curve(mu, nu, c.T_list, curvature(c), solve_opts(c));
    Csv csv(c, digest, "smalltime.csv");
    csv.os() << "T,T_C_T,W2sq_over_4,gap,rel_gap,guard_ok,iterations\n";
    for (const auto& r : curve.rows) {
        if (!r.converged) throw NotConverged("smalltime: solve at T=" + std::to_string(r.T) + " did not converge");
        csv.os() << r.T << ',' << r.TC << ',' << r.w2_sq_4 << ',' << r.gap << ',' << r.rel_gap << ','
                 << (r.guard_ok ? "true" : "false") << ',' << r.iterations << '\n';
    }
    auto t = table_line("smalltime", csv.path(), curve.rows.size());
    t["monotone_gap"] = curve.monotone_gap;
    sink.tables.push_back(std::move(t));
}

void run_gradient_map(const ExperimentConfig& c, const std::string& digest, Sink& sink) {
    const Grid g = make_grid(c.grid);
    auto [mu, nu] = base_pair(c, g, 0);
    std::function<double(double)> oracle;
    if (c.mu->family == "gaussian" && c.nu->family == "gaussian") {
        const double a = c.mu->mean[0], s = c.mu->sigma, b = c.nu->mean[0], t = c.nu->sigma;
        oracle = [=](double x) { return b + t / s * (x - a); };
    }
    auto ex = gradient_convergence_experiment(mu, nu, c.T_list, curvature(c), solve_opts(c), oracle);
    Csv csv(c, digest, "gradient_map.csv");
    csv.os() << "T,l2_error,pushforward_w2,guard_ok\n";
    Csv maps(c, digest, "maps.csv");
    maps.os() << "T,x,schrodinger_map,brenier_map\n";
    std::size_t map_rows = 0;
    for (const auto& r : ex.rows) {
        if (!r.converged) throw NotConverged("gradient-map: solve at T=" + std::to_string(r.T) + " did not converge");
        csv.os() << r.T << ',' << r.l2_error << ',' << r.pushforward_w2 << ',' << (r.guard_ok ? "true" : "false")
                 << '\n';
        for (std::size_t i = 0; i < r.maps.x.size(); ++i, ++map_rows)
            maps.os() << r.T << ',' << r.maps.x[i] << ',' << r.maps.schrodinger_map[i] << ','
                      << r.maps.brenier_map[i] << '\n';
    }
    auto t = table_line("gradient_map", csv.path(), ex.rows.size());
    t["decreasing"] = ex.decreasing;
    t["brenier"] = oracle ? "affine oracle" : "quantile map";
    sink.tables.push_back(std::move(t));
    sink.tables.push_back(table_line("maps", maps.path(), map_rows));
}

void run_interpolate(const ExperimentConfig& c, const std::string& digest, Sink& sink) {
    const Grid g = make_grid(c.grid);
    auto [mu, nu] = base_pair(c, g, 0);
    auto s = solve_checked(mu, nu, make_kernel(c, g, c.kernel.T), c, "interpolate");
    auto in = interpolate(s, c.n_times);
    Csv csv(c, digest, "interpolation.csv");
    csv.os() << (g.dim() == 1 ? "t,x,mass\n" : "t,x,y,mass\n");
    for (std::size_t k = 0; k < in.times.size(); ++k)
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto p = g.point(i);
            csv.os() << in.times[k] << ',' << p[0];
            if (g.dim() == 2) csv.os() << ',' << p[1];
            csv.os() << ',' << in.densities[k][i] << '\n';
        }
    auto t = table_line("interpolation", csv.path(), in.times.size() * g.size());
    if (!in.warnings.empty()) t["warnings"] = in.warnings;
    sink.tables.push_back(std::move(t));
    if (c.n_times >= 16) sink.reports.push_back(dynamic_cost_check(s, c.n_times).report);
    auto gr = gronwall_decay_check(s, curvature(c), c.n_times);
    sink.reports.push_back(gr.decay);
    sink.reports.push_back(gr.monotone);
}

void run_sobolev(const ExperimentConfig& c, const std::string&, Sink& sink) {
    const Grid g = make_grid(c.grid);
    for (double eps : c.eps) {
        auto batch = ordered_map(c.count, c.threads, [&](std::size_t k) {
            auto f = family(c, g, k, eps);
            auto r = w2_h_minus_one_comparison(f.mu, f.mu_bar);
            r.notes.push_back(label(k, eps));
            return r;
        });
        sink.reports.insert(sink.reports.end(), batch.begin(), batch.end());
    }
}

void run_orlicz(const ExperimentConfig& c, const std::string&, Sink& sink) {
    auto has = [&](const char* v) { return std::find(c.variants.begin(), c.variants.end(), v) != c.variants.end(); };
    auto batch = ordered_map(c.count, c.threads, [&](std::size_t k) {
        auto rng = battery_stream(seed_of(c), k);
        std::vector<InequalityReport> v;
        auto gen = random_orlicz_context(rng, c.cells, OrliczFlavor::General);
        if (has("b1")) v.push_back(log_integrability_bound(gen, LogBoundVariant::B1));
        if (has("b1_no_measure")) v.push_back(log_integrability_bound(gen, LogBoundVariant::B1NoMeasure));
        if (has("final"))
            v.push_back(log_integrability_bound(random_orlicz_context(rng, c.cells, OrliczFlavor::ExponentAtMostOne),
                                                LogBoundVariant::Final));
        if (has("extreme")) {
            auto flavor = k % 2 ? OrliczFlavor::AllBelowOne : OrliczFlavor::AllAboveOne;
            v.push_back(log_integrability_bound(random_orlicz_context(rng, c.cells, flavor), LogBoundVariant::Extreme));
        }
        if (has("young")) {
            std::vector<double> f(gen.h.size()), d(gen.h.size());
            for (std::size_t i = 0; i < f.size(); ++i) {
                f[i] = std::log(gen.h[i]);
                d[i] = gen.p_meas[i] / gen.base[i];
            }
            v.push_back(orlicz_young_check(f, d, gen.base));
        }
        tag(v, "item=" + std::to_string(k));
        return v;
    });
    for (auto& v : batch) sink.reports.insert(sink.reports.end(), v.begin(), v.end());
}

using Scenario = void (*)(const ExperimentConfig&, const std::string&, Sink&);

Scenario lookup(const std::string& name) {
    if (name == "solve") return run_solve;
    if (name == "corrector") return run_corrector;
    if (name == "stability") return run_stability;
    if (name == "cost-stability") return run_cost_stability;
    if (name == "eot-stability") return run_eot_stability;
    if (name == "smalltime") return run_smalltime;
    if (name == "gradient-map") return run_gradient_map;
    if (name == "interpolate") return run_interpolate;
    if (name == "sobolev") return run_sobolev;
    if (name == "orlicz") return run_orlicz;
    throw ConfigError("unknown scenario " + name);
}

void write_outputs(const ExperimentConfig& c, const std::string& digest, const std::string& timestamp,
                   const Sink& sink, const RunOutcome& out) {
    std::ofstream jl(fs::path(c.out_dir) / "report.jsonl");
    json h;
    h["kind"] = "header";
    h["scenario"] = c.scenario;
    h["config_digest"] = digest;
    h["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    h["timestamp"] = timestamp;
    h["assumptions"] = kAssumptions;
    jl << h.dump() << '\n';
    for (auto t : sink.tables) {
        t["config_digest"] = digest;
        jl << t.dump() << '\n';
    }
    for (const auto& r : sink.reports) jl << to_json(r, digest) << '\n';
    if (out.exit_code == kNonConvergence) {
        json e;
        e["kind"] = "error";
        e["message"] = out.message;
        e["config_digest"] = digest;
        jl << e.dump() << '\n';
    }

    std::ofstream sm(fs::path(c.out_dir) / "summary.txt");
    sm << "scenario " << c.scenario << ", config " << digest << ", seed "
       << (c.seed ? std::to_string(*c.seed) : "none") << '\n';
    write_summary(sm, sink.reports);
    for (const auto& t : sink.tables) sm << "table " << t["name"].get<std::string>() << ": " << t["path"].get<std::string>() << '\n';
    if (!out.message.empty()) sm << out.message << '\n';
}

}  // namespace

RunOutcome run(const ExperimentConfig& cfg, const std::string& timestamp) {
    fs::create_directories(cfg.out_dir);
    const std::string digest = config_digest(cfg);
    Sink sink;
    RunOutcome out;
    try {
        lookup(cfg.scenario)(cfg, digest, sink);
    } catch (const NotConverged& e) {
        out.exit_code = kNonConvergence;
        out.message = e.what();
    }
    if (out.exit_code == kAllPass) {
        std::string failing;
        for (const auto& r : sink.reports)
            if (!r.pass) failing += (failing.empty() ? "" : ", ") + r.name;
        if (!failing.empty()) {
            out.exit_code = kInequalityFailure;
            out.message = "failing reports: " + failing;
        }
    }
    out.reports = sink.reports;
    write_outputs(cfg, digest, timestamp, sink, out);
    return out;
}

}  // namespace sbridge::tools
