#include "sbridge_tools/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sbridge/kernels.hpp"
#include "sbridge/report.hpp"

namespace sbridge::tools {

namespace {

using Level = Diagnostic::Level;

const std::set<std::string> kTopLevel = {"scenario", "seed",    "grid",    "kernel",     "marginals", "perturbation",
                                         "T_list",   "epsilon", "battery", "tolerances", "output",    "threads"};

bool needs_kernel_T(const std::string& s) {
    return s == "solve" || s == "stability" || s == "cost-stability" || s == "corrector" || s == "interpolate";
}
bool needs_marginals(const std::string& s) {
    return s == "solve" || s == "smalltime" || s == "gradient-map" || s == "interpolate";
}
bool is_battery(const std::string& s) {
    return s == "stability" || s == "cost-stability" || s == "eot-stability" || s == "corrector" || s == "sobolev" ||
           s == "orlicz";
}
bool needs_eps(const std::string& s) {
    return s == "stability" || s == "cost-stability" || s == "eot-stability" || s == "sobolev";
}

class Checker {
public:
    std::vector<Diagnostic> out;

    void error(const YAML::Node& n, const std::string& field, const std::string& msg) {
        out.push_back({Level::Error, field, line(n), msg});
    }
    void warn(const YAML::Node& n, const std::string& field, const std::string& msg) {
        out.push_back({Level::Warning, field, line(n), msg});
    }

    static int line(const YAML::Node& n) {
        if (!n || !n.IsDefined()) return 0;
        return n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
    }

    std::optional<double> number(const YAML::Node& parent, const YAML::Node& n, const std::string& field,
                                 bool required) {
        if (!n) {
            if (required) error(parent, field, "missing required field");
            return std::nullopt;
        }
        try {
            double v = n.as<double>();
            if (!std::isfinite(v)) {
                error(n, field, "must be finite");
                return std::nullopt;
            }
            return v;
        } catch (const YAML::Exception&) {
            error(n, field, "expected a number");
            return std::nullopt;
        }
    }

    std::optional<std::vector<double>> numbers(const YAML::Node& parent, const YAML::Node& n, const std::string& field,
                                               bool required) {
        if (!n) {
            if (required) error(parent, field, "missing required field");
            return std::nullopt;
        }
        std::vector<double> v;
        if (n.IsScalar()) {
            auto x = number(parent, n, field, true);
            if (!x) return std::nullopt;
            return std::vector<double>{*x};
        }
        if (!n.IsSequence()) {
            error(n, field, "expected a list of numbers");
            return std::nullopt;
        }
        for (std::size_t k = 0; k < n.size(); ++k) {
            auto x = number(n, n[k], field + "[" + std::to_string(k) + "]", true);
            if (!x) return std::nullopt;
            v.push_back(*x);
        }
        if (v.empty()) error(n, field, "list is empty");
        return v;
    }

    void marginal(const YAML::Node& n, const std::string& field, int dim, bool& random) {
        if (!n.IsMap()) {
            error(n, field, "expected a mapping with a 'family' key");
            return;
        }
        if (!n["family"]) {
            error(n, field + ".family", "missing required field");
            return;
        }
        const std::string fam = n["family"].as<std::string>();
        auto point = [&](const YAML::Node& p, const std::string& f, bool required) {
            if (!p) {
                if (required) error(n, f, "missing required field");
                return;
            }
            if (dim == 2) {
                if (!p.IsSequence() || p.size() != 2) error(p, f, "expected [x, y] in 2d");
                else numbers(n, p, f, true);
            } else {
                number(n, p, f, true);
            }
        };
        if (fam == "gaussian") {
            point(n["mean"], field + ".mean", true);
            auto s = number(n, n["sigma"], field + ".sigma", true);
            if (s && !(*s > 0)) error(n["sigma"], field + ".sigma", "must be positive");
        } else if (fam == "uniform") {
            point(n["a"], field + ".a", true);
            point(n["b"], field + ".b", true);
        } else if (fam == "mixture") {
            const auto& c = n["components"];
            if (!c || !c.IsSequence() || c.size() == 0) {
                error(c ? c : n, field + ".components", "expected a non-empty list");
                return;
            }
            for (std::size_t k = 0; k < c.size(); ++k) {
                const std::string f = field + ".components[" + std::to_string(k) + "]";
                auto w = number(c[k], c[k]["weight"], f + ".weight", true);
                if (w && !(*w > 0)) error(c[k]["weight"], f + ".weight", "must be positive");
                point(c[k]["mean"], f + ".mean", true);
                auto s = number(c[k], c[k]["sigma"], f + ".sigma", true);
                if (s && !(*s > 0)) error(c[k]["sigma"], f + ".sigma", "must be positive");
            }
        } else if (fam == "random") {
            random = true;
        } else if (fam == "perturbed") {
            random = true;
            auto e = number(n, n["eps"], field + ".eps", true);
            if (e && !(std::abs(*e) < 1)) error(n["eps"], field + ".eps", "must satisfy |eps| < 1");
            if (!n["base"]) error(n, field + ".base", "missing required field");
            else marginal(n["base"], field + ".base", dim, random);
        } else {
            error(n["family"], field + ".family", "unknown family '" + fam + "'");
        }
    }
};

std::vector<double> read_list(const YAML::Node& n) {
    if (!n) return {};
    if (n.IsScalar()) return {n.as<double>()};
    return n.as<std::vector<double>>();
}

Point read_point(const YAML::Node& n, int dim) {
    if (dim == 2) {
        auto v = n.as<std::vector<double>>();
        return {v[0], v[1]};
    }
    return {n.as<double>(), 0.0};
}

MarginalSpec read_marginal(const YAML::Node& n, int dim) {
    MarginalSpec m;
    m.family = n["family"].as<std::string>();
    if (m.family == "gaussian") {
        m.mean = read_point(n["mean"], dim);
        m.sigma = n["sigma"].as<double>();
    } else if (m.family == "uniform") {
        m.a = read_point(n["a"], dim);
        m.b = read_point(n["b"], dim);
    } else if (m.family == "mixture") {
        for (const auto& c : n["components"])
            m.components.push_back({c["weight"].as<double>(), read_point(c["mean"], dim), c["sigma"].as<double>()});
    } else if (m.family == "perturbed") {
        m.eps = n["eps"].as<double>();
        m.base = std::make_shared<MarginalSpec>(read_marginal(n["base"], dim));
    }
    return m;
}

}  // namespace

std::string to_string(const Diagnostic& d) {
    std::ostringstream os;
    os << (d.level == Level::Error ? "error" : "warning");
    if (d.line > 0) os << ": line " << d.line;
    os << ": " << d.field << ": " << d.message;
    return os.str();
}

YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

YAML::Node load_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_yaml(ss.str());
}

std::vector<Diagnostic> validate(const YAML::Node& root) {
    Checker c;
    if (!root || !root.IsMap()) {
        c.error(root, "<root>", "config must be a mapping");
        return c.out;
    }
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!kTopLevel.count(key)) c.warn(kv.first, key, "unknown field ignored");
    }
    const auto& sn = root["scenario"];
    if (!sn) {
        c.error(root, "scenario", "missing required field");
        return c.out;
    }
    const std::string scenario = sn.as<std::string>();
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), scenario) == names.end()) {
        c.error(sn, "scenario", "unknown scenario '" + scenario + "'");
        return c.out;
    }

    bool random = scenario == "orlicz" || scenario == "sobolev";

    // grid
    int dim = 1;
    double max_width = 0;
    if (scenario != "orlicz") {
        const auto& g = root["grid"];
        if (!g) {
            c.error(root, "grid", "missing required field");
        } else {
            const auto& lo = g["lo"];
            dim = lo && lo.IsSequence() ? static_cast<int>(lo.size()) : 1;
            if (dim != 1 && dim != 2) c.error(lo, "grid.lo", "dimension must be 1 or 2");
            auto l = c.numbers(g, g["lo"], "grid.lo", true);
            auto h = c.numbers(g, g["hi"], "grid.hi", true);
            auto n = c.numbers(g, g["n"], "grid.n", true);
            if (l && h && n) {
                if (l->size() != h->size() || l->size() != n->size())
                    c.error(g, "grid", "lo, hi and n must have the same length");
                else
                    for (std::size_t a = 0; a < l->size(); ++a) {
                        if (!((*h)[a] > (*l)[a])) c.error(g["hi"], "grid.hi", "must exceed grid.lo");
                        if ((*n)[a] < 2 || (*n)[a] != std::floor((*n)[a]))
                            c.error(g["n"], "grid.n", "must be an integer >= 2");
                        else
                            max_width = std::max(max_width, ((*h)[a] - (*l)[a]) / (*n)[a]);
                    }
                double cells = 1;
                for (double v : *n) cells *= v;
                if (cells > 4096) c.error(g["n"], "grid.n", "at most 4096 cells (dense kernels)");
            }
        }
    }
    if ((scenario == "smalltime" || scenario == "gradient-map") && dim != 1)
        c.error(root["grid"], "grid", "scenario '" + scenario + "' is 1d only");

    // kernel
    const auto& k = root["kernel"];
    auto guard = [&](double T, const YAML::Node& at, const std::string& field) {
        if (max_width > 0 && std::sqrt(2 * T) < 2 * max_width)
            c.warn(at, field, "T below the bandwidth guard; results are under-resolved");
    };
    const bool kernel_needed = needs_kernel_T(scenario) || scenario == "smalltime" || scenario == "gradient-map";
    if (kernel_needed && !k) {
        c.error(root, "kernel", "missing required field");
    } else if (k) {
        std::string kind = k["kind"] ? k["kind"].as<std::string>() : "";
        if (kernel_needed && kind.empty()) c.error(k, "kernel.kind", "missing required field");
        if (!kind.empty() && kind != "ou" && kind != "heat")
            c.error(k["kind"], "kernel.kind", "expected 'ou' or 'heat'");
        if (kind == "ou" || (scenario == "eot-stability" && k["kappa"])) {
            auto kap = c.number(k, k["kappa"], "kernel.kappa", true);
            if (kap && !(*kap > 0)) c.error(k["kappa"], "kernel.kappa", "must be positive");
        }
        if (needs_kernel_T(scenario)) {
            auto T = c.number(k, k["T"], "kernel.T", true);
            if (T && !(*T > 0)) c.error(k["T"], "kernel.T", "must be positive");
            else if (T) guard(*T, k["T"], "kernel.T");
        }
    }

    if (scenario == "smalltime" || scenario == "gradient-map") {
        auto Ts = c.numbers(root, root["T_list"], "T_list", true);
        if (Ts) {
            for (std::size_t i = 0; i < Ts->size(); ++i) {
                if (!((*Ts)[i] > 0)) c.error(root["T_list"], "T_list", "entries must be positive");
                if (i > 0 && !((*Ts)[i] < (*Ts)[i - 1])) c.error(root["T_list"], "T_list", "must be strictly decreasing");
                guard((*Ts)[i], root["T_list"], "T_list");
            }
        }
    }
    if (scenario == "eot-stability") {
        auto es = c.numbers(root, root["epsilon"], "epsilon", true);
        if (es)
            for (double e : *es)
                if (!(e > 0)) c.error(root["epsilon"], "epsilon", "entries must be positive");
    }

    // marginals
    const auto& m = root["marginals"];
    if (needs_marginals(scenario) && !m) c.error(root, "marginals", "missing required field");
    if (m) {
        for (const char* side : {"mu", "nu"}) {
            const std::string f = std::string("marginals.") + side;
            if (!m[side]) {
                if (needs_marginals(scenario)) c.error(m, f, "missing required field");
                continue;
            }
            c.marginal(m[side], f, dim, random);
        }
    } else if (is_battery(scenario)) {
        random = true;
    }

    if (needs_eps(scenario)) {
        const auto& p = root["perturbation"];
        if (!p) {
            c.error(root, "perturbation", "missing required field");
        } else {
            auto es = c.numbers(p, p["eps"], "perturbation.eps", true);
            if (es)
                for (double e : *es)
                    if (!(std::abs(e) < 1)) c.error(p["eps"], "perturbation.eps", "entries must satisfy |eps| < 1");
            if (p["marginals"]) {
                auto w = p["marginals"].as<std::string>();
                if (w != "both" && w != "mu" && w != "nu")
                    c.error(p["marginals"], "perturbation.marginals", "expected both, mu or nu");
            }
            random = true;
        }
    }

    if (const auto& b = root["battery"]) {
        auto n = c.number(b, b["count"], "battery.count", false);
        if (n && (*n < 1 || *n != std::floor(*n))) c.error(b["count"], "battery.count", "must be a positive integer");
        auto nt = c.number(b, b["n_times"], "battery.n_times", false);
        if (nt && (*nt < 2 || *nt != std::floor(*nt))) c.error(b["n_times"], "battery.n_times", "must be an integer >= 2");
        if (const auto& v = b["variants"]) {
            static const std::set<std::string> known = {"b1", "b1_no_measure", "final", "extreme", "young"};
            if (!v.IsSequence() || v.size() == 0) c.error(v, "battery.variants", "expected a non-empty list");
            else
                for (const auto& x : v)
                    if (!known.count(x.as<std::string>()))
                        c.error(x, "battery.variants", "unknown variant '" + x.as<std::string>() + "'");
        }
        auto cl = c.number(b, b["cells"], "battery.cells", false);
        if (cl && (*cl < 2 || *cl != std::floor(*cl))) c.error(b["cells"], "battery.cells", "must be an integer >= 2");
    }
    if (const auto& t = root["tolerances"]) {
        for (const char* f : {"solve", "cg"}) {
            auto v = c.number(t, t[f], std::string("tolerances.") + f, false);
            if (v && !(*v > 0)) c.error(t[f], std::string("tolerances.") + f, "must be positive");
        }
        auto it = c.number(t, t["max_iter"], "tolerances.max_iter", false);
        if (it && (*it < 1 || *it != std::floor(*it))) c.error(t["max_iter"], "tolerances.max_iter", "must be a positive integer");
    }
    if (const auto& th = root["threads"]) {
        auto v = c.number(root, th, "threads", false);
        if (v && (*v < 1 || *v != std::floor(*v))) c.error(th, "threads", "must be a positive integer");
    }
    if (random) {
        const auto& s = root["seed"];
        if (!s) c.error(root, "seed", "seed is mandatory for randomized batteries");
        else {
            try {
                s.as<std::uint64_t>();
            } catch (const YAML::Exception&) {
                c.error(s, "seed", "expected a nonnegative integer");
            }
        }
    }
    return c.out;
}

ExperimentConfig parse(const YAML::Node& root) {
    ExperimentConfig cfg;
    cfg.raw = YAML::Clone(root);
    cfg.scenario = root["scenario"].as<std::string>();
    if (const auto& g = root["grid"]) {
        auto lo = read_list(g["lo"]), hi = read_list(g["hi"]), n = read_list(g["n"]);
        cfg.grid.dim = static_cast<int>(lo.size());
        for (int a = 0; a < cfg.grid.dim; ++a) {
            cfg.grid.lo[a] = lo[a];
            cfg.grid.hi[a] = hi[a];
            cfg.grid.n[a] = static_cast<std::size_t>(n[a]);
        }
    }
    if (const auto& k = root["kernel"]) {
        if (k["kind"]) cfg.kernel.kind = k["kind"].as<std::string>();
        if (k["T"]) cfg.kernel.T = k["T"].as<double>();
        if (k["kappa"]) cfg.kernel.kappa = k["kappa"].as<double>();
        if (cfg.kernel.kind == "heat") cfg.kernel.kappa = k["kappa"] ? cfg.kernel.kappa : 0.0;
    }
    if (const auto& m = root["marginals"]) {
        if (m["mu"]) cfg.mu = read_marginal(m["mu"], cfg.grid.dim);
        if (m["nu"]) cfg.nu = read_marginal(m["nu"], cfg.grid.dim);
    }
    if (const auto& p = root["perturbation"]) {
        cfg.eps = read_list(p["eps"]);
        if (p["marginals"]) cfg.perturb = p["marginals"].as<std::string>();
    }
    cfg.T_list = read_list(root["T_list"]);
    cfg.epsilon = read_list(root["epsilon"]);
    if (const auto& b = root["battery"]) {
        if (b["count"]) cfg.count = b["count"].as<std::size_t>();
        if (b["n_times"]) cfg.n_times = b["n_times"].as<std::size_t>();
        if (b["cells"]) cfg.cells = b["cells"].as<std::size_t>();
        if (b["variants"]) cfg.variants = b["variants"].as<std::vector<std::string>>();
    }
    if (const auto& t = root["tolerances"]) {
        if (t["solve"]) cfg.tol = t["solve"].as<double>();
        if (t["max_iter"]) cfg.max_iter = t["max_iter"].as<std::size_t>();
        if (t["cg"]) cfg.cg_tol = t["cg"].as<double>();
    }
    if (root["seed"]) cfg.seed = root["seed"].as<std::uint64_t>();
    if (const auto& o = root["output"])
        if (o["dir"]) cfg.out_dir = o["dir"].as<std::string>();
    if (root["threads"]) cfg.threads = root["threads"].as<unsigned>();
    return cfg;
}

std::string config_digest(const ExperimentConfig& cfg) {
    YAML::Node n = YAML::Clone(cfg.raw);
    if (cfg.seed) n["seed"] = *cfg.seed;
    // output location and thread count do not change results
    n.remove("output");
    n.remove("threads");
    YAML::Emitter e;
    e << n;
    Digest d;
    d.add(std::string_view(e.c_str()));
    return d.hex();
}

Grid make_grid(const GridSpec& g) {
    if (g.dim == 2) return Grid::uniform2d(g.lo[0], g.hi[0], g.n[0], g.lo[1], g.hi[1], g.n[1]);
    return Grid::uniform(g.lo[0], g.hi[0], g.n[0]);
}

DiscreteMeasure make_marginal(const MarginalSpec& m, const Grid& grid, std::uint64_t seed) {
    if (m.family == "gaussian") return gaussian_measure(grid, m.mean, m.sigma);
    if (m.family == "uniform") return uniform_measure(grid, m.a, m.b);
    if (m.family == "mixture") return mixture_measure(grid, m.components);
    if (m.family == "random") {
        auto rng = battery_stream(seed, 0);
        return random_smooth_measure(grid, rng);
    }
    if (m.family == "perturbed") {
        auto base = make_marginal(*m.base, grid, seed);
        auto rng = battery_stream(seed, 1);
        return perturb(base, random_perturbation_direction(base, rng), m.eps);
    }
    throw ConfigError("unknown marginal family " + m.family);
}

}  // namespace sbridge::tools
