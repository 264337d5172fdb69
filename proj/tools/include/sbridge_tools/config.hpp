#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "sbridge/generators.hpp"

namespace sbridge::tools {

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"solve",       "stability",    "cost-stability", "eot-stability",
                                                   "corrector",   "smalltime",    "gradient-map",   "interpolate",
                                                   "sobolev",     "orlicz"};
    return names;
}

struct GridSpec {
    int dim = 1;
    double lo[2] = {-6, -6};
    double hi[2] = {6, 6};
    std::size_t n[2] = {256, 1};
};

struct MarginalSpec {
    std::string family;  // gaussian, uniform, mixture, random, perturbed
    Point mean{0, 0};
    double sigma = 1;
    Point a{0, 0}, b{0, 0};
    std::vector<GaussianComponent> components;
    double eps = 0;  // perturbed
    std::shared_ptr<MarginalSpec> base;
};

struct KernelSpec {
    std::string kind = "ou";  // ou or heat
    double T = 0;
    double kappa = 0;
};

struct ExperimentConfig {
    std::string scenario;
    GridSpec grid;
    KernelSpec kernel;
    std::optional<MarginalSpec> mu, nu;
    std::vector<double> eps;      // perturbation sizes
    std::string perturb = "both"; // both, mu, nu
    std::vector<double> T_list;
    std::vector<double> epsilon;  // EOT noise levels
    std::size_t count = 1;        // battery size
    std::size_t n_times = 64;
    std::size_t cells = 32;       // orlicz instance size
    std::vector<std::string> variants = {"b1", "b1_no_measure", "final", "extreme", "young"};
    double tol = 1e-9;
    std::size_t max_iter = 100000;
    double cg_tol = 1e-10;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    unsigned threads = 1;
    YAML::Node raw;
};

struct Diagnostic {
    enum class Level { Error, Warning } level = Level::Error;
    std::string field;
    int line = 0;  // 1-based, 0 when unknown
    std::string message;
};

std::string to_string(const Diagnostic& d);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses YAML text. Throws ConfigError on syntax errors.
YAML::Node load_yaml(const std::string& text);
YAML::Node load_yaml_file(const std::string& path);

// Violations (errors) and soft warnings. No errors means runnable.
std::vector<Diagnostic> validate(const YAML::Node& root);

// Requires validate() to have returned no errors.
ExperimentConfig parse(const YAML::Node& root);

// Hash of the canonical config text, seed override applied.
std::string config_digest(const ExperimentConfig& cfg);

Grid make_grid(const GridSpec& g);
DiscreteMeasure make_marginal(const MarginalSpec& m, const Grid& grid, std::uint64_t seed);

}  // namespace sbridge::tools
