#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbridge_tools/config.hpp"
#include "sbridge_tools/runner.hpp"

using namespace sbridge::tools;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::vector<Diagnostic>& ds, Diagnostic::Level level) {
    std::size_t n = 0;
    for (const auto& d : ds) n += d.level == level;
    return n;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("sbridge_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string drop_timestamp(std::string s) {
    auto a = s.find("\"timestamp\":");
    auto b = s.find(',', a);
    return s.erase(a, b - a);
}

int run_binary(const std::string& args) {
    std::string cmd = std::string(SBRIDGE_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kSolve = R"(scenario: solve
grid: {lo: -4, hi: 4, n: 48}
kernel: {kind: ou, T: 0.3, kappa: 1}
marginals:
  mu: {family: gaussian, mean: 0, sigma: 1}
  nu: {family: gaussian, mean: 0.5, sigma: 0.8}
)";

}  // namespace

TEST(Validate, SampleConfigsAreClean) {
    std::size_t seen = 0;
    for (const auto& e : fs::directory_iterator(SBRIDGE_CONFIG_DIR)) {
        if (e.path().extension() != ".yaml") continue;
        auto ds = validate(load_yaml_file(e.path().string()));
        EXPECT_TRUE(ds.empty()) << e.path() << ": " << (ds.empty() ? "" : to_string(ds.front()));
        ++seen;
    }
    EXPECT_GE(seen, 10u);
}

TEST(Validate, MissingKappaIsOneNamedError) {
    auto ds = validate(load_yaml(R"(scenario: solve
grid: {lo: -4, hi: 4, n: 48}
kernel: {kind: ou, T: 0.3}
marginals:
  mu: {family: gaussian, mean: 0, sigma: 1}
  nu: {family: gaussian, mean: 0.5, sigma: 0.8}
)"));
    ASSERT_EQ(count(ds, Diagnostic::Level::Error), 1u);
    EXPECT_EQ(ds.front().field, "kernel.kappa");
    EXPECT_EQ(ds.front().line, 3);
    EXPECT_NE(to_string(ds.front()).find("kernel.kappa: missing required field"), std::string::npos);
}

TEST(Validate, SmallTimeIsOnlyAWarning) {
    auto ds = validate(load_yaml(R"(scenario: solve
grid: {lo: -4, hi: 4, n: 48}
kernel: {kind: ou, T: 0.001, kappa: 1}
marginals:
  mu: {family: gaussian, mean: 0, sigma: 1}
  nu: {family: gaussian, mean: 0.5, sigma: 0.8}
)"));
    EXPECT_EQ(count(ds, Diagnostic::Level::Error), 0u);
    EXPECT_EQ(count(ds, Diagnostic::Level::Warning), 1u);
}

TEST(Validate, RandomBatteryNeedsSeed) {
    auto ds = validate(load_yaml(R"(scenario: sobolev
grid: {lo: -6, hi: 6, n: 64}
perturbation: {eps: [0.1]}
)"));
    ASSERT_EQ(count(ds, Diagnostic::Level::Error), 1u);
    EXPECT_EQ(ds.front().field, "seed");
}

TEST(Validate, UnknownScenarioAndSyntaxErrors) {
    auto ds = validate(load_yaml("scenario: teleport\n"));
    EXPECT_GE(count(ds, Diagnostic::Level::Error), 1u);
    EXPECT_THROW(load_yaml("grid: {lo: -4, hi: [\n"), ConfigError);
}

TEST(ConfigDigest, SeedOverrideChangesDigestOutputDoesNot) {
    auto cfg = parse(load_yaml(kSolve));
    auto d0 = config_digest(cfg);
    cfg.out_dir = "elsewhere";
    cfg.threads = 4;
    EXPECT_EQ(config_digest(cfg), d0);
    cfg.seed = 5;
    EXPECT_NE(config_digest(cfg), d0);
}

TEST(Runner, ReportsAreDeterministic) {
    auto root = load_yaml(R"(scenario: stability
seed: 31
grid: {lo: -6, hi: 6, n: 64}
kernel: {kind: ou, T: 0.25, kappa: 1}
perturbation: {eps: [0.1, 0.2]}
battery: {count: 2}
)");
    ASSERT_EQ(count(validate(root), Diagnostic::Level::Error), 0u);
    auto cfg = parse(root);
    cfg.out_dir = scratch("det_a").string();
    auto a = run(cfg, "2000-01-01T00:00:00Z");
    cfg.out_dir = scratch("det_b").string();
    auto b = run(cfg, "2001-01-01T00:00:00Z");
    EXPECT_EQ(a.exit_code, kAllPass) << a.message;
    ASSERT_EQ(a.reports.size(), 8u);
    ASSERT_EQ(b.reports.size(), a.reports.size());
    for (std::size_t k = 0; k < a.reports.size(); ++k) {
        EXPECT_EQ(a.reports[k].lhs, b.reports[k].lhs);
        EXPECT_EQ(a.reports[k].rhs, b.reports[k].rhs);
        EXPECT_EQ(a.reports[k].inputs_digest, b.reports[k].inputs_digest);
    }
}

TEST(Runner, DeterministicBytesApartFromTimestamp) {
    auto cfg = parse(load_yaml(kSolve));
    cfg.out_dir = scratch("bytes_a").string();
    run(cfg, "2000-01-01T00:00:00Z");
    cfg.out_dir = scratch("bytes_b").string();
    run(cfg, "2001-01-01T00:00:00Z");
    auto a = slurp(fs::temp_directory_path() / "sbridge_cli_test_bytes_a" / "report.jsonl");
    auto b = slurp(fs::temp_directory_path() / "sbridge_cli_test_bytes_b" / "report.jsonl");
    ASSERT_FALSE(a.empty());
    EXPECT_NE(a, b);
    EXPECT_EQ(drop_timestamp(a), drop_timestamp(b));
}

TEST(Cli, ExitCodes) {
    auto dir = scratch("exit");
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    auto ok = write("ok.yaml", kSolve);
    auto bad = write("bad.yaml", "scenario: solve\nkernel: {kind: ou, T: 0.3}\n");
    auto slow = write("slow.yaml", std::string(kSolve) + "tolerances: {solve: 1.0e-12, max_iter: 2}\n");
    EXPECT_EQ(run_binary("--list-scenarios"), 0);
    EXPECT_EQ(run_binary("--config " + ok + " --validate"), 0);
    EXPECT_EQ(run_binary("--config " + ok + " --out " + (dir / "ok").string()), 0);
    EXPECT_EQ(run_binary("--config " + bad), 2);
    EXPECT_EQ(run_binary("--config " + (dir / "missing.yaml").string()), 2);
    EXPECT_EQ(run_binary("--config " + slow + " --out " + (dir / "slow").string()), 3);
    EXPECT_TRUE(fs::exists(dir / "slow" / "report.jsonl"));
}
