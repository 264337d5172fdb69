#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbridge {

// pass iff slack >= -abs - rel*|rhs|
struct PassRule {
    double abs = 1e-8;
    double rel = 1e-4;
};

inline constexpr PassRule kDefaultRule{};

struct InequalityReport {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    double slack = 0;           // rhs - lhs
    double relative_slack = 0;  // slack / |rhs|
    bool pass = false;
    bool vacuous = false;  // rhs = +inf: passes but is not evidence
    std::string inputs_digest;
    std::vector<std::string> notes;
};

InequalityReport make_report(std::string name, double lhs, double rhs, PassRule rule = kDefaultRule,
                             std::string digest = {});

// Marks the report failed and records why.
void flag(InequalityReport& r, std::string note);

// FNV-1a, 64 bit. Stable across platforms with IEEE doubles.
class Digest {
public:
    Digest& add(std::string_view s);
    Digest& add(double v);
    Digest& add(std::uint64_t v);
    Digest& add(std::span<const double> v);
    std::uint64_t value() const { return h_; }
    std::string hex() const;

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
    void bytes(const void* p, std::size_t n);
};

std::string to_json(const InequalityReport& r, std::string_view config_digest = {});
void write_summary(std::ostream& os, const std::vector<InequalityReport>& reports);

}  // namespace sbridge
