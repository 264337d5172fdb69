#include "sbridge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace sbridge {

InequalityReport make_report(std::string name, double lhs, double rhs, PassRule rule, std::string digest) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.inputs_digest = std::move(digest);
    if (std::isnan(lhs) || std::isnan(rhs)) {
        r.slack = std::numeric_limits<double>::quiet_NaN();
        r.relative_slack = r.slack;
        r.pass = false;
        r.notes.push_back("non-finite side");
        return r;
    }
    if (rhs == std::numeric_limits<double>::infinity()) {
        r.slack = rhs;
        r.relative_slack = 1;
        r.pass = true;
        r.vacuous = true;
        r.notes.push_back("vacuous: right-hand side is +inf");
        return r;
    }
    r.slack = rhs - lhs;
    if (rhs != 0) {
        r.relative_slack = r.slack / std::abs(rhs);
    } else {
        r.relative_slack = r.slack == 0 ? 0 : std::copysign(std::numeric_limits<double>::infinity(), r.slack);
    }
    r.pass = r.slack >= -rule.abs - rule.rel * std::abs(rhs);
    return r;
}

void flag(InequalityReport& r, std::string note) {
    r.pass = false;
    r.notes.push_back(std::move(note));
}

void Digest::bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
        h_ ^= c[k];
        h_ *= 0x100000001b3ULL;
    }
}

Digest& Digest::add(std::string_view s) {
    bytes(s.data(), s.size());
    return *this;
}

Digest& Digest::add(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return add(u);
}

Digest& Digest::add(std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    bytes(b, 8);
    return *this;
}

Digest& Digest::add(std::span<const double> v) {
    for (double x : v) add(x);
    return *this;
}

std::string Digest::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
}

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string to_json(const InequalityReport& r, std::string_view config_digest) {
    nlohmann::ordered_json j;
    j["kind"] = "inequality";
    j["name"] = r.name;
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["slack"] = number(r.slack);
    j["relative_slack"] = number(r.relative_slack);
    j["pass"] = r.pass;
    j["vacuous"] = r.vacuous;
    j["inputs_digest"] = r.inputs_digest;
    if (!config_digest.empty()) j["config_digest"] = std::string(config_digest);
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j.dump();
}

void write_summary(std::ostream& os, const std::vector<InequalityReport>& reports) {
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    os << std::left << std::setw(static_cast<int>(width) + 2) << "name" << std::right << std::setw(15) << "lhs"
       << std::setw(15) << "rhs" << std::setw(13) << "rel.slack" << "  verdict\n";
    std::size_t passed = 0, vacuous = 0, failed = 0;
    for (const auto& r : reports) {
        const char* verdict = !r.pass ? "FAIL" : r.vacuous ? "vacuous" : "pass";
        (r.pass ? (r.vacuous ? vacuous : passed) : failed)++;
        os << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::right << std::setprecision(6)
           << std::setw(15) << r.lhs << std::setw(15) << r.rhs << std::setw(13) << std::setprecision(3)
           << r.relative_slack << "  " << verdict << '\n';
    }
    os << passed << " passed, " << vacuous << " vacuous, " << failed << " failed\n";
}

}  // namespace sbridge
