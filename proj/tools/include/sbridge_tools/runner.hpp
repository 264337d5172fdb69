#pragma once

#include <future>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbridge/report.hpp"
#include "sbridge_tools/config.hpp"

namespace sbridge::tools {

enum ExitCode { kAllPass = 0, kInequalityFailure = 1, kConfigError = 2, kNonConvergence = 3 };

struct RunOutcome {
    int exit_code = kAllPass;
    std::vector<InequalityReport> reports;
    std::string message;  // failing report names or the error
};

// Runs the scenario and writes report.jsonl, CSV tables and summary.txt into
// cfg.out_dir. `timestamp` goes into the header line only.
RunOutcome run(const ExperimentConfig& cfg, const std::string& timestamp);

// f(0..n-1) on up to `threads` workers; results come back in index order.
template <class F>
auto ordered_map(std::size_t n, unsigned threads, F f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<R> out;
    out.reserve(n);
    if (threads <= 1) {
        for (std::size_t k = 0; k < n; ++k) out.push_back(f(k));
        return out;
    }
    std::vector<std::future<R>> pending;
    std::size_t next = 0;
    while (next < n || !pending.empty()) {
        while (next < n && pending.size() < threads) {
            pending.push_back(std::async(std::launch::async, f, next));
            ++next;
        }
        out.push_back(pending.front().get());
        pending.erase(pending.begin());
    }
    return out;
}

}  // namespace sbridge::tools
