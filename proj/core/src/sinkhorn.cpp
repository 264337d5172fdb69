#include "sinkhorn.hpp"

#include <cmath>
#include <limits>

namespace sbridge::detail {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double marginal_error(const std::vector<double>& target, const std::vector<double>& pot,
                      const std::vector<double>& lref, const std::vector<double>& lse) {
    double r = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        double got = pot[i] == kNegInf ? 0.0 : std::exp(pot[i] + lref[i] + lse[i]);
        r += std::abs(target[i] - got);
    }
    return r;
}

void update(const std::vector<double>& target, const std::vector<double>& lref,
            const std::vector<double>& lse, std::vector<double>& pot) {
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] > 0) {
            if (!std::isfinite(lref[i]) || !std::isfinite(lse[i]))
                throw Infeasible("marginal charges a cell the reference plan cannot reach");
            pot[i] = std::log(target[i]) - lref[i] - lse[i];
        } else {
            pot[i] = kNegInf;
        }
    }
}

std::vector<double> shifted(const std::vector<double>& pot, const std::vector<double>& lref) {
    std::vector<double> v(pot.size());
    for (std::size_t i = 0; i < pot.size(); ++i) v[i] = pot[i] == kNegInf ? kNegInf : pot[i] + lref[i];
    return v;
}

}  // namespace

ScalingResult scale(const double* L, std::size_t n, const std::vector<double>& lr,
                    const std::vector<double>& lc, const std::vector<double>& mu,
                    const std::vector<double>& nu, const SolveOptions& opts) {
    ScalingResult r;
    r.a.assign(n, kNegInf);
    r.b.assign(n, kNegInf);
    for (std::size_t j = 0; j < n; ++j) {
        if (nu[j] > 0) {
            if (!std::isfinite(lc[j])) throw Infeasible("nu charges a cell of zero reference mass");
            r.b[j] = 0.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (mu[i] > 0 && !std::isfinite(lr[i])) throw Infeasible("mu charges a cell of zero reference mass");

    std::vector<double> A(n), B(n);
    for (std::size_t it = 1;; ++it) {
        log_matvec(L, n, shifted(r.b, lc).data(), A.data());
        if (it > 1) {
            r.residual_row = marginal_error(mu, r.a, lr, A);
            if (opts.record_history) r.history.push_back(r.residual_row);
            if (r.residual_row <= opts.tol) {
                r.converged = true;
                break;
            }
        }
        if (it > opts.max_iter) break;
        update(mu, lr, A, r.a);
        log_matvec(L, n, shifted(r.a, lr).data(), B.data());
        update(nu, lc, B, r.b);
        r.iterations = it;
    }
    log_matvec(L, n, shifted(r.a, lr).data(), B.data());
    r.residual_col = marginal_error(nu, r.b, lc, B);
    return r;
}

Plan assemble_plan(const double* L, std::size_t n, const std::vector<double>& a,
                   const std::vector<double>& b, const std::vector<double>& lr,
                   const std::vector<double>& lc) {
    Plan p;
    p.n = n;
    p.log_weights.assign(n * n, kNegInf);
    p.row_marginal.assign(n, 0.0);
    p.col_marginal.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == kNegInf) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (b[j] == kNegInf) continue;
            double lw = a[i] + b[j] + L[i * n + j] + lr[i] + lc[j];
            p.log_weights[i * n + j] = lw;
            double w = std::exp(lw);
            p.row_marginal[i] += w;
            p.col_marginal[j] += w;
        }
    }
    return p;
}

}  // namespace sbridge::detail
