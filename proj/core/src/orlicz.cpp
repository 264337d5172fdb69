#include "sbridge/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbridge {

double theta(double t) { return std::expm1(t); }

double theta_star(double s) {
    if (s < 0) throw std::invalid_argument("theta_star: negative argument");
    if (s == 0) return 1.0;
    return s * std::log(s) - s + 1.0;
}

namespace {

double young_integral(const std::vector<double>& f, const DiscreteMeasure& base, YoungFunction which, double b) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (base[i] <= 0) continue;
        double x = std::abs(f[i]) / b;
        s += base[i] * (which == YoungFunction::Theta ? theta(x) : theta_star(x));
    }
    return s;
}

}  // namespace

double luxemburg_norm(const std::vector<double>& f, const DiscreteMeasure& base, YoungFunction which) {
    if (f.size() != base.size()) throw StructuralError("luxemburg_norm: size mismatch");
    double mx = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (base[i] > 0) mx = std::max(mx, std::abs(f[i]));
    if (mx == 0) return 0.0;
    // For both Young functions {b : integral <= 1} is a ray [b*, inf).
    auto feasible = [&](double b) { return young_integral(f, base, which, b) <= 1.0; };
    double lo = 1e-8 * mx, hi = 1e8 * mx;
    for (int k = 0; k < 2000 && feasible(lo); ++k) lo *= 0.5;
    for (int k = 0; k < 2000 && !feasible(hi); ++k) hi *= 2.0;
    if (feasible(lo) || !feasible(hi)) throw std::runtime_error("luxemburg_norm: could not bracket the norm");
    while (hi - lo > 1e-10 * hi) {
        double mid = std::sqrt(lo * hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double lq_norm(const std::vector<double>& f, const DiscreteMeasure& base, double q) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (base[i] > 0) s += base[i] * std::pow(std::abs(f[i]), q);
    return std::pow(s, 1.0 / q);
}

double mass_where_at_least_one(const std::vector<double>& h, const DiscreteMeasure& base) {
    double s = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (base[i] > 0 && h[i] >= 1) s += base[i];
    return s;
}

const char* variant_name(LogBoundVariant v) {
    switch (v) {
        case LogBoundVariant::B1: return "log_bound_b1";
        case LogBoundVariant::B1NoMeasure: return "log_bound_b1_no_measure";
        case LogBoundVariant::Final: return "log_bound_final";
        case LogBoundVariant::Extreme: return "log_bound_extreme";
    }
    return "log_bound";
}

InequalityReport log_integrability_bound(const OrliczContext& ctx, LogBoundVariant variant) {
    const auto& q = ctx.base;
    require_same_grid(q.grid(), ctx.p_meas.grid(), "log_integrability_bound");
    if (ctx.h.size() != q.size()) throw StructuralError("log_integrability_bound: size mismatch");
    if (!(ctx.p > 0) || !(ctx.q > 0)) throw std::invalid_argument("log_integrability_bound: exponents must be positive");
    std::vector<double> inv(ctx.h.size(), 1.0);
    for (std::size_t i = 0; i < ctx.h.size(); ++i) {
        if (q[i] <= 0) continue;
        if (!(ctx.h[i] > 0)) throw std::invalid_argument("log_integrability_bound: h must be positive on supp q");
        inv[i] = 1.0 / ctx.h[i];
    }
    const double H = relative_entropy(ctx.p_meas, q);
    if (!std::isfinite(H)) throw std::invalid_argument("log_integrability_bound: H(p|q) is infinite");

    double lhs = 0;
    for (std::size_t i = 0; i < ctx.h.size(); ++i)
        if (ctx.p_meas[i] > 0) lhs += ctx.p_meas[i] * std::abs(std::log(ctx.h[i]));

    const double pre = 2 * std::exp(H - 1);
    const double pq = std::min(ctx.p, ctx.q);
    const double nh = lq_norm(ctx.h, q, ctx.q);
    const double ninv = lq_norm(inv, q, ctx.p);
    const double lambda = mass_where_at_least_one(ctx.h, q);
    double rhs = 0;
    switch (variant) {
        case LogBoundVariant::B1: {
            // a set of zero q-measure contributes nothing
            double pos = lambda > 0 ? std::pow(lambda, 1 - 1 / ctx.q) * nh : 0.0;
            double neg = lambda < 1 ? std::pow(1 - lambda, 1 - 1 / ctx.p) * ninv : 0.0;
            rhs = pre * std::max(1 / std::min(1.0, pq), std::log2(pos + neg));
            break;
        }
        case LogBoundVariant::B1NoMeasure:
            rhs = pre / pq * std::max(1.0, std::log2(std::pow(nh, pq) + std::pow(ninv, pq)));
            break;
        case LogBoundVariant::Final:
            if (pq > 1) throw std::invalid_argument("log_integrability_bound: final variant needs min(p,q) <= 1");
            rhs = pre * (1 / pq + std::max(0.0, std::log2(0.5 * (nh + ninv))));
            break;
        case LogBoundVariant::Extreme: {
            // decide on the indicator itself, not on the rounded mass
            std::size_t above = 0, charged = 0;
            for (std::size_t i = 0; i < ctx.h.size(); ++i)
                if (q[i] > 0) {
                    ++charged;
                    above += ctx.h[i] >= 1;
                }
            if (above == charged)
                rhs = pre * std::max(1 / pq, std::log2(nh));
            else if (above == 0)
                rhs = pre * std::max(1 / pq, std::log2(ninv));
            else
                throw std::invalid_argument("log_integrability_bound: extreme variant needs q{h>=1} in {0,1}");
            break;
        }
    }
    Digest d;
    d.add(variant_name(variant)).add(std::span<const double>(q.weights())).add(std::span<const double>(ctx.h));
    d.add(std::span<const double>(ctx.p_meas.weights())).add(ctx.p).add(ctx.q);
    return make_report(variant_name(variant), lhs, rhs, PassRule{1e-10, 0.0}, d.hex());
}

InequalityReport orlicz_young_check(const std::vector<double>& f, const std::vector<double>& g,
                                    const DiscreteMeasure& base) {
    if (f.size() != base.size() || g.size() != base.size()) throw StructuralError("orlicz_young_check: size mismatch");
    double lhs = 0;
    for (std::size_t i = 0; i < f.size(); ++i) lhs += base[i] * std::abs(f[i] * g[i]);
    double rhs = 2 * luxemburg_norm(f, base, YoungFunction::Theta) * luxemburg_norm(g, base, YoungFunction::ThetaStar);
    Digest d;
    d.add("orlicz_young").add(std::span<const double>(f)).add(std::span<const double>(g));
    d.add(std::span<const double>(base.weights()));
    return make_report("orlicz_young", lhs, rhs, PassRule{1e-10, 0.0}, d.hex());
}

}  // namespace sbridge
