#pragma once

#include <vector>

#include "sbridge/measures.hpp"
#include "sbridge/report.hpp"

namespace sbridge {

enum class YoungFunction { Theta, ThetaStar };

// theta(t) = e^t - 1; theta*(s) = s log s - s + 1 with theta*(0) = 1.
double theta(double t);
double theta_star(double s);

// inf{ b > 0 : int Theta(|f|/b) dq <= 1 } by bisection to relative width 1e-10.
double luxemburg_norm(const std::vector<double>& f, const DiscreteMeasure& base, YoungFunction which);

struct OrliczContext {
    DiscreteMeasure base;    // q
    std::vector<double> h;   // > 0 on supp q
    DiscreteMeasure p_meas;  // p << q
    double p = 1, q = 1;     // exponents
};

enum class LogBoundVariant { B1, B1NoMeasure, Final, Extreme };

const char* variant_name(LogBoundVariant v);

// lhs = int |log h| dp against the chosen right-hand side; pass iff lhs <= rhs + 1e-10.
// Throws std::invalid_argument when the variant's precondition does not hold.
InequalityReport log_integrability_bound(const OrliczContext& ctx, LogBoundVariant variant);

// int |f g| dq <= 2 ||f||_theta ||g||_theta*.
InequalityReport orlicz_young_check(const std::vector<double>& f, const std::vector<double>& g,
                                    const DiscreteMeasure& base);

// Pieces shared by the bounds; exposed for tests.
double lq_norm(const std::vector<double>& f, const DiscreteMeasure& base, double q);
double mass_where_at_least_one(const std::vector<double>& h, const DiscreteMeasure& base);

}  // namespace sbridge
