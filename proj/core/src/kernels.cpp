#include "sbridge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sbridge {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dims(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("kernel: point dimension mismatch");
}

double sq(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

}  // namespace

const char* kernel_kind_name(KernelKind k) {
    return k == KernelKind::HeatLebesgue ? "heat" : "ou";
}

double log_heat_kernel(std::span<const double> x, std::span<const double> y, double T) {
    check_dims(x, y);
    if (!(T > 0)) throw std::invalid_argument("heat_kernel: T must be positive");
    const double d = static_cast<double>(x.size());
    return -0.5 * d * std::log(4 * kPi * T) - sq(x, y) / (4 * T);
}

double heat_kernel(std::span<const double> x, std::span<const double> y, double T) {
    return std::exp(log_heat_kernel(x, y, T));
}

double log_ou_kernel(std::span<const double> x, std::span<const double> y, double T, double kappa) {
    check_dims(x, y);
    if (!(T > 0) || !(kappa > 0)) throw std::invalid_argument("ou_kernel: T and kappa must be positive");
    const double d = static_cast<double>(x.size());
    const double a = -std::expm1(-2 * kappa * T);               // 1 - e^{-2kT}
    const double denom = (2.0 / kappa) * std::expm1(2 * kappa * T);  // (2/k)(e^{2kT} - 1)
    const double q = dot(x, x) - 2 * std::exp(kappa * T) * dot(x, y) + dot(y, y);
    return -0.5 * d * std::log(a) - q / denom;
}

double ou_kernel(std::span<const double> x, std::span<const double> y, double T, double kappa) {
    return std::exp(log_ou_kernel(x, y, T, kappa));
}

double ou_log_lower_bound(double sq_dist, double T, double kappa) {
    return -kappa * sq_dist / (2 * (-std::expm1(-kappa * T)));
}

double curvature_factor(double kappa, double t) {
    if (!(t > 0)) throw std::invalid_argument("curvature_factor: t must be positive");
    if (kappa == 0) return t;
    return std::expm1(2 * kappa * t) / (2 * kappa);
}

bool bandwidth_ok(const Grid& grid, double T) {
    return std::sqrt(2 * T) >= 2 * grid.max_width();
}

namespace {

template <class F>
std::shared_ptr<const std::vector<double>> build_symmetric(const Grid& grid, F&& logk) {
    const std::size_t n = grid.size();
    auto m = std::make_shared<std::vector<double>>(n * n);
    const int d = grid.dim();
    for (std::size_t i = 0; i < n; ++i) {
        Point xi = grid.point(i);
        for (std::size_t j = i; j < n; ++j) {
            Point xj = grid.point(j);
            double v = logk(std::span<const double>(xi.data(), d), std::span<const double>(xj.data(), d));
            (*m)[i * n + j] = v;
            (*m)[j * n + i] = v;
        }
    }
    return m;
}

std::string guard_message(const Grid& grid, double T) {
    if (bandwidth_ok(grid, T)) return {};
    std::ostringstream os;
    os << "kernel bandwidth sqrt(2T)=" << std::sqrt(2 * T) << " is below twice the max cell width "
       << grid.max_width() << " (T=" << T << ")";
    return os.str();
}

}  // namespace

GibbsKernel GibbsKernel::heat(const Grid& grid, double T) {
    if (!(T > 0)) throw std::invalid_argument("heat kernel: T must be positive");
    GibbsKernel k;
    k.grid_ = grid;
    k.kind_ = KernelKind::HeatLebesgue;
    k.T_ = T;
    k.n_ = grid.size();
    k.data_ = build_symmetric(grid, [T](auto x, auto y) { return log_heat_kernel(x, y, T); });
    k.warning_ = guard_message(grid, T);
    return k;
}

GibbsKernel GibbsKernel::ou(const Grid& grid, double T, double kappa) {
    if (!(T > 0) || !(kappa > 0)) throw std::invalid_argument("ou kernel: T and kappa must be positive");
    GibbsKernel k;
    k.grid_ = grid;
    k.kind_ = KernelKind::OrnsteinUhlenbeck;
    k.T_ = T;
    k.kappa_ = kappa;
    k.n_ = grid.size();
    k.data_ = build_symmetric(grid, [T, kappa](auto x, auto y) { return log_ou_kernel(x, y, T, kappa); });
    k.warning_ = guard_message(grid, T);
    return k;
}

GibbsKernel GibbsKernel::same_kind(const GibbsKernel& like, double T) {
    return like.kind_ == KernelKind::HeatLebesgue ? heat(like.grid_, T) : ou(like.grid_, T, like.kappa_);
}

ReferenceMeasure GibbsKernel::reference() const {
    return kind_ == KernelKind::HeatLebesgue ? ReferenceMeasure::lebesgue(grid_)
                                             : ReferenceMeasure::gaussian(grid_, kappa_);
}

void log_matvec(const double* L, std::size_t n, const double* v, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = L + i * n;
        double mx = kNegInf;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, r[j] + v[j]);
        if (mx == kNegInf) {
            out[i] = kNegInf;
            continue;
        }
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) s += std::exp(r[j] + v[j] - mx);
        out[i] = mx + std::log(s);
    }
}

std::vector<double> apply_semigroup(const GibbsKernel& K, const std::vector<double>& log_f,
                                    const ReferenceMeasure& ref) {
    const std::size_t n = K.n();
    if (log_f.size() != n || ref.grid().size() != n) throw StructuralError("apply_semigroup: size mismatch");
    std::vector<double> v(n);
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = log_f[j] + ref.log_mass()[j];
        if (std::isnan(v[j])) throw std::invalid_argument("apply_semigroup: NaN input");
        any = any || v[j] > kNegInf;
    }
    if (!any) throw std::invalid_argument("apply_semigroup: input is identically zero");
    std::vector<double> out(n);
    log_matvec(K.row(0), n, v.data(), out.data());
    return out;
}

double row_mass_defect(const GibbsKernel& K, const ReferenceMeasure& ref, const std::vector<char>& rows) {
    std::vector<double> zero(K.n(), 0.0);
    auto lp = apply_semigroup(K, zero, ref);
    double worst = 0;
    for (std::size_t i = 0; i < K.n(); ++i)
        if (rows.empty() || rows[i]) worst = std::max(worst, std::abs(std::expm1(lp[i])));
    return worst;
}

}  // namespace sbridge
