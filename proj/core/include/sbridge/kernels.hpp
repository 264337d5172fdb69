#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbridge/measures.hpp"

namespace sbridge {

enum class KernelKind { HeatLebesgue, OrnsteinUhlenbeck };

const char* kernel_kind_name(KernelKind k);

// Transition density of dX = sqrt(2) dB w.r.t. Lebesgue.
double heat_kernel(std::span<const double> x, std::span<const double> y, double T);
double log_heat_kernel(std::span<const double> x, std::span<const double> y, double T);

// Transition density of dX = -kappa X dt + sqrt(2) dB w.r.t. m (x) m,
// m = N(0, kappa^{-1} I).
double ou_kernel(std::span<const double> x, std::span<const double> y, double T, double kappa);
double log_ou_kernel(std::span<const double> x, std::span<const double> y, double T, double kappa);

// Lower bound log p_T(x,y) >= -kappa|x-y|^2 / (2(1 - e^{-kappa T})) for the OU kernel.
double ou_log_lower_bound(double sq_dist, double T, double kappa);

// E_{2kappa}(t) = int_0^t e^{2 kappa s} ds.
double curvature_factor(double kappa, double t);

// sqrt(2T) >= 2 * (max cell width).
bool bandwidth_ok(const Grid& grid, double T);

// Dense log-domain kernel matrix on one grid, shared by both arguments.
class GibbsKernel {
public:
    static GibbsKernel heat(const Grid& grid, double T);
    static GibbsKernel ou(const Grid& grid, double T, double kappa);
    // Same kind and kappa as `like`, new time.
    static GibbsKernel same_kind(const GibbsKernel& like, double T);

    const Grid& grid() const { return grid_; }
    KernelKind kind() const { return kind_; }
    double T() const { return T_; }
    double kappa() const { return kappa_; }
    std::size_t n() const { return n_; }
    const double* row(std::size_t i) const { return data_->data() + i * n_; }
    double log_at(std::size_t i, std::size_t j) const { return (*data_)[i * n_ + j]; }
    // Empty unless the bandwidth guard fired.
    const std::string& warning() const { return warning_; }
    // kappa used in curvature factors: 0 for the heat kernel.
    double curvature() const { return kind_ == KernelKind::OrnsteinUhlenbeck ? kappa_ : 0.0; }

    // The reference measure this kernel is normalized against.
    ReferenceMeasure reference() const;

private:
    Grid grid_;
    KernelKind kind_ = KernelKind::HeatLebesgue;
    double T_ = 0;
    double kappa_ = 0;
    std::size_t n_ = 0;
    std::shared_ptr<const std::vector<double>> data_;
    std::string warning_;
};

// out_i = log sum_j exp(L_ij + v_j) for a row-major n x n matrix L.
void log_matvec(const double* L, std::size_t n, const double* v, double* out);

// log P_T e^{log_f}. Entries of log_f may be -inf (f = 0 there).
std::vector<double> apply_semigroup(const GibbsKernel& K, const std::vector<double>& log_f,
                                    const ReferenceMeasure& ref);

// max_i |sum_j p_T(x_i,x_j) m_j - 1| over rows i in `rows` (all rows if empty).
double row_mass_defect(const GibbsKernel& K, const ReferenceMeasure& ref,
                       const std::vector<char>& rows = {});

}  // namespace sbridge
