#pragma once

#include <iosfwd>
#include <vector>

#include "sbridge/grid.hpp"

namespace sbridge {

enum class RefKind { Lebesgue, Gaussian };

// The reference measure m. For the Gaussian kind the density is
// (kappa/2pi)^{d/2} exp(-kappa|x|^2/2), sampled at cell centres and multiplied
// by the cell volume; it is not renormalized on the grid.
class ReferenceMeasure {
public:
    static ReferenceMeasure lebesgue(const Grid& grid);
    static ReferenceMeasure gaussian(const Grid& grid, double kappa);

    const Grid& grid() const { return grid_; }
    RefKind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    const std::vector<double>& mass() const { return mass_; }
    // Computed analytically so far tails never underflow.
    const std::vector<double>& log_mass() const { return log_mass_; }
    double total_mass() const;

private:
    Grid grid_;
    RefKind kind_ = RefKind::Lebesgue;
    double kappa_ = 0;
    std::vector<double> mass_;
    std::vector<double> log_mass_;
};

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    // Validates nonnegativity and unit mass within 1e-12.
    DiscreteMeasure(Grid grid, std::vector<double> weights);
    // Rescales nonnegative raw weights to unit mass.
    static DiscreteMeasure normalized(Grid grid, std::vector<double> raw);
    static DiscreteMeasure dirac(const Grid& grid, std::size_t cell);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& weights() const { return w_; }
    double operator[](std::size_t i) const { return w_[i]; }
    std::size_t size() const { return w_.size(); }
    bool charges(std::size_t i) const { return w_[i] > 0; }

private:
    Grid grid_;
    std::vector<double> w_;
};

struct SignedMeasure {
    Grid grid;
    std::vector<double> weights;

    double total() const;
};

SignedMeasure difference(const DiscreteMeasure& a, const DiscreteMeasure& b);

// H(p|ref) = sum p log(p/ref_mass); +inf if p charges a cell of zero reference mass.
double relative_entropy(const DiscreteMeasure& p, const ReferenceMeasure& ref);
// H(p|q) between two discrete measures.
double relative_entropy(const DiscreteMeasure& p, const DiscreteMeasure& q);
double symmetric_entropy(const DiscreteMeasure& p, const DiscreteMeasure& q);

// Per-cell gradient of a function given on the cells flagged in `defined`.
// Central differences where both neighbours are defined, one-sided where only
// one is, zero where neither is. Undefined cells get a zero gradient.
std::vector<Point> gradient(const Grid& grid, const std::vector<double>& f,
                            const std::vector<char>& defined);
std::vector<Point> gradient(const Grid& grid, const std::vector<double>& f);

// Cells with mass above kMassFloor.
std::vector<char> support_mask(const std::vector<double>& weights);

double fisher_information(const DiscreteMeasure& p, const ReferenceMeasure& ref);

Point first_moment(const DiscreteMeasure& p);
double second_moment(const DiscreteMeasure& p);

// Header row then one row per cell: coordinates then weight.
void write_csv(std::ostream& os, const DiscreteMeasure& p);
DiscreteMeasure read_csv(std::istream& is);

}  // namespace sbridge
