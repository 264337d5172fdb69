#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbridge {

// Cells below this mass count as empty for log-densities and gradients.
inline constexpr double kMassFloor = 1e-12;

struct StructuralError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Point = std::array<double, 2>;

// Tensor grid of cell centres in dimension 1 or 2. Cell index is row-major,
// axis 0 slowest.
class Grid {
public:
    Grid() = default;

    static Grid uniform(double lo, double hi, std::size_t n);
    static Grid uniform2d(double lo0, double hi0, std::size_t n0,
                          double lo1, double hi1, std::size_t n1);
    // Cell widths are taken from the midpoints between neighbouring nodes.
    static Grid from_nodes(std::vector<std::vector<double>> axes);

    int dim() const { return static_cast<int>(nodes_.size()); }
    std::size_t size() const { return weights_.size(); }
    std::size_t axis_size(int a) const { return nodes_[a].size(); }
    const std::vector<double>& nodes(int a) const { return nodes_[a]; }
    double width(int a, std::size_t k) const { return widths_[a][k]; }
    double max_width() const;

    double weight(std::size_t cell) const { return weights_[cell]; }
    const std::vector<double>& weights() const { return weights_; }

    std::size_t index(std::size_t i0, std::size_t i1 = 0) const {
        return dim() == 1 ? i0 : i0 * nodes_[1].size() + i1;
    }
    std::array<std::size_t, 2> multi(std::size_t cell) const;
    Point point(std::size_t cell) const;
    double coord(std::size_t cell, int axis) const { return nodes_[axis][multi(cell)[axis]]; }
    double sq_norm(std::size_t cell) const;
    double sq_dist(std::size_t a, std::size_t b) const;

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }

    std::string describe() const;

private:
    std::vector<std::vector<double>> nodes_;
    std::vector<std::vector<double>> widths_;
    std::vector<double> weights_;

    void finish();
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace sbridge
