#include "sbridge/grid.hpp"

#include <algorithm>
#include <sstream>

namespace sbridge {

namespace {

std::vector<double> widths_from_nodes(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0);
    if (n == 1) return w;
    for (std::size_t k = 0; k < n; ++k) {
        double left = k == 0 ? x[0] - 0.5 * (x[1] - x[0]) : 0.5 * (x[k - 1] + x[k]);
        double right = k + 1 == n ? x[n - 1] + 0.5 * (x[n - 1] - x[n - 2]) : 0.5 * (x[k] + x[k + 1]);
        w[k] = right - left;
    }
    return w;
}

std::vector<double> uniform_nodes(double lo, double hi, std::size_t n) {
    if (n == 0) throw StructuralError("grid axis needs at least one cell");
    if (!(hi > lo)) throw StructuralError("grid axis needs hi > lo");
    std::vector<double> x(n);
    const double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (static_cast<double>(i) + 0.5) * h;
    return x;
}

}  // namespace

Grid Grid::uniform(double lo, double hi, std::size_t n) {
    Grid g;
    g.nodes_.push_back(uniform_nodes(lo, hi, n));
    g.widths_.emplace_back(n, (hi - lo) / static_cast<double>(n));
    g.finish();
    return g;
}

Grid Grid::uniform2d(double lo0, double hi0, std::size_t n0,
                     double lo1, double hi1, std::size_t n1) {
    Grid g;
    g.nodes_.push_back(uniform_nodes(lo0, hi0, n0));
    g.nodes_.push_back(uniform_nodes(lo1, hi1, n1));
    g.widths_.emplace_back(n0, (hi0 - lo0) / static_cast<double>(n0));
    g.widths_.emplace_back(n1, (hi1 - lo1) / static_cast<double>(n1));
    g.finish();
    return g;
}

Grid Grid::from_nodes(std::vector<std::vector<double>> axes) {
    if (axes.empty() || axes.size() > 2) throw StructuralError("grid dimension must be 1 or 2");
    Grid g;
    for (auto& ax : axes) {
        if (ax.empty()) throw StructuralError("grid axis needs at least one cell");
        for (std::size_t k = 1; k < ax.size(); ++k)
            if (!(ax[k] > ax[k - 1])) throw StructuralError("grid nodes must be strictly increasing");
        g.widths_.push_back(widths_from_nodes(ax));
        g.nodes_.push_back(std::move(ax));
    }
    g.finish();
    return g;
}

void Grid::finish() {
    if (dim() == 1) {
        weights_ = widths_[0];
    } else {
        weights_.resize(nodes_[0].size() * nodes_[1].size());
        for (std::size_t i = 0; i < nodes_[0].size(); ++i)
            for (std::size_t j = 0; j < nodes_[1].size(); ++j)
                weights_[index(i, j)] = widths_[0][i] * widths_[1][j];
    }
    for (double w : weights_)
        if (!(w > 0)) throw StructuralError("grid cell weights must be positive");
}

double Grid::max_width() const {
    double m = 0;
    for (const auto& w : widths_) m = std::max(m, *std::max_element(w.begin(), w.end()));
    return m;
}

std::array<std::size_t, 2> Grid::multi(std::size_t cell) const {
    if (dim() == 1) return {cell, 0};
    const std::size_t n1 = nodes_[1].size();
    return {cell / n1, cell % n1};
}

Point Grid::point(std::size_t cell) const {
    auto ij = multi(cell);
    if (dim() == 1) return {nodes_[0][ij[0]], 0.0};
    return {nodes_[0][ij[0]], nodes_[1][ij[1]]};
}

double Grid::sq_norm(std::size_t cell) const {
    Point p = point(cell);
    return p[0] * p[0] + p[1] * p[1];
}

double Grid::sq_dist(std::size_t a, std::size_t b) const {
    Point p = point(a), q = point(b);
    double d0 = p[0] - q[0], d1 = p[1] - q[1];
    return d0 * d0 + d1 * d1;
}

bool Grid::operator==(const Grid& other) const {
    return nodes_ == other.nodes_ && widths_ == other.widths_;
}

std::string Grid::describe() const {
    std::ostringstream os;
    os << dim() << "d";
    for (int a = 0; a < dim(); ++a) {
        const auto& x = nodes_[a];
        os << (a ? " x " : " ") << x.size() << " cells on [" << x.front() - 0.5 * widths_[a].front()
           << ", " << x.back() + 0.5 * widths_[a].back() << "]";
    }
    return os.str();
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw StructuralError(std::string(what) + ": grid mismatch");
}

}  // namespace sbridge
