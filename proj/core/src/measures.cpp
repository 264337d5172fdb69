#include "sbridge/measures.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace sbridge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

ReferenceMeasure ReferenceMeasure::lebesgue(const Grid& grid) {
    ReferenceMeasure r;
    r.grid_ = grid;
    r.kind_ = RefKind::Lebesgue;
    r.mass_ = grid.weights();
    r.log_mass_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) r.log_mass_[i] = std::log(r.mass_[i]);
    return r;
}

ReferenceMeasure ReferenceMeasure::gaussian(const Grid& grid, double kappa) {
    if (!(kappa > 0)) throw std::invalid_argument("gaussian reference needs kappa > 0");
    ReferenceMeasure r;
    r.grid_ = grid;
    r.kind_ = RefKind::Gaussian;
    r.kappa_ = kappa;
    const double log_norm = 0.5 * grid.dim() * std::log(kappa / kTwoPi);
    r.mass_.resize(grid.size());
    r.log_mass_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.log_mass_[i] = log_norm - 0.5 * kappa * grid.sq_norm(i) + std::log(grid.weight(i));
        r.mass_[i] = std::exp(r.log_mass_[i]);
    }
    return r;
}

double ReferenceMeasure::total_mass() const {
    return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

DiscreteMeasure::DiscreteMeasure(Grid grid, std::vector<double> weights)
    : grid_(std::move(grid)), w_(std::move(weights)) {
    if (w_.size() != grid_.size()) throw StructuralError("measure size does not match grid");
    double s = 0;
    for (double v : w_) {
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("measure weights must be finite and >= 0");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "measure total mass " << std::setprecision(17) << s << " is not 1";
        throw std::invalid_argument(os.str());
    }
}

DiscreteMeasure DiscreteMeasure::normalized(Grid grid, std::vector<double> raw) {
    double s = 0;
    for (double v : raw) {
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("measure weights must be finite and >= 0");
        s += v;
    }
    if (!(s > 0)) throw std::invalid_argument("measure has zero mass");
    for (double& v : raw) v /= s;
    return DiscreteMeasure(std::move(grid), std::move(raw));
}

DiscreteMeasure DiscreteMeasure::dirac(const Grid& grid, std::size_t cell) {
    std::vector<double> w(grid.size(), 0.0);
    w.at(cell) = 1.0;
    return DiscreteMeasure(grid, std::move(w));
}

double SignedMeasure::total() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

SignedMeasure difference(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    require_same_grid(a.grid(), b.grid(), "difference");
    SignedMeasure s{a.grid(), a.weights()};
    for (std::size_t i = 0; i < s.weights.size(); ++i) s.weights[i] -= b[i];
    return s;
}

double relative_entropy(const DiscreteMeasure& p, const ReferenceMeasure& ref) {
    require_same_grid(p.grid(), ref.grid(), "relative_entropy");
    double h = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        if (ref.mass()[i] <= 0 && !std::isfinite(ref.log_mass()[i])) return kInf;
        h += p[i] * (std::log(p[i]) - ref.log_mass()[i]);
    }
    return h;
}

double relative_entropy(const DiscreteMeasure& p, const DiscreteMeasure& q) {
    require_same_grid(p.grid(), q.grid(), "relative_entropy");
    double h = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        if (q[i] <= 0) return kInf;
        h += p[i] * std::log(p[i] / q[i]);
    }
    return h;
}

double symmetric_entropy(const DiscreteMeasure& p, const DiscreteMeasure& q) {
    return relative_entropy(p, q) + relative_entropy(q, p);
}

std::vector<char> support_mask(const std::vector<double>& weights) {
    std::vector<char> m(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) m[i] = weights[i] > kMassFloor;
    return m;
}

std::vector<Point> gradient(const Grid& grid, const std::vector<double>& f,
                            const std::vector<char>& defined) {
    if (f.size() != grid.size() || defined.size() != grid.size())
        throw StructuralError("gradient: size mismatch");
    std::vector<Point> g(grid.size(), Point{0.0, 0.0});
    for (int a = 0; a < grid.dim(); ++a) {
        const auto& x = grid.nodes(a);
        const std::size_t n = x.size();
        for (std::size_t c = 0; c < grid.size(); ++c) {
            if (!defined[c]) continue;
            auto ij = grid.multi(c);
            const std::size_t k = ij[a];
            auto neighbour = [&](std::size_t kk) {
                auto m = ij;
                m[a] = kk;
                return grid.index(m[0], m[1]);
            };
            bool has_lo = k > 0 && defined[neighbour(k - 1)];
            bool has_hi = k + 1 < n && defined[neighbour(k + 1)];
            if (has_lo && has_hi) {
                g[c][a] = (f[neighbour(k + 1)] - f[neighbour(k - 1)]) / (x[k + 1] - x[k - 1]);
            } else if (has_hi) {
                g[c][a] = (f[neighbour(k + 1)] - f[c]) / (x[k + 1] - x[k]);
            } else if (has_lo) {
                g[c][a] = (f[c] - f[neighbour(k - 1)]) / (x[k] - x[k - 1]);
            }
        }
    }
    return g;
}

std::vector<Point> gradient(const Grid& grid, const std::vector<double>& f) {
    return gradient(grid, f, std::vector<char>(grid.size(), 1));
}

double fisher_information(const DiscreteMeasure& p, const ReferenceMeasure& ref) {
    require_same_grid(p.grid(), ref.grid(), "fisher_information");
    auto mask = support_mask(p.weights());
    std::vector<double> logd(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (mask[i]) logd[i] = std::log(p[i]) - ref.log_mass()[i];
    auto g = gradient(p.grid(), logd, mask);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (mask[i]) s += p[i] * (g[i][0] * g[i][0] + g[i][1] * g[i][1]);
    return s;
}

Point first_moment(const DiscreteMeasure& p) {
    Point m{0, 0};
    for (std::size_t i = 0; i < p.size(); ++i) {
        Point x = p.grid().point(i);
        m[0] += p[i] * x[0];
        m[1] += p[i] * x[1];
    }
    return m;
}

double second_moment(const DiscreteMeasure& p) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * p.grid().sq_norm(i);
    return s;
}

void write_csv(std::ostream& os, const DiscreteMeasure& p) {
    const Grid& g = p.grid();
    os << (g.dim() == 1 ? "x,weight\n" : "x,y,weight\n");
    os << std::setprecision(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
        Point x = g.point(i);
        os << x[0] << ',';
        if (g.dim() == 2) os << x[1] << ',';
        os << p[i] << '\n';
    }
}

DiscreteMeasure read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("measure csv: missing header");
    const int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cols != 2 && cols != 3) throw std::invalid_argument("measure csv: expected 2 or 3 columns");
    const int dim = cols - 1;
    std::vector<std::array<double, 3>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 3> r{0, 0, 0};
        std::istringstream ls(line);
        std::string cell;
        int c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= cols) throw std::invalid_argument("measure csv: too many columns on line " + std::to_string(lineno));
            try {
                r[c++] = std::stod(cell);
            } catch (const std::exception&) {
                throw std::invalid_argument("measure csv: bad number on line " + std::to_string(lineno));
            }
        }
        if (c != cols) throw std::invalid_argument("measure csv: too few columns on line " + std::to_string(lineno));
        rows.push_back(r);
    }
    std::vector<std::vector<double>> axes(dim);
    for (int a = 0; a < dim; ++a) {
        for (const auto& r : rows) axes[a].push_back(r[a]);
        std::sort(axes[a].begin(), axes[a].end());
        axes[a].erase(std::unique(axes[a].begin(), axes[a].end()), axes[a].end());
    }
    std::size_t expected = dim == 1 ? axes[0].size() : axes[0].size() * axes[1].size();
    if (rows.size() != expected) throw std::invalid_argument("measure csv: rows do not form a full tensor grid");
    Grid grid = Grid::from_nodes(axes);
    std::vector<double> w(grid.size(), -1.0);
    for (const auto& r : rows) {
        std::size_t i0 = std::lower_bound(axes[0].begin(), axes[0].end(), r[0]) - axes[0].begin();
        std::size_t i1 = dim == 2 ? std::lower_bound(axes[1].begin(), axes[1].end(), r[1]) - axes[1].begin() : 0;
        std::size_t c = grid.index(i0, i1);
        if (w[c] >= 0) throw std::invalid_argument("measure csv: duplicate cell");
        w[c] = r[dim];
    }
    return DiscreteMeasure::normalized(std::move(grid), std::move(w));
}

}  // namespace sbridge
