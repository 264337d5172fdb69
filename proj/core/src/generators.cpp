#include "sbridge/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace sbridge {

namespace {

// std::uniform_real_distribution is allowed to differ between standard
// libraries; this keeps batteries reproducible everywhere.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

DiscreteMeasure discretize(const Grid& grid, const std::function<double(const Point&)>& density) {
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = density(grid.point(i)) * grid.weight(i);
    return DiscreteMeasure::normalized(grid, std::move(w));
}

DiscreteMeasure gaussian_measure(const Grid& grid, Point mean, double sigma) {
    return mixture_measure(grid, {GaussianComponent{1.0, mean, sigma}});
}

DiscreteMeasure mixture_measure(const Grid& grid, const std::vector<GaussianComponent>& comps) {
    if (comps.empty()) throw std::invalid_argument("mixture needs at least one component");
    const int d = grid.dim();
    for (const auto& c : comps)
        if (!(c.sigma > 0) || !(c.weight > 0)) throw std::invalid_argument("mixture component needs sigma > 0 and weight > 0");
    return discretize(grid, [&](const Point& x) {
        double s = 0;
        for (const auto& c : comps) {
            double r2 = (x[0] - c.mean[0]) * (x[0] - c.mean[0]);
            if (d == 2) r2 += (x[1] - c.mean[1]) * (x[1] - c.mean[1]);
            s += c.weight * std::pow(c.sigma, -d) * std::exp(-0.5 * r2 / (c.sigma * c.sigma));
        }
        return s;
    });
}

DiscreteMeasure uniform_measure(const Grid& grid, Point a, Point b) {
    const int d = grid.dim();
    return discretize(grid, [&](const Point& x) {
        bool in = x[0] >= a[0] && x[0] <= b[0];
        if (d == 2) in = in && x[1] >= a[1] && x[1] <= b[1];
        return in ? 1.0 : 0.0;
    });
}

std::vector<GaussianComponent> random_mixture_components(std::mt19937_64& rng, int dim) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<GaussianComponent> comps;
    for (int k = 0; k < n; ++k) {
        GaussianComponent c;
        c.weight = uniform(rng, 0.3, 1.0);
        c.mean[0] = uniform(rng, -1.5, 1.5);
        c.mean[1] = dim == 2 ? uniform(rng, -1.5, 1.5) : 0.0;
        c.sigma = uniform(rng, 0.5, 1.2);
        comps.push_back(c);
    }
    return comps;
}

DiscreteMeasure random_smooth_measure(const Grid& grid, std::mt19937_64& rng) {
    return mixture_measure(grid, random_mixture_components(rng, grid.dim()));
}

std::vector<double> random_perturbation_direction(const DiscreteMeasure& p, std::mt19937_64& rng) {
    const Grid& g = p.grid();
    const double a0 = uniform(rng, 0.5, 2.0);
    const double a1 = g.dim() == 2 ? uniform(rng, 0.5, 2.0) : 0.0;
    const double b = uniform(rng, 0.0, 6.283185307179586);
    std::vector<double> h(p.size());
    double mean = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        Point x = g.point(i);
        h[i] = std::sin(a0 * x[0] + a1 * x[1] + b);
        mean += h[i] * p[i];
    }
    double sup = 0;
    for (double& v : h) {
        v -= mean;
        sup = std::max(sup, std::abs(v));
    }
    if (sup > 0)
        for (double& v : h) v /= sup;
    return h;
}

DiscreteMeasure perturb(const DiscreteMeasure& p, const std::vector<double>& h, double eps) {
    if (h.size() != p.size()) throw StructuralError("perturb: size mismatch");
    std::vector<double> w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double f = 1.0 + eps * h[i];
        if (f < 0) throw std::invalid_argument("perturb: 1 + eps*h must stay nonnegative");
        w[i] = f * p[i];
    }
    return DiscreteMeasure::normalized(p.grid(), std::move(w));
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) { return uniform(rng, lo, hi); }

std::pair<DiscreteMeasure, DiscreteMeasure> random_pair(const Grid& grid, std::uint64_t seed, std::uint64_t item) {
    auto rng = battery_stream(seed, item);
    auto mu = random_smooth_measure(grid, rng);
    auto nu = random_smooth_measure(grid, rng);
    return {std::move(mu), std::move(nu)};
}

PerturbedPairs perturbation_family(const Grid& grid, std::uint64_t seed, std::uint64_t item, double eps_mu,
                                   double eps_nu) {
    auto rng = battery_stream(seed, item);
    auto mu = random_smooth_measure(grid, rng);
    auto nu = random_smooth_measure(grid, rng);
    auto h = random_perturbation_direction(mu, rng);
    auto k = random_perturbation_direction(nu, rng);
    auto mu_bar = eps_mu == 0 ? mu : perturb(mu, h, eps_mu);
    auto nu_bar = eps_nu == 0 ? nu : perturb(nu, k, eps_nu);
    return {std::move(mu), std::move(nu), std::move(mu_bar), std::move(nu_bar)};
}

DiscreteMeasure random_positive_measure(const Grid& grid, std::mt19937_64& rng) {
    std::vector<double> w(grid.size());
    for (double& v : w) v = uniform(rng, 0.05, 1.0);
    return DiscreteMeasure::normalized(grid, std::move(w));
}

OrliczContext random_orlicz_context(std::mt19937_64& rng, std::size_t n, OrliczFlavor flavor) {
    Grid g = Grid::uniform(0.0, 1.0, n);
    OrliczContext c;
    c.base = random_positive_measure(g, rng);
    c.p_meas = random_positive_measure(g, rng);
    c.h.resize(n);
    for (double& v : c.h) {
        switch (flavor) {
            case OrliczFlavor::AllAboveOne: v = std::exp(uniform(rng, 0.0, 2.0)); break;
            case OrliczFlavor::AllBelowOne: v = std::exp(uniform(rng, -2.0, -0.01)); break;
            default: v = std::exp(uniform(rng, -2.0, 2.0)); break;
        }
    }
    c.p = uniform(rng, 0.3, 3.0);
    c.q = uniform(rng, 0.3, 3.0);
    if (flavor == OrliczFlavor::ExponentAtMostOne) {
        if (rng() % 2) c.p = uniform(rng, 0.3, 1.0);
        else c.q = uniform(rng, 0.3, 1.0);
    }
    return c;
}

std::mt19937_64 battery_stream(std::uint64_t seed, std::uint64_t item) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(item), static_cast<std::uint32_t>(item >> 32), 0x5b1dU};
    return std::mt19937_64(seq);
}

}  // namespace sbridge
