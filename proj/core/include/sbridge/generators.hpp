#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "sbridge/measures.hpp"
#include "sbridge/orlicz.hpp"

namespace sbridge {

struct GaussianComponent {
    double weight = 1;
    Point mean{0, 0};
    double sigma = 1;
};

// Cell masses proportional to density(centre) * cell volume.
DiscreteMeasure discretize(const Grid& grid, const std::function<double(const Point&)>& density);

DiscreteMeasure gaussian_measure(const Grid& grid, Point mean, double sigma);
DiscreteMeasure mixture_measure(const Grid& grid, const std::vector<GaussianComponent>& comps);
// Uniform on the box [a0,b0] (x [a1,b1] in 2d), by cell-centre membership.
DiscreteMeasure uniform_measure(const Grid& grid, Point a, Point b);

// Seeded family used by the batteries: 1-3 isotropic Gaussian bumps with
// means in [-1.5,1.5]^d, widths in [0.5,1.2] and weights in [0.3,1].
std::vector<GaussianComponent> random_mixture_components(std::mt19937_64& rng, int dim);
DiscreteMeasure random_smooth_measure(const Grid& grid, std::mt19937_64& rng);

// A smooth bounded test function h = sin(a.x + b), centred so that
// sum h*p = 0 and scaled to sup|h| = 1.
std::vector<double> random_perturbation_direction(const DiscreteMeasure& p, std::mt19937_64& rng);
// (1 + eps*h) p, renormalized against round-off. Needs |eps| < 1.
DiscreteMeasure perturb(const DiscreteMeasure& p, const std::vector<double>& h, double eps);

// Deterministic sub-stream for item k of a battery seeded with `seed`.
std::mt19937_64 battery_stream(std::uint64_t seed, std::uint64_t item);

// Uniform on [lo, hi) from the top 53 bits; identical on every platform.
double uniform_real(std::mt19937_64& rng, double lo, double hi);

// Item k of the random smooth pair battery.
std::pair<DiscreteMeasure, DiscreteMeasure> random_pair(const Grid& grid, std::uint64_t seed, std::uint64_t item);

// Item k of a perturbation family: a random smooth pair and its
// (1 + eps h) mu, (1 + eps k) nu companions. The directions depend only on
// (seed, item), so varying eps walks along one family. With eps_mu = 0 only
// nu moves.
struct PerturbedPairs {
    DiscreteMeasure mu, nu, mu_bar, nu_bar;
};
PerturbedPairs perturbation_family(const Grid& grid, std::uint64_t seed, std::uint64_t item, double eps_mu,
                                   double eps_nu);

// Cell weights uniform in [0.05, 1], normalized.
DiscreteMeasure random_positive_measure(const Grid& grid, std::mt19937_64& rng);

enum class OrliczFlavor { General, ExponentAtMostOne, AllAboveOne, AllBelowOne };

// Random instance on n cells of [0, 1]: positive q and p, h = e^{U} with U
// drawn according to the flavour, exponents in [0.3, 3].
OrliczContext random_orlicz_context(std::mt19937_64& rng, std::size_t n, OrliczFlavor flavor);

}  // namespace sbridge
