#pragma once

#include <string>
#include <vector>

#include "sbridge/measures.hpp"
#include "sbridge/report.hpp"

namespace sbridge {

struct HMinusOneResult {
    double norm = 0;  // +inf when the weight's support does not connect the signed measure
    bool finite = true;
    std::size_t cg_iterations = 0;
    double relative_residual = 0;
    bool converged = true;
    std::vector<double> potential;  // solution h of L_mu h = nu
    double dirichlet_energy = 0;    // sum_e w_e (h_a - h_b)^2
    std::string diagnostic;
};

// Edge weight between adjacent cells a, b: (mu_a + mu_b) / 2 / |x_a - x_b|^2,
// cells below kMassFloor counted as empty.
struct WeightedEdge {
    std::size_t a, b;
    double w;
};
std::vector<WeightedEdge> poisson_edges(const DiscreteMeasure& mu);

// sup{<h, nu> : sum_e w_e (dh)^2 <= 1} via conjugate gradients on the weighted
// graph Laplacian, projecting out constants on each connected component.
HMinusOneResult h_minus_one(const SignedMeasure& nu, const DiscreteMeasure& mu, double cg_tol = 1e-10);
double h_minus_one_norm(const SignedMeasure& nu, const DiscreteMeasure& mu, double cg_tol = 1e-10);

// How a 1d grid measure is read as a measure on the line: point masses at the
// cell centres, or uniform density across each cell.
enum class Representation { Atoms, Cells };

// W2 from quantile functions. n_quantiles == 0 integrates exactly over the
// merged breakpoints; otherwise midpoint quadrature on u.
double wasserstein2_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t n_quantiles = 0,
                       Representation rep = Representation::Atoms);
// Point clouds on the line with nonnegative weights of equal total.
double wasserstein2_points_1d(std::vector<double> xs, std::vector<double> ws, std::vector<double> ys,
                              std::vector<double> vs);

// Exact transport LP on the atoms (any dimension), at most 64 atoms per side.
double wasserstein2_exact_small(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// W2(mu, mu_bar) <= 2 ||mu - mu_bar||_{H^-1(mu)}; W2 uses the cell
// representation in 1d and the exact LP otherwise.
InequalityReport w2_h_minus_one_comparison(const DiscreteMeasure& mu, const DiscreteMeasure& mu_bar);

}  // namespace sbridge
