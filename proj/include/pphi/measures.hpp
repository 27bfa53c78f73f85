#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "pphi/geometry.hpp"
#include "pphi/zeros.hpp"

namespace pphi {

enum class EnergyMode { Full, OffDiagonal };

// Green energy of a discrete measure. OffDiagonal is the pairwise sum
// sum_{i != j} w_i w_j G(p_i, p_j) (the empirical-measure variant). Full
// treats the measure as a quadrature of a smooth measure and corrects the
// diagonal with per-point cap self-energies; it refuses measures with
// coincident atoms, whose energy genuinely diverges.
double green_energy(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                    EnergyMode mode);

// U^mu(z) = sum_j w_j G(z, p_j); throws when z collides with an atom.
double green_potential(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                       const CP1Point& z);

// Exact 1-Wasserstein distance under the chordal ground metric.
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Decomposed rate functional value: total = -energy/2 + sup_potential + eh.
struct RateValue {
    double energy = 0.0;
    double sup_potential = 0.0;
    double eh_constant = 0.0;
    double total = 0.0;
};

// Quadratic form of the Green kernel on a fixed grid, with cap-regularized
// diagonal so that the form stays concave on differences of probability
// vectors (caps are disjoint uniform disks; their mutual energies equal the
// point values by harmonicity).
class GridEnergy {
public:
    GridEnergy(const WeightedGeometry& geom, std::vector<Complex> grid);

    const std::vector<Complex>& grid() const { return grid_; }
    const Eigen::MatrixXd& kernel() const { return k_; }
    double spacing() const { return spacing_; } // median nearest-neighbor chordal gap

    double energy(const Eigen::VectorXd& w) const;         // w^T K w
    Eigen::VectorXd potential(const Eigen::VectorXd& w) const; // K w

private:
    std::vector<Complex> grid_;
    Eigen::MatrixXd k_;
    double spacing_ = 0.0;
};

struct EquilibriumConfig {
    long max_iters = 400000;
    double gap_tol = 1e-9;   // Frank-Wolfe duality gap on the energy
    int grid_size = 2000;    // used by callers that build the grid
};

struct EquilibriumResult {
    DiscreteMeasure measure;
    Eigen::VectorXd weights;
    double fw_gap = 0.0;
    long iterations = 0;
    double potential_spread = 0.0; // max |U - median U| on the support
    double off_support_excess = 0.0; // max over grid of U - (support level)
    bool certified = false;
};

// Minimizer of the rate functional over probability measures on the grid,
// by pairwise Frank-Wolfe on the Green energy; optimality is certified by
// the variational condition (potential constant on the support, no larger
// off it).
EquilibriumResult equilibrium_measure(const GridEnergy& grid_energy,
                                      const EquilibriumConfig& cfg,
                                      std::optional<Eigen::VectorXd> init = {});

// E(h) pinned so that the rate functional vanishes at the minimizer:
// E(h) = energy(w_eq)/2 - max potential(w_eq).
double calibrate_eh(const GridEnergy& grid_energy, const Eigen::VectorXd& w_eq);

// Rate functional of a grid measure (weights on grid_energy's grid).
RateValue rate_functional_on_grid(const GridEnergy& grid_energy,
                                  const Eigen::VectorXd& w, double eh);

// Rate functional of a general discrete measure: atoms are smoothed by
// uniform chordal caps of radius 2/sqrt(#atoms) (log-singularity
// regularization at the natural inter-point scale); the sup runs over the
// geometry's support grid.
RateValue rate_functional(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                          double eh, double cap_radius = 0.0);

// Collapses nearby atoms onto weighted bin centroids ((theta, t) bins);
// the reported bound is the exact total transport cost of the collapse, so
// |W1(original, target) - W1(aggregated, target)| <= displacement_bound.
struct AggregatedMeasure {
    DiscreteMeasure measure;
    double displacement_bound = 0.0;
};
AggregatedMeasure aggregate_measure(const DiscreteMeasure& mu, int n_theta_bins,
                                    int n_t_bins);

} // namespace pphi
