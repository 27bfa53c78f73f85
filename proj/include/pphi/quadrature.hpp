#pragma once

#include <complex>
#include <vector>

#include "pphi/cp1.hpp"

namespace pphi {

// Discrete integration rule on CP^1 (all nodes finite). When the rule is a
// product of radial shells and equispaced angles the shell data is kept so
// that rotation-invariant integrands can take a 1-D fast path.
struct Quadrature {
    std::vector<Complex> nodes;
    std::vector<double> weights;

    // Product metadata; n_theta == 0 means unstructured.
    int n_theta = 0;
    std::vector<double> radial_u;      // |z|^2 per shell
    std::vector<double> radial_weight; // total weight per shell

    std::size_t size() const { return nodes.size(); }
    double total_mass() const;
    bool is_radial_product() const { return n_theta > 0; }
};

// n equispaced unit-circle nodes with equal weights; integrates z^m exactly
// for |m| < n. Realizes the invariant probability measure on the circle.
Quadrature circle_rule(int n);

// Product rule uniform in (t, theta) with t = |z|^2 / (1 + |z|^2); realizes
// the normalized Fubini-Study area measure.
Quadrature sphere_grid_rule(int n_t, int n_theta);

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w);

} // namespace pphi
