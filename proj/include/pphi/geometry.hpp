#pragma once

#include <complex>
#include <vector>

#include "pphi/cp1.hpp"
#include "pphi/quadrature.hpp"

namespace pphi {

// Fubini-Study weight, phi(z) = log(1 + |z|^2).
double fs_weight(Complex z);

enum class WeightKind { FubiniStudy, FlatOnDisk, CustomRadial };

// Weight, curvature measure, auxiliary measure, base metric and support grid
// bundled together. Immutable after construction; safe to share across
// threads.
//
// Weight kinds:
//   FubiniStudy   phi = log(1 + |z|^2)
//   FlatOnDisk    phi = 0 (does not extend to infinity; intended for
//                 measures supported away from the pole, e.g. the circle)
//   CustomRadial  phi = log(1 + |z|^2) + sum_m c_m t^m with t = u/(1+u),
//                 u = |z|^2; positivity of the curvature form is checked at
//                 construction.
class WeightedGeometry {
public:
    WeightedGeometry(WeightKind kind, std::vector<double> radial_coeffs,
                     Quadrature nu, Quadrature curvature,
                     std::vector<Complex> support_grid);

    WeightKind kind() const { return kind_; }
    const std::vector<double>& radial_coeffs() const { return radial_coeffs_; }
    const Quadrature& nu() const { return nu_; }
    const Quadrature& curvature_quadrature() const { return curvature_; }
    const std::vector<Complex>& support_grid() const { return support_grid_; }
    double green_constant() const { return green_constant_; }

    double weight(Complex z) const;
    // lim_{z->inf} (phi(z) - log(1+|z|^2)); the weight must extend smoothly.
    double phi_infinity_offset() const;
    bool extends_to_infinity() const { return kind_ != WeightKind::FlatOnDisk; }

    // Chern connection coefficient of d/dz acting on the frame, i.e. the
    // derivative of -phi: nabla(p e^N) = (p' - N phi_z p) dz (x) e^N.
    Complex connection_phi_z(Complex z) const;

    // Squared norm |dz|_g^2 of the coordinate coframe in the base metric.
    double inv_metric_factor(Complex z) const;

    // Calibrated Green's function G(p,q) = log(|z-w|^2 e^{-phi(z)-phi(w)}) + c_h.
    double green(const CP1Point& p, const CP1Point& q) const;
    double green(Complex z, Complex w) const;

private:
    WeightKind kind_;
    std::vector<double> radial_coeffs_;
    Quadrature nu_;
    Quadrature curvature_;
    std::vector<Complex> support_grid_;
    double green_constant_ = 0.0;
};

// Equal-mass product rule integrating against the curvature form of the
// given weight kind; n is the total node budget.
Quadrature curvature_rule(WeightKind kind, const std::vector<double>& radial_coeffs,
                          int n);
Quadrature curvature_rule_product(WeightKind kind, const std::vector<double>& radial_coeffs,
                                  int n_t, int n_theta);

// Semi-analytic calibrated potential of the curvature measure (radial weight
// kinds only; angular integration done in closed form). Used as an oracle:
// the value is 0 for every z up to 1-D quadrature error.
double curvature_green_potential(const WeightedGeometry& geom, Complex z);

// Flat weight with nu = curvature slot = the n-node circle rule and a circle
// support grid.
WeightedGeometry make_kac_hammersley_geometry(int n_circle, int grid_size);

// Positive-curvature geometry with nu integrating against omega_h.
WeightedGeometry make_fs_geometry(int nu_nodes, int grid_size);

std::vector<Complex> circle_grid(int n);
std::vector<Complex> sphere_grid_points(int n_t, int n_theta);

} // namespace pphi
