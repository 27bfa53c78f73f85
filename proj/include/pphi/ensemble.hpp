#pragma once

#include <complex>
#include <vector>

#include "pphi/geometry.hpp"

namespace pphi {

// Degree-N polynomial stored leading-coefficient first:
//   s(z) = sum_j coeffs[N-j] z^j = coeffs[0] z^N + ... + coeffs[N].
struct PolySection {
    int degree = 0;
    std::vector<Complex> coeffs; // a_0 .. a_N, a_0 leading

    static PolySection from_monomial(std::vector<Complex> by_power);

    Complex monomial_coeff(int power) const { return coeffs[degree - power]; }
    bool is_zero() const;
    void validate() const;
};

// Value and derivative by a single Horner pass.
void poly_eval(const PolySection& s, Complex z, Complex& value, Complex& deriv);
Complex poly_value(const PolySection& s, Complex z);

// Potential P(x) = sum_{j=1..k} c_j x^j with c_k = 1; semi-bounded since the
// top coefficient is positive.
struct PotentialSpec {
    int k = 1;
    std::vector<double> c = {1.0}; // c_1 .. c_k
    bool include_kinetic = false;

    void validate() const;
    double evaluate(double x) const;
};

// ||s||^2 = int |p|^2 e^{-N phi} dnu over the geometry's nu rule.
double weighted_norm_sq(const PolySection& s, const WeightedGeometry& geom);

// Same integral against an arbitrary rule (used for the curvature-to-nu
// comparison and for oracle cross-checks).
double weighted_norm_sq(const PolySection& s, const WeightedGeometry& geom,
                        const Quadrature& rule);

// int |nabla s|^2_{h^N (x) g} dnu with the Chern connection,
// nabla(p e^N) = (p' - N phi_z p) dz (x) e^N.
double kinetic_energy(const PolySection& s, const WeightedGeometry& geom);
double kinetic_energy(const PolySection& s, const WeightedGeometry& geom,
                      const Quadrature& rule);

// S(s) = [kinetic] ||nabla s||^2 + int P(|s|^2_{h^N}) dnu.
double action(const PolySection& s, const PotentialSpec& spec,
              const WeightedGeometry& geom);

// ||nabla s||^2 / ||s||^2; throws on a zero-norm section.
double bernstein_ratio(const PolySection& s, const WeightedGeometry& geom);

// (int |p|^2 e^{-N phi} domega_h) / (int |p|^2 e^{-N phi} dnu).
double l2_condition_ratio(const PolySection& s, const WeightedGeometry& geom);

} // namespace pphi
