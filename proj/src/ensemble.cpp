#include "pphi/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace pphi {

PolySection PolySection::from_monomial(std::vector<Complex> by_power) {
    PolySection s;
    s.degree = static_cast<int>(by_power.size()) - 1;
    s.coeffs.assign(by_power.rbegin(), by_power.rend());
    s.validate();
    return s;
}

bool PolySection::is_zero() const {
    for (const Complex& a : coeffs)
        if (a != Complex{0.0, 0.0}) return false;
    return true;
}

void PolySection::validate() const {
    if (degree < 0 || coeffs.size() != static_cast<std::size_t>(degree) + 1)
        throw std::invalid_argument("PolySection: coefficient count must be degree+1");
}

void poly_eval(const PolySection& s, Complex z, Complex& value, Complex& deriv) {
    Complex p = s.coeffs[0];
    Complex d{0.0, 0.0};
    for (int i = 1; i <= s.degree; ++i) {
        d = d * z + p;
        p = p * z + s.coeffs[i];
    }
    value = p;
    deriv = d;
}

Complex poly_value(const PolySection& s, Complex z) {
    Complex p = s.coeffs[0];
    for (int i = 1; i <= s.degree; ++i) p = p * z + s.coeffs[i];
    return p;
}

void PotentialSpec::validate() const {
    if (k < 1) throw std::invalid_argument("PotentialSpec: k must be >= 1");
    if (c.size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("PotentialSpec: need exactly k coefficients");
    if (c.back() != 1.0)
        throw std::invalid_argument("PotentialSpec: normalization requires c_k = 1");
}

double PotentialSpec::evaluate(double x) const {
    double acc = 0.0;
    for (int j = k; j >= 1; --j) acc = (acc + c[j - 1]) * x;
    return acc;
}

double weighted_norm_sq(const PolySection& s, const WeightedGeometry& geom,
                        const Quadrature& rule) {
    const double n = s.degree;
    double total = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Complex z = rule.nodes[i];
        const double damp = std::exp(-n * geom.weight(z));
        total += rule.weights[i] * std::norm(poly_value(s, z)) * damp;
    }
    return total;
}

double weighted_norm_sq(const PolySection& s, const WeightedGeometry& geom) {
    return weighted_norm_sq(s, geom, geom.nu());
}

double kinetic_energy(const PolySection& s, const WeightedGeometry& geom,
                      const Quadrature& rule) {
    const double n = s.degree;
    double total = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Complex z = rule.nodes[i];
        Complex p, dp;
        poly_eval(s, z, p, dp);
        const Complex cov = dp - n * geom.connection_phi_z(z) * p;
        total += rule.weights[i] * std::norm(cov) * geom.inv_metric_factor(z) *
                 std::exp(-n * geom.weight(z));
    }
    return total;
}

double kinetic_energy(const PolySection& s, const WeightedGeometry& geom) {
    return kinetic_energy(s, geom, geom.nu());
}

double action(const PolySection& s, const PotentialSpec& spec,
              const WeightedGeometry& geom) {
    spec.validate();
    const double n = s.degree;
    const Quadrature& rule = geom.nu();
    double pot = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Complex z = rule.nodes[i];
        const double x = std::norm(poly_value(s, z)) * std::exp(-n * geom.weight(z));
        pot += rule.weights[i] * spec.evaluate(x);
    }
    if (spec.include_kinetic) pot += kinetic_energy(s, geom);
    return pot;
}

double bernstein_ratio(const PolySection& s, const WeightedGeometry& geom) {
    const double nn = weighted_norm_sq(s, geom);
    if (nn <= 0.0)
        throw std::domain_error("bernstein_ratio: degenerate (zero-norm) section");
    return kinetic_energy(s, geom) / nn;
}

double l2_condition_ratio(const PolySection& s, const WeightedGeometry& geom) {
    const double denom = weighted_norm_sq(s, geom, geom.nu());
    if (denom <= 0.0)
        throw std::domain_error("l2_condition_ratio: degenerate (zero-norm) section");
    return weighted_norm_sq(s, geom, geom.curvature_quadrature()) / denom;
}

} // namespace pphi
