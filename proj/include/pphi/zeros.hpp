#pragma once

#include <stdexcept>
#include <vector>

#include "pphi/cp1.hpp"
#include "pphi/ensemble.hpp"

namespace pphi {

// Unordered multiset of N points on CP^1: finite zeros plus a count at
// infinity. Operations downstream must be permutation invariant.
struct ZeroConfig {
    std::vector<Complex> finite_zeros;
    int zeros_at_infinity = 0;
    int n = 0;

    void validate() const;
};

// Weighted point masses on CP^1, nonnegative weights summing to 1.
struct DiscreteMeasure {
    std::vector<CP1Point> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    void validate(double tol = 1e-12) const;
};

DiscreteMeasure measure_from_quadrature(const Quadrature& q);

struct RootFinderError : std::runtime_error {
    RootFinderError(const std::string& msg, PolySection poly)
        : std::runtime_error(msg), offending(std::move(poly)) {}
    PolySection offending;
};

// All N zeros counted with multiplicity. Leading coefficients below
// 1e-12 * max|a_j| are stripped and recorded as zeros at infinity. The
// round-trip reconstruction residual is checked against tol; failure throws
// RootFinderError with the polynomial attached.
ZeroConfig find_roots(const PolySection& s, double tol = 1e-9);

// a0 * prod (z - zeta_j), expanded by iterated multiplication. Throws when
// the configuration has zeros at infinity.
PolySection reconstruct(const ZeroConfig& zc, Complex a0);

// Mass 1/N at every zero (infinity mass aggregated into one atom).
DiscreteMeasure empirical_measure(const ZeroConfig& zc);

// max_j |ahat_j - a_j| / max_j |a_j| between two coefficient vectors of
// equal degree.
double coefficient_rel_error(const PolySection& a, const PolySection& b);

} // namespace pphi
