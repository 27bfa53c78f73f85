#pragma once

#include <cmath>
#include <complex>

namespace pphi {

using Complex = std::complex<double>;

// Point on the Riemann sphere: a finite complex number or the point at
// infinity.
struct CP1Point {
    Complex z{0.0, 0.0};
    bool at_infinity = false;

    static CP1Point finite(Complex w) { return CP1Point{w, false}; }
    static CP1Point infinity() { return CP1Point{Complex{0.0, 0.0}, true}; }
};

inline bool same_point(const CP1Point& p, const CP1Point& q) {
    if (p.at_infinity || q.at_infinity) return p.at_infinity && q.at_infinity;
    return p.z == q.z;
}

// Chordal (Fubini-Study) distance, valued in [0, 1].
inline double chordal_dist(const CP1Point& p, const CP1Point& q) {
    if (p.at_infinity && q.at_infinity) return 0.0;
    if (p.at_infinity) return 1.0 / std::sqrt(1.0 + std::norm(q.z));
    if (q.at_infinity) return 1.0 / std::sqrt(1.0 + std::norm(p.z));
    return std::abs(p.z - q.z) /
           std::sqrt((1.0 + std::norm(p.z)) * (1.0 + std::norm(q.z)));
}

inline double chordal_dist(Complex z, Complex w) {
    return chordal_dist(CP1Point::finite(z), CP1Point::finite(w));
}

} // namespace pphi
