#include "pphi/zeros.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pphi {

void ZeroConfig::validate() const {
    if (zeros_at_infinity < 0 ||
        static_cast<int>(finite_zeros.size()) + zeros_at_infinity != n)
        throw std::invalid_argument("ZeroConfig: zero count must equal the degree");
}

void DiscreteMeasure::validate(double tol) const {
    if (points.size() != weights.size())
        throw std::invalid_argument("DiscreteMeasure: points/weights length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

DiscreteMeasure measure_from_quadrature(const Quadrature& q) {
    DiscreteMeasure m;
    m.points.reserve(q.size());
    for (const Complex& z : q.nodes) m.points.push_back(CP1Point::finite(z));
    m.weights = q.weights;
    m.validate(1e-9);
    return m;
}

namespace {

// Initial guesses on circles whose radii come from the upper convex hull of
// (j, log|c_j|) (coefficients in monomial order, c_m leading != 0).
std::vector<Complex> initial_guesses(const std::vector<Complex>& c, int m) {
    std::vector<double> lg(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double a = std::abs(c[j]);
        lg[j] = (a > 0.0) ? std::log(a) : -1e30;
    }
    // Upper hull from j = 0 to j = m.
    std::vector<int> hull;
    for (int j = 0; j <= m; ++j) {
        while (hull.size() >= 2) {
            const int p = hull[hull.size() - 2], q = hull[hull.size() - 1];
            const double cross = (lg[q] - lg[p]) * (j - p) - (lg[j] - lg[p]) * (q - p);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(j);
    }
    std::vector<Complex> guesses;
    guesses.reserve(m);
    int placed = 0;
    for (std::size_t seg = 0; seg + 1 < hull.size(); ++seg) {
        const int a = hull[seg], b = hull[seg + 1];
        const double r = std::exp((lg[a] - lg[b]) / (b - a));
        for (int idx = 0; idx < b - a; ++idx) {
            const double th =
                2.0 * std::numbers::pi * (placed + 0.5) / m + 0.4 * (seg + 1.0);
            guesses.push_back(r * Complex{std::cos(th), std::sin(th)});
            ++placed;
        }
    }
    while (placed < m) {
        const double th = 2.0 * std::numbers::pi * (placed + 0.5) / m;
        guesses.push_back(Complex{std::cos(th), std::sin(th)});
        ++placed;
    }
    return guesses;
}

// Horner value/derivative and the backward-error scale sum_j |c_j| |z|^j.
void eval_monomial(const std::vector<Complex>& c, int m, Complex z,
                   Complex& p, Complex& dp, double& scale) {
    p = c[m];
    dp = Complex{0.0, 0.0};
    scale = std::abs(c[m]);
    const double az = std::abs(z);
    for (int j = m - 1; j >= 0; --j) {
        dp = dp * z + p;
        p = p * z + c[j];
        scale = scale * az + std::abs(c[j]);
    }
}

// Simultaneous iteration with immediate updates. A root counts as settled
// when its residual reaches the backward-error floor; the test is re-applied
// every sweep, so a transiently small correction cannot freeze a root in a
// wrong position while its neighbors keep moving.
bool aberth(const std::vector<Complex>& c, int m, std::vector<Complex>& roots) {
    roots = initial_guesses(c, m);
    const double eps_floor = 4.0 * std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 400; ++sweep) {
        bool all_settled = true;
        for (int i = 0; i < m; ++i) {
            Complex p, dp;
            double scale;
            eval_monomial(c, m, roots[i], p, dp, scale);
            if (std::abs(p) <= eps_floor * scale) continue;
            all_settled = false;
            if (dp == Complex{0.0, 0.0}) {
                roots[i] += Complex{1e-8, 1e-8};
                continue;
            }
            const Complex newton = p / dp;
            Complex repulsion{0.0, 0.0};
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                const Complex d = roots[i] - roots[j];
                if (d == Complex{0.0, 0.0}) {
                    repulsion = Complex{0.0, 0.0};
                    break;
                }
                repulsion += 1.0 / d;
            }
            const Complex denom = 1.0 - newton * repulsion;
            Complex w = (denom == Complex{0.0, 0.0}) ? newton : newton / denom;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = newton;
            roots[i] -= w;
        }
        if (all_settled) return true;
    }
    return false;
}

void polish_roots(const std::vector<Complex>& c, int m, std::vector<Complex>& roots) {
    for (Complex& r : roots) {
        for (int it = 0; it < 3; ++it) {
            Complex p, dp;
            double scale;
            eval_monomial(c, m, r, p, dp, scale);
            if (dp == Complex{0.0, 0.0}) break;
            const Complex step = p / dp;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(r))) break;
            r -= step;
        }
    }
}

// Parlett-Reinsch style 2-power balancing, then Eigen's complex Schur.
std::vector<Complex> companion_roots(const std::vector<Complex>& c, int m) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 1; i < m; ++i) a(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) a(i, m - 1) = -c[i] / c[m];

    for (int pass = 0; pass < 20; ++pass) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            const double rn = a.row(i).lpNorm<1>();
            const double cn = a.col(i).lpNorm<1>();
            if (rn == 0.0 || cn == 0.0) continue;
            int e = 0;
            std::frexp(rn / cn, &e);
            e /= 2;
            if (e != 0) {
                const double sr = std::ldexp(rn, -e), sc = std::ldexp(cn, e);
                if (sr + sc < 0.95 * (rn + cn)) {
                    a.row(i) *= std::ldexp(1.0, -e);
                    a.col(i) *= std::ldexp(1.0, e);
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    std::vector<Complex> roots(m);
    for (int i = 0; i < m; ++i) roots[i] = solver.eigenvalues()(i);
    return roots;
}

// Multiplication order for expanding prod (z - r). Runs of angularly close
// roots blow up intermediate coefficients exponentially, so the roots are
// first sorted canonically (making the result a function of the multiset
// only) and then interleaved by a fixed pseudo-random permutation.
std::vector<Complex> balanced_order(std::vector<Complex> roots) {
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    for (std::size_t i = roots.size(); i > 1; --i)
        std::swap(roots[i - 1], roots[next() % i]);
    return roots;
}

// Iterated multiplication in extended precision: intermediate coefficients
// can grow by many orders of magnitude even in a balanced order, and the
// 64-bit mantissa absorbs that growth.
std::vector<Complex> expand_monic(const std::vector<Complex>& roots, Complex lead) {
    using CL = std::complex<long double>;
    std::vector<CL> rec = {CL(lead.real(), lead.imag())};
    for (const Complex& r : balanced_order(roots)) {
        const CL rl(r.real(), r.imag());
        rec.push_back(CL(0.0L, 0.0L));
        for (std::size_t j = rec.size() - 1; j >= 1; --j) rec[j] -= rl * rec[j - 1];
    }
    std::vector<Complex> out(rec.size());
    for (std::size_t j = 0; j < rec.size(); ++j)
        out[j] = Complex{static_cast<double>(rec[j].real()),
                         static_cast<double>(rec[j].imag())};
    return out;
}

// Two Newton steps with extended-precision evaluation push the roots well
// past the double-precision backward-error floor.
void refine_roots_extended(const std::vector<Complex>& c, int m,
                           std::vector<Complex>& roots) {
    using CL = std::complex<long double>;
    std::vector<CL> cl(m + 1);
    for (int j = 0; j <= m; ++j) cl[j] = CL(c[j].real(), c[j].imag());
    for (Complex& r : roots) {
        CL z(r.real(), r.imag());
        for (int it = 0; it < 2; ++it) {
            CL p = cl[m], dp(0.0L, 0.0L);
            for (int j = m - 1; j >= 0; --j) {
                dp = dp * z + p;
                p = p * z + cl[j];
            }
            if (dp == CL(0.0L, 0.0L)) break;
            const CL step = p / dp;
            if (std::abs(step) > 0.5L * (1.0L + std::abs(z))) break;
            z -= step;
        }
        r = Complex{static_cast<double>(z.real()), static_cast<double>(z.imag())};
    }
}

double reconstruction_residual(const std::vector<Complex>& c, int m,
                               const std::vector<Complex>& roots) {
    const std::vector<Complex> rec = expand_monic(roots, c[m]);
    double scale = 0.0, err = 0.0;
    for (int j = 0; j <= m; ++j) scale = std::max(scale, std::abs(c[j]));
    for (int j = 0; j <= m; ++j)
        err = std::max(err, std::abs(rec[j] - c[m - j]));
    return err / scale;
}

} // namespace

ZeroConfig find_roots(const PolySection& s, double tol) {
    s.validate();
    if (s.is_zero())
        throw std::invalid_argument("find_roots: zero polynomial");

    const int n = s.degree;
    double max_abs = 0.0;
    for (const Complex& a : s.coeffs) max_abs = std::max(max_abs, std::abs(a));

    // Leading-coefficient deficiency -> zeros at infinity.
    int at_inf = 0;
    while (at_inf < n && std::abs(s.coeffs[at_inf]) < 1e-12 * max_abs) ++at_inf;

    // Exact trailing zeros -> roots at the origin.
    int at_origin = 0;
    while (at_origin < n - at_inf &&
           s.coeffs[n - at_origin] == Complex{0.0, 0.0})
        ++at_origin;

    const int m = n - at_inf - at_origin; // remaining essential degree
    ZeroConfig zc;
    zc.n = n;
    zc.zeros_at_infinity = at_inf;
    zc.finite_zeros.assign(at_origin, Complex{0.0, 0.0});

    if (m > 0) {
        // Monomial order, normalized by the largest magnitude.
        std::vector<Complex> c(m + 1);
        for (int j = 0; j <= m; ++j) c[j] = s.coeffs[n - at_origin - j] / max_abs;

        std::vector<Complex> roots;
        if (m == 1) {
            roots = {-c[0] / c[1]};
        } else {
            const bool converged = aberth(c, m, roots);
            if (converged) refine_roots_extended(c, m, roots);
            if (!converged || reconstruction_residual(c, m, roots) > tol) {
                roots = companion_roots(c, m);
                polish_roots(c, m, roots);
                refine_roots_extended(c, m, roots);
                if (reconstruction_residual(c, m, roots) > tol)
                    throw RootFinderError("find_roots: residual above tolerance", s);
            }
        }
        zc.finite_zeros.insert(zc.finite_zeros.end(), roots.begin(), roots.end());
    }
    zc.validate();
    return zc;
}

PolySection reconstruct(const ZeroConfig& zc, Complex a0) {
    zc.validate();
    if (zc.zeros_at_infinity > 0)
        throw std::domain_error("reconstruct: zeros at infinity are unrepresentable");
    PolySection s;
    s.degree = zc.n;
    s.coeffs = expand_monic(zc.finite_zeros, a0);
    return s;
}

DiscreteMeasure empirical_measure(const ZeroConfig& zc) {
    zc.validate();
    DiscreteMeasure m;
    const double w = 1.0 / zc.n;
    for (const Complex& z : zc.finite_zeros) {
        m.points.push_back(CP1Point::finite(z));
        m.weights.push_back(w);
    }
    if (zc.zeros_at_infinity > 0) {
        m.points.push_back(CP1Point::infinity());
        m.weights.push_back(w * zc.zeros_at_infinity);
    }
    return m;
}

double coefficient_rel_error(const PolySection& a, const PolySection& b) {
    if (a.degree != b.degree)
        throw std::invalid_argument("coefficient_rel_error: degree mismatch");
    double scale = 0.0, err = 0.0;
    for (int j = 0; j <= a.degree; ++j) scale = std::max(scale, std::abs(a.coeffs[j]));
    for (int j = 0; j <= a.degree; ++j)
        err = std::max(err, std::abs(a.coeffs[j] - b.coeffs[j]));
    return err / scale;
}

} // namespace pphi
