#include "pphi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pphi {

double fs_weight(Complex z) { return std::log1p(std::norm(z)); }

namespace {

// Radial perturbation q(t) = sum_m c_m t^m (c = radial_coeffs, m >= 1).
double perturbation(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t m = c.size(); m > 0; --m) acc = (acc + c[m - 1]) * t;
    return acc;
}

double perturbation_deriv(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t m = c.size(); m > 0; --m)
        acc = acc * t + static_cast<double>(m) * c[m - 1];
    return acc;
}

double perturbation_deriv2(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t m = c.size(); m > 1; --m)
        acc = acc * t + static_cast<double>(m) * static_cast<double>(m - 1) * c[m - 1];
    return acc;
}

// Radial mass of omega_h up to chordal coordinate t, for radial weights:
// R(t) = t + t(1-t) q'(t); R(0) = 0, R(1) = 1.
double radial_mass(const std::vector<double>& c, double t) {
    return t + t * (1.0 - t) * perturbation_deriv(c, t);
}

double radial_mass_density(const std::vector<double>& c, double t) {
    return 1.0 + (1.0 - 2.0 * t) * perturbation_deriv(c, t) +
           t * (1.0 - t) * perturbation_deriv2(c, t);
}

double invert_radial_mass(const std::vector<double>& c, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (radial_mass(c, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Composite Gauss-Legendre with panels graded geometrically toward both
// endpoints; handles integrable log singularities at a and b.
template <typename F>
double integrate_graded(F f, double a, double b) {
    static std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(12, 0.0, 1.0, gx, gw);

    std::vector<double> cuts;
    const double len = b - a;
    for (int k = 44; k >= 1; --k) cuts.push_back(a + len * std::ldexp(0.5, -k));
    cuts.push_back(a + 0.5 * len);
    for (int k = 1; k <= 44; ++k) cuts.push_back(b - len * std::ldexp(0.5, -k));

    double total = 0.0;
    double left = a;
    cuts.push_back(b);
    for (double right : cuts) {
        if (right <= left) continue;
        const double h = right - left;
        double s = 0.0;
        for (std::size_t i = 0; i < gx.size(); ++i) s += gw[i] * f(left + h * gx[i]);
        total += h * s;
        left = right;
    }
    return total;
}

struct RadialPotential {
    const std::vector<double>& c;

    double phi_of_u(double u) const {
        return std::log1p(u) + perturbation(c, u / (1.0 + u));
    }

    // Integrals with endpoint singularities at t = 1 run in s = 1 - t so the
    // graded panels resolve the singularity without rounding 1 - t to zero.
    double mean_phi() const {
        return integrate_graded(
            [&](double s) {
                return (-std::log(s) + perturbation(c, 1.0 - s)) *
                       radial_mass_density(c, 1.0 - s);
            },
            0.0, 1.0);
    }

    // int log|z-w|^2 domega(w), angular part in closed form:
    // (1/2pi) int log|z - r e^{i th}|^2 dth = 2 log max(|z|, r).
    double log_potential(double u_z) const {
        const double t_z = u_z / (1.0 + u_z);
        const double head = (u_z > 0.0) ? std::log(u_z) * radial_mass(c, t_z) : 0.0;
        const double tail = integrate_graded(
            [&](double s) {
                return std::log((1.0 - s) / s) * radial_mass_density(c, 1.0 - s);
            },
            0.0, 1.0 - t_z);
        return head + tail;
    }

    // Uncalibrated potential of omega_h: int (log|z-w|^2 - phi(w)) domega - phi(z).
    double uncalibrated(double u_z) const {
        return log_potential(u_z) - phi_of_u(u_z) - mean_phi();
    }
};

} // namespace

WeightedGeometry::WeightedGeometry(WeightKind kind, std::vector<double> radial_coeffs,
                                   Quadrature nu, Quadrature curvature,
                                   std::vector<Complex> support_grid)
    : kind_(kind),
      radial_coeffs_(std::move(radial_coeffs)),
      nu_(std::move(nu)),
      curvature_(std::move(curvature)),
      support_grid_(std::move(support_grid)) {
    if (std::abs(nu_.total_mass() - 1.0) > 1e-12)
        throw std::invalid_argument("geometry: nu must be a probability measure");
    if (std::abs(curvature_.total_mass() - 1.0) > 1e-12)
        throw std::invalid_argument("geometry: curvature rule must have unit mass");
    for (const Complex& z : nu_.nodes)
        if (!std::isfinite(weight(z)))
            throw std::invalid_argument("geometry: weight not finite on a nu node");

    switch (kind_) {
    case WeightKind::FubiniStudy:
        green_constant_ = 1.0;
        break;
    case WeightKind::FlatOnDisk:
        green_constant_ = 0.0;
        break;
    case WeightKind::CustomRadial: {
        // Reject weights whose curvature form is not positive.
        for (int i = 0; i <= 400; ++i) {
            const double t = i / 400.0;
            if (radial_mass_density(radial_coeffs_, t) <= 0.0)
                throw std::invalid_argument(
                    "geometry: custom radial weight has non-positive curvature");
        }
        RadialPotential rp{radial_coeffs_};
        green_constant_ = -rp.uncalibrated(0.0);
        // The calibrated potential of omega_h must be the same constant at
        // every point; assert on a spread of radii.
        for (double u : {0.07, 0.5, 1.0, 3.0, 21.0}) {
            const double resid = rp.uncalibrated(u) + green_constant_;
            if (std::abs(resid) > 1e-6)
                throw std::runtime_error(
                    "geometry: Green constant calibration failed to be constant");
        }
        break;
    }
    }
}

double WeightedGeometry::weight(Complex z) const {
    switch (kind_) {
    case WeightKind::FubiniStudy: return fs_weight(z);
    case WeightKind::FlatOnDisk: return 0.0;
    case WeightKind::CustomRadial: {
        const double u = std::norm(z);
        return std::log1p(u) + perturbation(radial_coeffs_, u / (1.0 + u));
    }
    }
    return 0.0;
}

double WeightedGeometry::phi_infinity_offset() const {
    switch (kind_) {
    case WeightKind::FubiniStudy: return 0.0;
    case WeightKind::FlatOnDisk:
        throw std::domain_error("flat weight does not extend to infinity");
    case WeightKind::CustomRadial: return perturbation(radial_coeffs_, 1.0);
    }
    return 0.0;
}

Complex WeightedGeometry::connection_phi_z(Complex z) const {
    switch (kind_) {
    case WeightKind::FubiniStudy: return std::conj(z) / (1.0 + std::norm(z));
    case WeightKind::FlatOnDisk: return Complex{0.0, 0.0};
    case WeightKind::CustomRadial: {
        // phi = F(u) with u = |z|^2; phi_z = F'(u) conj(z). F' by central
        // differences (no symbolic machinery for custom weights).
        const double u = std::norm(z);
        const double h = 1e-5 * (1.0 + u);
        const double up = u + h, um = std::max(u - h, 0.0);
        auto F = [&](double v) {
            return std::log1p(v) + perturbation(radial_coeffs_, v / (1.0 + v));
        };
        const double fp = (F(up) - F(um)) / (up - um);
        return fp * std::conj(z);
    }
    }
    return Complex{0.0, 0.0};
}

double WeightedGeometry::inv_metric_factor(Complex z) const {
    if (kind_ == WeightKind::FlatOnDisk) return 1.0;
    const double s = 1.0 + std::norm(z);
    return s * s;
}

double WeightedGeometry::green(Complex z, Complex w) const {
    if (z == w) throw std::domain_error("green: diagonal evaluation");
    return std::log(std::norm(z - w)) - weight(z) - weight(w) + green_constant_;
}

double WeightedGeometry::green(const CP1Point& p, const CP1Point& q) const {
    if (same_point(p, q)) throw std::domain_error("green: diagonal evaluation");
    if (!p.at_infinity && !q.at_infinity) return green(p.z, q.z);
    const Complex z = p.at_infinity ? q.z : p.z;
    // lim_{w->inf} (log|z-w|^2 - phi(w)) = -phi_infinity_offset.
    return -weight(z) - phi_infinity_offset() + green_constant_;
}

Quadrature curvature_rule_product(WeightKind kind, const std::vector<double>& radial_coeffs,
                                  int n_t, int n_theta) {
    if (n_t < 1 || n_theta < 1)
        throw std::invalid_argument("curvature_rule: sizes must be >= 1");
    if (kind == WeightKind::FlatOnDisk)
        throw std::invalid_argument("curvature_rule: flat weight has no curvature form");

    // Radial nodes by composite Gauss-Legendre in the curvature mass
    // coordinate, angular nodes equispaced.
    static std::vector<double> gx, gw;
    if (gx.empty()) gauss_legendre(6, 0.0, 1.0, gx, gw);
    const int panels = std::max(1, (n_t + 5) / 6);

    Quadrature q;
    q.n_theta = n_theta;
    for (int p = 0; p < panels; ++p) {
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double mass = (p + gx[i]) / panels;
            const double t = (kind == WeightKind::FubiniStudy)
                                 ? mass
                                 : invert_radial_mass(radial_coeffs, mass);
            q.radial_u.push_back(t / (1.0 - t));
            q.radial_weight.push_back(gw[i] / panels);
        }
    }
    q.nodes.reserve(q.radial_u.size() * n_theta);
    q.weights.reserve(q.radial_u.size() * n_theta);
    for (std::size_t s = 0; s < q.radial_u.size(); ++s) {
        const double r = std::sqrt(q.radial_u[s]);
        const double w = q.radial_weight[s] / n_theta;
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * std::numbers::pi * j / n_theta;
            q.nodes.push_back(Complex{r * std::cos(th), r * std::sin(th)});
            q.weights.push_back(w);
        }
    }
    return q;
}

Quadrature curvature_rule(WeightKind kind, const std::vector<double>& radial_coeffs, int n) {
    int n_theta = std::max(4, static_cast<int>(std::lround(std::sqrt(2.0 * n))));
    int n_t = std::max(1, (n + n_theta - 1) / n_theta);
    return curvature_rule_product(kind, radial_coeffs, n_t, n_theta);
}

double curvature_green_potential(const WeightedGeometry& geom, Complex z) {
    if (geom.kind() == WeightKind::FlatOnDisk)
        throw std::invalid_argument("curvature potential needs a curvature form");
    RadialPotential rp{geom.radial_coeffs()};
    return rp.uncalibrated(std::norm(z)) + geom.green_constant();
}

std::vector<Complex> circle_grid(int n) {
    std::vector<Complex> g(n);
    for (int l = 0; l < n; ++l) {
        const double th = 2.0 * std::numbers::pi * l / n;
        g[l] = Complex{std::cos(th), std::sin(th)};
    }
    return g;
}

std::vector<Complex> sphere_grid_points(int n_t, int n_theta) {
    std::vector<Complex> g;
    g.reserve(static_cast<std::size_t>(n_t) * n_theta);
    for (int i = 0; i < n_t; ++i) {
        const double t = (i + 0.5) / n_t;
        const double r = std::sqrt(t / (1.0 - t));
        // Stagger alternate rings by half a step so neighbors interleave.
        const double off = (i % 2 == 0) ? 0.0 : std::numbers::pi / n_theta;
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * std::numbers::pi * j / n_theta + off;
            g.push_back(Complex{r * std::cos(th), r * std::sin(th)});
        }
    }
    return g;
}

WeightedGeometry make_kac_hammersley_geometry(int n_circle, int grid_size) {
    Quadrature nu = circle_rule(n_circle);
    Quadrature ref = circle_rule(n_circle);
    return WeightedGeometry(WeightKind::FlatOnDisk, {}, std::move(nu), std::move(ref),
                            circle_grid(grid_size));
}

WeightedGeometry make_fs_geometry(int nu_nodes, int grid_size) {
    Quadrature nu = curvature_rule(WeightKind::FubiniStudy, {}, nu_nodes);
    Quadrature curv = curvature_rule(WeightKind::FubiniStudy, {}, nu_nodes);
    int n_theta = std::max(4, static_cast<int>(std::lround(std::sqrt(2.0 * grid_size))));
    int n_t = std::max(1, (grid_size + n_theta - 1) / n_theta);
    return WeightedGeometry(WeightKind::FubiniStudy, {}, std::move(nu), std::move(curv),
                            sphere_grid_points(n_t, n_theta));
}

} // namespace pphi
