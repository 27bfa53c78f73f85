#include "pphi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pphi {

double Quadrature::total_mass() const {
    // Kahan summation; large rules would otherwise drift past the
    // probability-mass tolerance.
    double s = 0.0, comp = 0.0;
    for (double w : weights) {
        const double y = w - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

Quadrature circle_rule(int n) {
    if (n < 1) throw std::invalid_argument("circle_rule: n must be >= 1");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.assign(n, 1.0 / n);
    for (int l = 0; l < n; ++l) {
        const double th = 2.0 * std::numbers::pi * l / n;
        q.nodes[l] = Complex{std::cos(th), std::sin(th)};
    }
    q.n_theta = n;
    q.radial_u = {1.0};
    q.radial_weight = {1.0};
    return q;
}

Quadrature sphere_grid_rule(int n_t, int n_theta) {
    if (n_t < 1 || n_theta < 1)
        throw std::invalid_argument("sphere_grid_rule: sizes must be >= 1");
    Quadrature q;
    q.nodes.reserve(static_cast<std::size_t>(n_t) * n_theta);
    q.weights.assign(static_cast<std::size_t>(n_t) * n_theta,
                     1.0 / (static_cast<double>(n_t) * n_theta));
    q.n_theta = n_theta;
    q.radial_u.resize(n_t);
    q.radial_weight.assign(n_t, 1.0 / n_t);
    for (int i = 0; i < n_t; ++i) {
        const double t = (i + 0.5) / n_t;
        const double u = t / (1.0 - t);
        q.radial_u[i] = u;
        const double r = std::sqrt(u);
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * std::numbers::pi * j / n_theta;
            q.nodes.push_back(Complex{r * std::cos(th), r * std::sin(th)});
        }
    }
    return q;
}

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const int m = (n + 1) / 2;
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

} // namespace pphi
