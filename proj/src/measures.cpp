#include "pphi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pphi/parallel.hpp"
#include "pphi/transport.hpp"

namespace pphi {

namespace {

// Nearest-neighbor chordal distances within a point set.
std::vector<double> nearest_neighbor_dist(const std::vector<CP1Point>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = chordal_dist(pts[i], pts[j]);
            nn[i] = std::min(nn[i], d);
            nn[j] = std::min(nn[j], d);
        }
    return nn;
}

// Self-energy of a uniform disk of Euclidean radius r for the log|z-w|^2
// kernel: 2 log r - 1/2.
inline double disk_self_energy(double r) { return 2.0 * std::log(r) - 0.5; }

// Potential of a uniform unit-mass disk (radius r, center c) for the
// log|z-w|^2 kernel, exact inside and out.
inline double disk_log_potential(double dist, double r) {
    if (dist >= r) return 2.0 * std::log(dist);
    const double q = dist / r;
    return 2.0 * std::log(r) + (q * q - 1.0);
}

// Euclidean cap radius corresponding to a chordal radius at the point.
double euclid_cap_radius(const CP1Point& p, double chordal_radius) {
    const double stretch = p.at_infinity ? 1.0 : (1.0 + std::norm(p.z));
    return chordal_radius * stretch;
}

double weight_at(const WeightedGeometry& geom, const CP1Point& p) {
    return p.at_infinity ? geom.phi_infinity_offset() : geom.weight(p.z);
}

} // namespace

double green_energy(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                    EnergyMode mode) {
    mu.validate(1e-9);
    const std::size_t n = mu.size();
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (mu.weights[i] == 0.0 || mu.weights[j] == 0.0) continue;
            off += 2.0 * mu.weights[i] * mu.weights[j] * geom.green(mu.points[i], mu.points[j]);
        }
    if (mode == EnergyMode::OffDiagonal) return off;

    std::vector<double> nn = nearest_neighbor_dist(mu.points);
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu.weights[i] == 0.0) continue;
        if (!(nn[i] > 0.0))
            throw std::domain_error(
                "green_energy: full mode diverges on coincident atoms");
        const double r = euclid_cap_radius(mu.points[i], 0.5 * nn[i]);
        diag += mu.weights[i] * mu.weights[i] *
                (disk_self_energy(r) - 2.0 * weight_at(geom, mu.points[i]) +
                 geom.green_constant());
    }
    return off + diag;
}

double green_potential(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                       const CP1Point& z) {
    double u = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.weights[j] == 0.0) continue;
        if (same_point(z, mu.points[j]))
            throw std::domain_error("green_potential: evaluation at an atom");
        u += mu.weights[j] * geom.green(z, mu.points[j]);
    }
    return u;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    mu.validate(1e-9);
    nu.validate(1e-9);

    // Sorting both sides by angle makes the staircase starting basis of the
    // transport solver nearly the monotone coupling; the optimum is
    // unaffected.
    auto angle_key = [](const CP1Point& p) {
        if (p.at_infinity) return 10.0;
        return std::atan2(p.z.imag(), p.z.real()) + 1e-9 * std::abs(p.z);
    };
    auto collect = [&](const DiscreteMeasure& src, std::vector<CP1Point>& pts,
                       std::vector<double>& w) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < src.size(); ++i)
            if (src.weights[i] > 1e-16) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return angle_key(src.points[a]) < angle_key(src.points[b]);
        });
        for (std::size_t i : idx) {
            pts.push_back(src.points[i]);
            w.push_back(src.weights[i]);
        }
    };
    std::vector<CP1Point> a_pts, b_pts;
    std::vector<double> a_w, b_w;
    collect(mu, a_pts, a_w);
    collect(nu, b_pts, b_w);
    if (a_pts.empty() || b_pts.empty())
        throw std::invalid_argument("wasserstein: empty measure");
    if (static_cast<long>(a_pts.size()) * static_cast<long>(b_pts.size()) > 80000000L)
        throw std::invalid_argument("wasserstein: problem too large; aggregate first");

    TransportSolution sol = solve_transport(
        a_w, b_w, [&](int i, int j) { return chordal_dist(a_pts[i], b_pts[j]); });
    if (std::abs(sol.cost - sol.dual_value) > 1e-7 * (1.0 + std::abs(sol.cost)))
        throw std::runtime_error("wasserstein: optimality certificate failed");
    return sol.cost;
}

GridEnergy::GridEnergy(const WeightedGeometry& geom, std::vector<Complex> grid)
    : grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    if (n < 2) throw std::invalid_argument("GridEnergy: need at least 2 grid points");
    if (n > 8000)
        throw std::invalid_argument("GridEnergy: grid capped at 8000 points");

    std::vector<double> phi(n), stretch(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = geom.weight(grid_[i]);
        stretch[i] = 1.0 + std::norm(grid_[i]);
    }

    k_.resize(n, n);
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    const double ch = geom.green_constant();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = std::norm(grid_[i] - grid_[j]);
            const double g = std::log(d2) - phi[i] - phi[j] + ch;
            k_(i, j) = g;
            k_(j, i) = g;
            const double chd = std::sqrt(d2 / (stretch[i] * stretch[j]));
            nn[i] = std::min(nn[i], chd);
            nn[j] = std::min(nn[j], chd);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(nn[i] > 0.0))
            throw std::invalid_argument("GridEnergy: duplicate grid points");
        // Disjoint caps keep the quadratic form exactly concave on
        // differences of probability vectors.
        const double r = 0.45 * nn[i] * stretch[i];
        k_(i, i) = disk_self_energy(r) - 2.0 * phi[i] + ch;
    }

    std::vector<double> nn_sorted(nn);
    std::sort(nn_sorted.begin(), nn_sorted.end());
    spacing_ = nn_sorted[n / 2];
}

double GridEnergy::energy(const Eigen::VectorXd& w) const {
    return w.dot(k_ * w);
}

Eigen::VectorXd GridEnergy::potential(const Eigen::VectorXd& w) const {
    return k_ * w;
}

EquilibriumResult equilibrium_measure(const GridEnergy& grid_energy,
                                      const EquilibriumConfig& cfg,
                                      std::optional<Eigen::VectorXd> init) {
    const Eigen::MatrixXd& k = grid_energy.kernel();
    const int n = static_cast<int>(k.rows());

    Eigen::VectorXd w;
    if (init) {
        w = *init;
        if (w.size() != n || w.minCoeff() < 0.0)
            throw std::invalid_argument("equilibrium_measure: bad initial weights");
        w /= w.sum();
    } else {
        w = Eigen::VectorXd::Constant(n, 1.0 / n);
    }

    // Minimize E(w) = 1/2 w^T Q w with Q = -K by pairwise Frank-Wolfe with
    // an exact line search; Q is positive semidefinite on zero-sum
    // directions by the cap construction.
    Eigen::VectorXd g = -(k * w); // gradient of E
    EquilibriumResult res;
    long it = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (; it < cfg.max_iters; ++it) {
        int s = 0;
        double gs = g(0);
        for (int i = 1; i < n; ++i)
            if (g(i) < gs) {
                gs = g(i);
                s = i;
            }
        int a = -1;
        double ga = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            if (w(i) > 0.0 && g(i) > ga) {
                ga = g(i);
                a = i;
            }
        gap = g.dot(w) - gs;
        if (gap <= cfg.gap_tol || a < 0 || a == s) break;

        const double dqd = -(k(s, s) + k(a, a) - 2.0 * k(s, a));
        double eta = (dqd > 0.0) ? (ga - gs) / dqd : w(a);
        eta = std::min(eta, w(a));
        if (eta <= 0.0) break;
        w(s) += eta;
        w(a) -= eta;
        if (w(a) < 1e-15) w(a) = 0.0;
        g += eta * (-(k.col(s)) + k.col(a));
        if ((it & 2047) == 2047) g = -(k * w); // refresh accumulated drift
    }

    res.weights = w;
    res.iterations = it;
    res.fw_gap = gap;

    // Variational certificate: U constant on the support, no larger off it.
    Eigen::VectorXd u = k * w;
    std::vector<double> on_supp;
    for (int i = 0; i < n; ++i)
        if (w(i) > 1e-9) on_supp.push_back(u(i));
    std::sort(on_supp.begin(), on_supp.end());
    const double level = on_supp[on_supp.size() / 2];
    double spread = 0.0;
    for (double v : on_supp) spread = std::max(spread, std::abs(v - level));
    res.potential_spread = spread;
    res.off_support_excess = u.maxCoeff() - level;
    res.certified = (gap <= cfg.gap_tol * 10.0) && spread < 1e-5 &&
                    res.off_support_excess < spread + 1e-7;

    res.measure.points.clear();
    res.measure.weights.clear();
    const double total = w.sum();
    for (int i = 0; i < n; ++i)
        if (w(i) > 0.0) {
            res.measure.points.push_back(CP1Point::finite(grid_energy.grid()[i]));
            res.measure.weights.push_back(w(i) / total);
        }
    return res;
}

double calibrate_eh(const GridEnergy& grid_energy, const Eigen::VectorXd& w_eq) {
    const double e = grid_energy.energy(w_eq);
    const double sup = grid_energy.potential(w_eq).maxCoeff();
    return 0.5 * e - sup;
}

RateValue rate_functional_on_grid(const GridEnergy& grid_energy,
                                  const Eigen::VectorXd& w, double eh) {
    RateValue rv;
    rv.energy = grid_energy.energy(w);
    rv.sup_potential = grid_energy.potential(w).maxCoeff();
    rv.eh_constant = eh;
    rv.total = -0.5 * rv.energy + rv.sup_potential + rv.eh_constant;
    return rv;
}

RateValue rate_functional(const DiscreteMeasure& mu, const WeightedGeometry& geom,
                          double eh, double cap_radius) {
    mu.validate(1e-9);
    const std::size_t n = mu.size();
    const double eps =
        (cap_radius > 0.0) ? cap_radius
                           : std::min(2.0 / std::sqrt(static_cast<double>(n)), 0.3);

    std::vector<double> r(n), phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = euclid_cap_radius(mu.points[i], eps);
        phi[i] = weight_at(geom, mu.points[i]);
    }
    const double ch = geom.green_constant();

    RateValue rv;
    rv.eh_constant = eh;

    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu.weights[i] == 0.0) continue;
        energy += mu.weights[i] * mu.weights[i] *
                  (disk_self_energy(r[i]) - 2.0 * phi[i] + ch);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (mu.weights[j] == 0.0) continue;
            double logpart;
            if (mu.points[i].at_infinity || mu.points[j].at_infinity) {
                logpart = geom.green(mu.points[i], mu.points[j]) + phi[i] + phi[j] - ch;
            } else {
                const double d = std::abs(mu.points[i].z - mu.points[j].z);
                logpart = disk_log_potential(d, std::max(r[i], r[j]));
            }
            energy += 2.0 * mu.weights[i] * mu.weights[j] *
                      (logpart - phi[i] - phi[j] + ch);
        }
    }
    rv.energy = energy;

    double sup = -std::numeric_limits<double>::infinity();
    for (const Complex& z : geom.support_grid()) {
        const double phi_z = geom.weight(z);
        double u = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mu.weights[j] == 0.0) continue;
            double logpart;
            if (mu.points[j].at_infinity) {
                logpart = -phi_z - geom.phi_infinity_offset() + ch + phi_z + phi[j] - ch;
            } else {
                logpart = disk_log_potential(std::abs(z - mu.points[j].z), r[j]);
            }
            u += mu.weights[j] * (logpart - phi_z - phi[j] + ch);
        }
        sup = std::max(sup, u);
    }
    rv.sup_potential = sup;
    rv.total = -0.5 * rv.energy + rv.sup_potential + rv.eh_constant;
    return rv;
}

AggregatedMeasure aggregate_measure(const DiscreteMeasure& mu, int n_theta_bins,
                                    int n_t_bins) {
    mu.validate(1e-9);
    struct Bin {
        double mass = 0.0;
        Complex first_moment{0.0, 0.0};
    };
    std::vector<Bin> bins(static_cast<std::size_t>(n_theta_bins) * n_t_bins);
    double inf_mass = 0.0;

    auto bin_index = [&](const Complex& z) -> long {
        const double u = std::norm(z);
        const double t = u / (1.0 + u);
        const double th = std::arg(z) + std::numbers::pi;
        int bt = std::min(n_t_bins - 1, static_cast<int>(t * n_t_bins));
        int bh = std::min(n_theta_bins - 1,
                          static_cast<int>(th / (2.0 * std::numbers::pi) * n_theta_bins));
        return static_cast<long>(bt) * n_theta_bins + bh;
    };

    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weights[i] == 0.0) continue;
        if (mu.points[i].at_infinity) {
            inf_mass += mu.weights[i];
            continue;
        }
        Bin& b = bins[bin_index(mu.points[i].z)];
        b.mass += mu.weights[i];
        b.first_moment += mu.weights[i] * mu.points[i].z;
    }

    AggregatedMeasure out;
    for (const Bin& b : bins)
        if (b.mass > 0.0) {
            out.measure.points.push_back(CP1Point::finite(b.first_moment / b.mass));
            out.measure.weights.push_back(b.mass);
        }
    if (inf_mass > 0.0) {
        out.measure.points.push_back(CP1Point::infinity());
        out.measure.weights.push_back(inf_mass);
    }

    // Exact cost of moving every atom to its centroid.
    double bound = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weights[i] == 0.0 || mu.points[i].at_infinity) continue;
        const Bin& b = bins[bin_index(mu.points[i].z)];
        bound += mu.weights[i] *
                 chordal_dist(mu.points[i].z, b.first_moment / b.mass);
    }
    out.displacement_bound = bound;
    return out;
}

} // namespace pphi
