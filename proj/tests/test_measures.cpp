#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pphi/measures.hpp"
#include "pphi/rng.hpp"
#include "pphi/transport.hpp"

using namespace pphi;

namespace {

DiscreteMeasure two_atoms(Complex a, Complex b) {
    DiscreteMeasure m;
    m.points = {CP1Point::finite(a), CP1Point::finite(b)};
    m.weights = {0.5, 0.5};
    return m;
}

// Reference min-cost flow by successive shortest augmenting paths
// (Bellman-Ford on the residual graph); exponential-free and exact for the
// small instances used here. Independent of the production solver.
double mcmf_reference(const std::vector<double>& supply,
                      const std::vector<double>& demand,
                      const std::vector<std::vector<double>>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
    std::vector<double> a(supply), b(demand);
    double total = 0.0;
    for (;;) {
        // residual arcs: (i -> j) cost c, capacity inf while a_i > 0 ... use
        // node potentials via Bellman-Ford over a graph with source/sink.
        const int s = m + n, t = m + n + 1, v = m + n + 2;
        std::vector<double> dist(v, 1e18);
        std::vector<int> from_i(v, -1), from_j(v, -1);
        dist[s] = 0.0;
        for (int round = 0; round < v; ++round) {
            bool changed = false;
            for (int i = 0; i < m; ++i)
                if (a[i] > 1e-15 && dist[s] < dist[i]) {
                    dist[i] = dist[s];
                    from_i[i] = s;
                    changed = true;
                }
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) {
                    if (dist[i] + cost[i][j] < dist[m + j] - 1e-15) {
                        dist[m + j] = dist[i] + cost[i][j];
                        from_i[m + j] = i;
                        from_j[m + j] = -1;
                        changed = true;
                    }
                    if (flow[i][j] > 1e-15 &&
                        dist[m + j] - cost[i][j] < dist[i] - 1e-15) {
                        dist[i] = dist[m + j] - cost[i][j];
                        from_i[i] = m + j;
                        changed = true;
                    }
                }
            for (int j = 0; j < n; ++j)
                if (b[j] > 1e-15 && dist[m + j] < dist[t]) {
                    dist[t] = dist[m + j];
                    from_i[t] = m + j;
                    changed = true;
                }
            if (!changed) break;
        }
        if (dist[t] >= 1e17) break;
        // trace path, find bottleneck
        std::vector<int> path;
        int cur = t;
        while (cur != s) {
            path.push_back(cur);
            cur = from_i[cur];
        }
        std::reverse(path.begin(), path.end());
        double push = 1e18;
        {
            int prev = s;
            for (int node : path) {
                if (prev == s) push = std::min(push, a[node]);
                if (node == t) push = std::min(push, b[path[path.size() - 2] - m]);
                prev = node;
            }
            // backward arcs bound
            prev = s;
            for (std::size_t q = 0; q + 1 < path.size(); ++q) {
                const int x = path[q], y = path[q + 1];
                if (x < m && y >= m && y < m + n) {
                    // forward arc, no cap
                } else if (x >= m && x < m + n && y < m) {
                    push = std::min(push, flow[y][x - m]);
                }
                prev = x;
            }
        }
        // apply
        {
            int first = path[0];
            a[first] -= push;
            int lastj = path[path.size() - 2] - m;
            b[lastj] -= push;
            for (std::size_t q = 0; q + 1 < path.size(); ++q) {
                const int x = path[q], y = path[q + 1];
                if (y == t) break;
                if (x < m && y >= m) {
                    flow[x][y - m] += push;
                    total += push * cost[x][y - m];
                } else if (x >= m && y < m) {
                    flow[y][x - m] -= push;
                    total -= push * cost[y][x - m];
                }
            }
        }
    }
    return total;
}

} // namespace

TEST_CASE("transport solver against the reference on random instances") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(8));
        const int n = 2 + static_cast<int>(rng.below(8));
        std::vector<double> a(m), b(n);
        double sa = 0.0, sb = 0.0;
        for (double& x : a) {
            x = rng.uniform(0.05, 1.0);
            sa += x;
        }
        for (double& x : b) {
            x = rng.uniform(0.05, 1.0);
            sb += x;
        }
        for (double& x : b) x *= sa / sb;
        std::vector<std::vector<double>> c(m, std::vector<double>(n));
        for (auto& row : c)
            for (double& x : row) x = rng.uniform(0.0, 1.0);

        TransportSolution sol =
            solve_transport(a, b, [&](int i, int j) { return c[i][j]; });
        const double ref = mcmf_reference(a, b, c);
        CHECK(sol.cost == doctest::Approx(ref).epsilon(1e-7));
        CHECK(std::abs(sol.cost - sol.dual_value) < 1e-8 * (1.0 + sol.cost));
    }
}

TEST_CASE("transport on the line matches the monotone coupling") {
    // Concave increasing ground cost of the angular gap: the sorted coupling
    // is optimal, and here it pairs atoms one-to-one.
    std::vector<double> xs = {-1.4, -0.3, 0.2, 1.9};
    std::vector<double> ys = {-0.9, -0.1, 0.8, 2.5};
    std::vector<double> w(4, 0.25);
    double expected = 0.0;
    for (int i = 0; i < 4; ++i)
        expected += 0.25 * chordal_dist(Complex{xs[i], 0.0}, Complex{ys[i], 0.0});
    TransportSolution sol = solve_transport(w, w, [&](int i, int j) {
        return chordal_dist(Complex{xs[i], 0.0}, Complex{ys[j], 0.0});
    });
    CHECK(sol.cost == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("wasserstein basic identities") {
    WeightedGeometry kh = make_kac_hammersley_geometry(32, 32);
    (void)kh;
    DiscreteMeasure mu = two_atoms({0.3, 0.4}, {-1.0, 0.2});
    CHECK(wasserstein(mu, mu) <= 1e-10);

    DiscreteMeasure d0, dinf;
    d0.points = {CP1Point::finite({0.0, 0.0})};
    d0.weights = {1.0};
    dinf.points = {CP1Point::infinity()};
    dinf.weights = {1.0};
    CHECK(wasserstein(d0, dinf) == doctest::Approx(1.0).epsilon(1e-10));

    DiscreteMeasure circle_unif = measure_from_quadrature(circle_rule(16));
    CHECK(wasserstein(circle_unif, circle_unif) <= 1e-10);
}

TEST_CASE("wasserstein against brute-force assignment") {
    Rng rng(72);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6;
        DiscreteMeasure mu, nu;
        for (int i = 0; i < n; ++i) {
            mu.points.push_back(CP1Point::finite(
                {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}));
            nu.points.push_back(CP1Point::finite(
                {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}));
            mu.weights.push_back(1.0 / n);
            nu.weights.push_back(1.0 / n);
        }
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e18;
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i)
                c += chordal_dist(mu.points[i], nu.points[perm[i]]) / n;
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(wasserstein(mu, nu) == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("green energy two-point formula and symmetry") {
    WeightedGeometry fs = make_fs_geometry(2000, 256);
    DiscreteMeasure mu = two_atoms({1.0, 0.0}, {-1.0, 0.0});
    const double g = fs.green(Complex{1.0, 0.0}, Complex{-1.0, 0.0});
    CHECK(green_energy(mu, fs, EnergyMode::OffDiagonal) ==
          doctest::Approx(0.5 * g).epsilon(1e-14));

    DiscreteMeasure swapped = two_atoms({-1.0, 0.0}, {1.0, 0.0});
    CHECK(green_energy(mu, fs, EnergyMode::OffDiagonal) ==
          green_energy(swapped, fs, EnergyMode::OffDiagonal));

    DiscreteMeasure dup = two_atoms({1.0, 0.0}, {1.0, 0.0});
    CHECK_THROWS_AS(green_energy(dup, fs, EnergyMode::Full), std::domain_error);
}

TEST_CASE("full-mode energy of the curvature quadrature is near zero") {
    // The cap-corrected double sum converges at rate ~1/n; check the level
    // and that refinement shrinks it.
    WeightedGeometry fs_small = make_fs_geometry(900, 64);
    WeightedGeometry fs_big = make_fs_geometry(3600, 64);
    const double e_small = std::abs(
        green_energy(measure_from_quadrature(fs_small.curvature_quadrature()),
                     fs_small, EnergyMode::Full));
    const double e_big = std::abs(
        green_energy(measure_from_quadrature(fs_big.curvature_quadrature()),
                     fs_big, EnergyMode::Full));
    CHECK(e_small < 2e-2);
    CHECK(e_big < 8e-3);
    CHECK(e_big < e_small);
}

TEST_CASE("green potential basics") {
    WeightedGeometry fs = make_fs_geometry(2000, 256);
    DiscreteMeasure delta;
    delta.points = {CP1Point::finite({0.5, 0.5})};
    delta.weights = {1.0};
    const CP1Point z = CP1Point::finite({-0.3, 0.1});
    CHECK(green_potential(delta, fs, z) ==
          doctest::Approx(fs.green(z, delta.points[0])).epsilon(1e-14));
    CHECK_THROWS_AS(green_potential(delta, fs, delta.points[0]), std::domain_error);

    // Linearity in the measure.
    DiscreteMeasure a = two_atoms({1.0, 0.0}, {0.0, 1.0});
    DiscreteMeasure b = two_atoms({-1.0, 0.3}, {2.0, -0.4});
    DiscreteMeasure mix;
    mix.points = a.points;
    mix.weights = {0.25, 0.25};
    mix.points.insert(mix.points.end(), b.points.begin(), b.points.end());
    mix.weights.insert(mix.weights.end(), {0.25, 0.25});
    CHECK(green_potential(mix, fs, z) ==
          doctest::Approx(0.5 * green_potential(a, fs, z) +
                          0.5 * green_potential(b, fs, z))
              .epsilon(1e-13));

    // Potential of the curvature measure vanishes (coarse: direct sum of a
    // log-singular integrand).
    DiscreteMeasure omega = measure_from_quadrature(fs.curvature_quadrature());
    CHECK(std::abs(green_potential(omega, fs, z)) < 2e-2);
}

TEST_CASE("equilibrium on the circle is uniform") {
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 256);
    GridEnergy grid(kh, kh.support_grid());
    EquilibriumConfig cfg;
    EquilibriumResult res = equilibrium_measure(grid, cfg);
    CHECK(res.certified);
    CHECK(res.fw_gap <= cfg.gap_tol * 10.0);

    DiscreteMeasure uniform = measure_from_quadrature(circle_rule(256));
    CHECK(wasserstein(res.measure, uniform) <= 2.0 * grid.spacing());

    // Calibration makes the rate functional vanish at the minimizer.
    const double eh = calibrate_eh(grid, res.weights);
    RateValue rv = rate_functional_on_grid(grid, res.weights, eh);
    CHECK(std::abs(rv.total) <= 1e-12);
    CHECK(rv.total == doctest::Approx(-0.5 * rv.energy + rv.sup_potential +
                                      rv.eh_constant));
}

TEST_CASE("equilibrium for the FS weight returns the curvature measure") {
    WeightedGeometry fs = make_fs_geometry(3000, 1600);
    GridEnergy grid(fs, fs.support_grid());
    EquilibriumConfig cfg;
    EquilibriumResult res = equilibrium_measure(grid, cfg);
    CHECK(res.fw_gap <= cfg.gap_tol * 10.0);
    DiscreteMeasure omega = measure_from_quadrature(fs.curvature_quadrature());
    CHECK(wasserstein(res.measure, omega) <= 2.0 * grid.spacing());
}

TEST_CASE("equilibrium solver probes") {
    WeightedGeometry kh = make_kac_hammersley_geometry(32, 128);
    GridEnergy grid(kh, kh.support_grid());
    EquilibriumConfig cfg;
    EquilibriumResult r1 = equilibrium_measure(grid, cfg);

    // Different initialization lands at the same measure.
    Rng rng(73);
    Eigen::VectorXd w0(128);
    for (int i = 0; i < 128; ++i) w0(i) = rng.uniform(0.01, 1.0);
    EquilibriumResult r2 = equilibrium_measure(grid, cfg, w0);
    CHECK(wasserstein(r1.measure, r2.measure) <= 2.0 * grid.spacing());

    const double eh = calibrate_eh(grid, r1.weights);

    // Convexity probe along random segments.
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd wa(128), wb(128);
        for (int i = 0; i < 128; ++i) {
            wa(i) = rng.uniform(0.0, 1.0);
            wb(i) = rng.uniform(0.0, 1.0);
        }
        wa /= wa.sum();
        wb /= wb.sum();
        const double ia = rate_functional_on_grid(grid, wa, eh).total;
        const double ib = rate_functional_on_grid(grid, wb, eh).total;
        for (double t : {0.25, 0.5, 0.75}) {
            Eigen::VectorXd wm = t * wb + (1.0 - t) * wa;
            const double im = rate_functional_on_grid(grid, wm, eh).total;
            CHECK(im <= t * ib + (1.0 - t) * ia + 1e-8);
        }
    }

    // Nonnegativity of the calibrated functional.
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::VectorXd w(128);
        for (int i = 0; i < 128; ++i) w(i) = rng.uniform(0.0, 1.0);
        w /= w.sum();
        CHECK(rate_functional_on_grid(grid, w, eh).total >= -1e-6);
    }

    // Shifting the kernel by a constant and recalibrating leaves the rate
    // functional unchanged.
    const double delta = 0.37;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd w(128);
        for (int i = 0; i < 128; ++i) w(i) = rng.uniform(0.0, 1.0);
        w /= w.sum();
        RateValue rv = rate_functional_on_grid(grid, w, eh);
        const double energy_shifted = rv.energy + delta;
        const double sup_shifted = rv.sup_potential + delta;
        const double eh_shifted = eh - 0.5 * delta;
        const double total_shifted = -0.5 * energy_shifted + sup_shifted + eh_shifted;
        CHECK(total_shifted == doctest::Approx(rv.total).epsilon(1e-8));
    }
}

TEST_CASE("rate functional of a smoothed off-equilibrium measure is positive") {
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 256);
    GridEnergy grid(kh, kh.support_grid());
    EquilibriumResult res = equilibrium_measure(grid, EquilibriumConfig{});
    const double eh = calibrate_eh(grid, res.weights);

    // Uniform measure on a circle of radius 2 is far from equilibrium.
    DiscreteMeasure far;
    const int n = 128;
    for (int l = 0; l < n; ++l) {
        const double th = 2.0 * std::numbers::pi * l / n;
        far.points.push_back(CP1Point::finite(
            {2.0 * std::cos(th), 2.0 * std::sin(th)}));
        far.weights.push_back(1.0 / n);
    }
    RateValue rv = rate_functional(far, kh, eh);
    CHECK(rv.total > 0.1);
    CHECK(rv.total == doctest::Approx(-0.5 * rv.energy + rv.sup_potential +
                                      rv.eh_constant));
}

TEST_CASE("aggregation bound is honest") {
    Rng rng(74);
    DiscreteMeasure mu;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = 1.0 + 0.05 * rng.normal();
        mu.points.push_back(CP1Point::finite(
            {r * std::cos(th), r * std::sin(th)}));
        mu.weights.push_back(1.0 / n);
    }
    AggregatedMeasure agg = aggregate_measure(mu, 64, 32);
    CHECK(agg.measure.size() <= mu.size());
    agg.measure.validate(1e-9);
    const double moved = wasserstein(mu, agg.measure);
    CHECK(moved <= agg.displacement_bound + 1e-12);
}
