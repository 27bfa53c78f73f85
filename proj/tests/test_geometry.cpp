#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pphi/geometry.hpp"
#include "pphi/rng.hpp"

using namespace pphi;

TEST_CASE("fs_weight values") {
    CHECK(fs_weight({0.0, 0.0}) == 0.0);
    CHECK(fs_weight({1.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    const double big = fs_weight({1e3, 0.0});
    CHECK(std::abs(big - 2.0 * std::log(1e3)) < 1e-5);
}

TEST_CASE("chordal distance basic values") {
    const CP1Point a = CP1Point::finite({0.3, -1.2});
    CHECK(chordal_dist(a, a) == 0.0);
    CHECK(chordal_dist(CP1Point::finite({0.0, 0.0}), CP1Point::infinity()) == 1.0);
    CHECK(chordal_dist(Complex{1.0, 0.0}, Complex{-1.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(chordal_dist(CP1Point::infinity(), CP1Point::infinity()) == 0.0);
}

TEST_CASE("chordal distance is a metric on random triples") {
    Rng rng(12345);
    auto random_point = [&]() {
        if (rng.uniform() < 0.05) return CP1Point::infinity();
        return CP1Point::finite({rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)});
    };
    for (int it = 0; it < 10000; ++it) {
        const CP1Point a = random_point(), b = random_point(), c = random_point();
        const double ab = chordal_dist(a, b);
        const double bc = chordal_dist(b, c);
        const double ac = chordal_dist(a, c);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-15);
        CHECK(ab == chordal_dist(b, a));
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("circle rule exactness") {
    Quadrature q4 = circle_rule(4);
    double mass = 0.0;
    for (double w : q4.weights) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-16));

    Quadrature q8 = circle_rule(8);
    Complex cubic{0.0, 0.0};
    for (std::size_t i = 0; i < q8.size(); ++i)
        cubic += q8.weights[i] * q8.nodes[i] * q8.nodes[i] * q8.nodes[i];
    CHECK(std::abs(cubic) < 1e-14);

    // z^m integrates to zero for all 0 < |m| < n.
    const int n = 17;
    Quadrature q = circle_rule(n);
    for (int m = 1; m < n; ++m) {
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < q.size(); ++i)
            acc += q.weights[i] * std::pow(q.nodes[i], m);
        CHECK(std::abs(acc) < 1e-13);
    }
}

TEST_CASE("curvature rule has unit mass") {
    Quadrature q = curvature_rule(WeightKind::FubiniStudy, {}, 4000);
    CHECK(q.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    Quadrature s = sphere_grid_rule(30, 60);
    CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("green function, Fubini-Study weight") {
    WeightedGeometry geom = make_fs_geometry(2000, 512);
    CHECK(geom.green_constant() == 1.0);

    // Antipodal pair: the section norm extends to 1, so G(0, inf) = c_h.
    const double g0inf = geom.green(CP1Point::finite({0.0, 0.0}), CP1Point::infinity());
    CHECK(g0inf == doctest::Approx(1.0).epsilon(1e-14));

    // Calibration oracle: the potential of omega_h vanishes everywhere.
    for (double re : {0.0, 0.4, 1.7, 9.0})
        CHECK(std::abs(curvature_green_potential(geom, {re, 0.3})) < 1e-8);

    // Symmetry is exact.
    const Complex z{0.3, 0.8}, w{-1.1, 0.2};
    CHECK(geom.green(z, w) == geom.green(w, z));

    // Rotation invariance.
    Rng rng(7);
    for (int it = 0; it < 50; ++it) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const Complex rot{std::cos(th), std::sin(th)};
        const Complex a{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const Complex b{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        if (a == b) continue;
        CHECK(geom.green(a, b) == doctest::Approx(geom.green(rot * a, rot * b)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(geom.green(z, z), std::domain_error);
}

TEST_CASE("discrete quadrature of the calibrated potential converges to zero") {
    WeightedGeometry geom = make_fs_geometry(3000, 512);
    const Quadrature& q = geom.curvature_quadrature();
    const Complex z{0.37, 0.11};
    double u = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        u += q.weights[i] * geom.green(z, q.nodes[i]);
    CHECK(std::abs(u) < 5e-3); // log singularity limits the direct sum
}

TEST_CASE("custom radial weight calibrates and extends to infinity") {
    std::vector<double> coeffs = {0.15, -0.05};
    Quadrature nu = curvature_rule(WeightKind::CustomRadial, coeffs, 3000);
    Quadrature curv = curvature_rule(WeightKind::CustomRadial, coeffs, 3000);
    WeightedGeometry geom(WeightKind::CustomRadial, coeffs, nu, curv,
                          sphere_grid_points(40, 80));

    for (double re : {0.0, 0.5, 2.0})
        CHECK(std::abs(curvature_green_potential(geom, {re, -0.2})) < 1e-6);

    const double ginf = geom.green(CP1Point::finite({0.5, 0.5}), CP1Point::infinity());
    CHECK(std::isfinite(ginf));
}

TEST_CASE("custom weights with non-positive curvature are rejected") {
    std::vector<double> bad = {-3.0};
    CHECK_THROWS_AS(
        WeightedGeometry(WeightKind::CustomRadial, bad,
                         curvature_rule(WeightKind::FubiniStudy, {}, 500),
                         curvature_rule(WeightKind::FubiniStudy, {}, 500),
                         sphere_grid_points(10, 20)),
        std::invalid_argument);
}

TEST_CASE("kac-hammersley geometry") {
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 128);
    CHECK(kh.green_constant() == 0.0);
    CHECK(kh.weight({0.3, 0.4}) == 0.0);
    // Flat weight: G(z,w) = log|z-w|^2.
    CHECK(kh.green(Complex{2.0, 0.0}, Complex{1.0, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(kh.green(CP1Point::finite({0.0, 0.0}), CP1Point::infinity()),
                    std::domain_error);
}
