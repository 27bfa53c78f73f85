#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pphi/jpc.hpp"
#include "pphi/measures.hpp"
#include "pphi/numeric.hpp"
#include "pphi/rng.hpp"

using namespace pphi;

namespace {

ZeroConfig config_of(std::vector<Complex> zeros) {
    ZeroConfig zc;
    zc.n = static_cast<int>(zeros.size());
    zc.finite_zeros = std::move(zeros);
    return zc;
}

ZeroConfig random_config(int n, Rng& rng, double radius = 1.5) {
    std::vector<Complex> z(n);
    for (auto& zeta : z)
        zeta = Complex{rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
    return config_of(std::move(z));
}

} // namespace

TEST_CASE("alpha integrals on the circle") {
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 32);

    // All zeros at the origin: the integrand is |z|^{2iN} = 1 on the circle.
    ZeroConfig origin = config_of(std::vector<Complex>(5, Complex{0.0, 0.0}));
    for (int i : {1, 2, 3})
        CHECK(std::abs(log_alpha(i, origin, kh)) < 1e-13);

    // N=1, zero at 2: (1/2pi) int |e^{i th} - 2|^2 = 5.
    ZeroConfig two = config_of({Complex{2.0, 0.0}});
    CHECK(log_alpha(1, two, kh) == doctest::Approx(std::log(5.0)).epsilon(1e-13));

    // Quadrature-resolution consistency.
    WeightedGeometry fine = make_kac_hammersley_geometry(512, 32);
    Rng rng(81);
    ZeroConfig zc = random_config(6, rng);
    CHECK(log_alpha(2, zc, kh) == doctest::Approx(log_alpha(2, zc, fine)).epsilon(1e-8));

    ZeroConfig with_inf;
    with_inf.n = 2;
    with_inf.zeros_at_infinity = 1;
    with_inf.finite_zeros = {Complex{1.0, 0.0}};
    CHECK_THROWS_AS(log_alpha(1, with_inf, kh), std::domain_error);
}

TEST_CASE("beta ratios") {
    WeightedGeometry kh = make_kac_hammersley_geometry(128, 32);
    ZeroConfig origin = config_of(std::vector<Complex>(4, Complex{0.0, 0.0}));
    for (int i : {1, 2})
        CHECK(beta_ratio(i, origin, kh, 3) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(82);
    for (int trial = 0; trial < 200; ++trial) {
        ZeroConfig zc = random_config(5, rng);
        for (int i : {1, 2}) {
            const double b = beta_ratio(i, zc, kh, 3);
            CHECK(b > 0.0);
            CHECK(b <= 1.0 + 1e-10);
        }
        CHECK(beta_ratio(3, zc, kh, 3) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("log gamma closed forms") {
    // k=1: Gamma_N = N!.
    for (int n : {0, 1, 5, 40, 120, 170}) {
        GammaInput in{1, {}, {}, n, 0.0};
        const double expect = std::lgamma(n + 1.0);
        CHECK(std::abs(log_gamma_n(in) - expect) <=
              1e-10 * std::max(1.0, std::abs(expect)));
    }
    // k=2, c1=0: Gamma_N = Gamma((N+1)/2)/2.
    for (int n : {1, 7, 33, 101, 170}) {
        GammaInput in{2, {0.0}, {0.0}, n, 0.0};
        const double expect = std::lgamma((n + 1.0) / 2.0) - std::log(2.0);
        CHECK(std::abs(log_gamma_n(in) - expect) <=
              1e-10 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("log gamma against a brute-force trapezoid") {
    GammaInput in{2, {0.5}, {1.0}, 10, 0.0};
    const int pts = 1000000;
    const double hi = 50.0;
    double acc = 0.0;
    for (int q = 0; q <= pts; ++q) {
        const double rho = hi * q / pts;
        const double f = std::exp(-(rho * rho + 0.5 * rho)) * std::pow(rho, 10);
        acc += (q == 0 || q == pts) ? 0.5 * f : f;
    }
    acc *= hi / pts;
    CHECK(log_gamma_n(in) == doctest::Approx(std::log(acc)).epsilon(1e-8));
}

TEST_CASE("log gamma remains stable at very large N") {
    GammaInput in{2, {0.3}, {0.8}, 10000, 0.0};
    const double v = log_gamma_n(in);
    CHECK(std::isfinite(v));
    // Saddle-order magnitude (N/k)(log(N/k) - 1).
    const double rough = 5000.0 * (std::log(5000.0) - 1.0);
    CHECK(std::abs(v - rough) / rough < 0.05);
}

TEST_CASE("gamma sandwich brackets the factorial at k=1") {
    for (int n = 1; n <= 50; ++n) {
        GammaInput in{1, {}, {}, n, 0.0};
        GammaBounds b = gamma_sandwich(in);
        const double truth = std::lgamma(n + 1.0);
        CHECK(b.lower_log <= truth + 1e-12);
        CHECK(truth <= b.upper_log + 1e-12);
    }
}

TEST_CASE("gamma sandwich brackets the quadratic family") {
    for (double beta : {0.0, 0.5, 1.0}) {
        for (int n : {5, 20, 100}) {
            GammaInput in{2, {1.0}, {beta}, n, 0.0};
            GammaBounds b = gamma_sandwich(in);
            const double v = log_gamma_n(in);
            CHECK(b.lower_log <= v + 1e-10);
            CHECK(v <= b.upper_log + 1e-10);
        }
    }
}

TEST_CASE("gamma sandwich on random coefficient draws") {
    Rng rng(83);
    for (int trial = 0; trial < 120; ++trial) {
        const int k = 2 + static_cast<int>(rng.below(2));
        GammaInput in;
        in.k = k;
        in.n = 2 + static_cast<int>(rng.below(200));
        for (int j = 1; j < k; ++j) {
            in.c.push_back(rng.uniform(-2.0, 2.0));
            in.betas.push_back(rng.uniform(0.0, 1.0));
        }
        GammaBounds b = gamma_sandwich(in);
        const double v = log_gamma_n(in);
        CHECK(b.lower_log <= v + 1e-9);
        CHECK(v <= b.upper_log + 1e-9);
    }
}

TEST_CASE("normalized log gamma is small and shrinking") {
    auto normed = [](int n) {
        GammaInput in{2, {0.7}, {0.9}, n, 0.0};
        return log_gamma_n(in) / (static_cast<double>(n) * n);
    };
    CHECK(std::abs(normed(200)) <= 0.03);
    CHECK(std::abs(normed(400)) < std::abs(normed(100)));

    // Kinetic variant with the shift at its admissible scale eta = N^2.
    auto normed_kin = [](int n) {
        GammaInput in{2, {0.7}, {0.9}, n, static_cast<double>(n) * n};
        return log_gamma_n(in) / (static_cast<double>(n) * n);
    };
    CHECK(std::abs(normed_kin(400)) <= 0.05);
    CHECK(std::abs(normed_kin(400)) < std::abs(normed_kin(100)));
}

TEST_CASE("saddle point approximation") {
    // k=1, alpha=1: N log N - N, within Stirling's correction of log N!.
    for (int n : {5, 50, 500}) {
        const double v = saddle_log_gamma(0.0, n, 1);
        CHECK(v == doctest::Approx(n * std::log(double(n)) - n).epsilon(1e-12));
        CHECK(std::abs(v - std::lgamma(n + 1.0)) <= std::log(2.0 * std::numbers::pi * n));
    }
    // k=2 comparison at N=100.
    GammaInput in{2, {0.0}, {0.0}, 100, 0.0};
    const double truth = log_gamma_n(in);
    CHECK(std::abs(saddle_log_gamma(0.0, 100, 2) - truth) / std::abs(truth) < 0.02);

    // Exact linear response in log alpha_k.
    const double d = 0.37;
    CHECK(saddle_log_gamma(1.0 + d, 80, 2) ==
          doctest::Approx(saddle_log_gamma(1.0, 80, 2) - (80.0 / 2.0) * d).epsilon(1e-12));
}

TEST_CASE("monic kinetic term") {
    const int n = 9;
    WeightedGeometry kh = make_kac_hammersley_geometry(2 * n + 4, 32);
    ZeroConfig origin = config_of(std::vector<Complex>(n, Complex{0.0, 0.0}));
    CHECK(monic_kinetic_energy(origin, kh) == doctest::Approx(n * n).epsilon(1e-12));

    // Scale invariance in the leading coefficient.
    PolySection s = reconstruct(origin, Complex{1.0, 0.0});
    PolySection scaled = s;
    for (Complex& a : scaled.coeffs) a *= Complex{2.0, 0.0};
    CHECK(monic_kinetic_energy(s, kh) ==
          doctest::Approx(monic_kinetic_energy(scaled, kh)).epsilon(1e-13));
}

TEST_CASE("jpc log density closed forms at N=1 on the circle") {
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 32);
    PotentialSpec gaussian{1, {1.0}, false};
    PotentialSpec quartic{2, {0.0, 1.0}, false};
    Rng rng(84);
    for (int trial = 0; trial < 40; ++trial) {
        const Complex zeta{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double u = std::norm(zeta);
        ZeroConfig zc = config_of({zeta});

        // Gaussian: density ~ alpha_1^{-2} with alpha_1 = 1 + u; the Gamma
        // factor is 0! = 1.
        CHECK(jpc_log_density(zc, gaussian, kh) ==
              doctest::Approx(-2.0 * std::log1p(u)).epsilon(1e-10));

        // Quartic: density ~ Gamma_1 / alpha_2 with Gamma_1 = 1/2 and
        // alpha_2 = 1 + 4u + u^2.
        CHECK(jpc_log_density(zc, quartic, kh) ==
              doctest::Approx(std::log(0.5) - std::log(1.0 + 4.0 * u + u * u))
                  .epsilon(1e-10));
    }
}

TEST_CASE("jpc log density is exchangeable and rotation invariant") {
    WeightedGeometry kh = make_kac_hammersley_geometry(128, 32);
    PotentialSpec quartic{2, {0.0, 1.0}, false};
    Rng rng(85);
    ZeroConfig zc = random_config(4, rng);

    ZeroConfig swapped = zc;
    std::swap(swapped.finite_zeros[0], swapped.finite_zeros[2]);
    CHECK(jpc_log_density(zc, quartic, kh) == jpc_log_density(swapped, quartic, kh));

    const double th = 1.234;
    const Complex rot{std::cos(th), std::sin(th)};
    ZeroConfig rotated = zc;
    for (Complex& z : rotated.finite_zeros) z *= rot;
    CHECK(jpc_log_density(zc, quartic, kh) ==
          doctest::Approx(jpc_log_density(rotated, quartic, kh)).epsilon(1e-10));

    ZeroConfig dup = config_of({Complex{0.5, 0.0}, Complex{0.5, 0.0}});
    CHECK_THROWS_AS(jpc_log_density(dup, quartic, kh), std::domain_error);
}

TEST_CASE("approx rate pieces") {
    WeightedGeometry fs = make_fs_geometry(2000, 64);
    ZeroConfig pm = config_of({Complex{1.0, 0.0}, Complex{-1.0, 0.0}});
    ApproxRate ar = approx_rate(pm, fs, 1);
    const double g = fs.green(Complex{1.0, 0.0}, Complex{-1.0, 0.0});
    CHECK(ar.e_n == doctest::Approx(2.0 * g / 4.0).epsilon(1e-14));

    // Log-sum-exp path equals the naive linear-space quadrature at small N.
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 32);
    Rng rng(86);
    for (int trial = 0; trial < 20; ++trial) {
        ZeroConfig zc = random_config(4, rng);
        const int k = 2;
        ApproxRate a = approx_rate(zc, kh, k);
        double naive = 0.0;
        const Quadrature& nu = kh.nu();
        for (std::size_t q = 0; q < nu.size(); ++q) {
            double u = 0.0;
            for (const Complex& zeta : zc.finite_zeros)
                u += kh.green(nu.nodes[q], zeta);
            naive += nu.weights[q] * std::exp(k * u);
        }
        const double j_naive = std::log(naive) / (k * zc.n);
        CHECK(a.j_n == doctest::Approx(j_naive).epsilon(1e-10));
    }
}

TEST_CASE("potential averages increase toward the sup") {
    // For a fixed measure, (1/p) log int e^{p U} dnu is nondecreasing in p
    // and approaches sup U on the support of nu.
    WeightedGeometry kh = make_kac_hammersley_geometry(256, 32);
    DiscreteMeasure mu;
    const int n_atoms = 16;
    for (int l = 0; l < n_atoms; ++l) {
        const double th = 2.0 * std::numbers::pi * l / n_atoms;
        mu.points.push_back(CP1Point::finite(
            {0.5 * std::cos(th), 0.5 * std::sin(th)}));
        mu.weights.push_back(1.0 / n_atoms);
    }
    const Quadrature& nu = kh.nu();
    std::vector<double> u_vals(nu.size());
    double sup_u = -1e30;
    for (std::size_t q = 0; q < nu.size(); ++q) {
        u_vals[q] = green_potential(mu, kh, CP1Point::finite(nu.nodes[q]));
        sup_u = std::max(sup_u, u_vals[q]);
    }
    double prev = -1e30;
    for (int p : {10, 40, 160, 640}) {
        LogSumAccumulator acc;
        for (std::size_t q = 0; q < nu.size(); ++q)
            acc.add(std::log(nu.weights[q]) + p * u_vals[q]);
        const double jp = acc.value() / p;
        CHECK(jp >= prev - 1e-12);
        CHECK(jp <= sup_u + 1e-12);
        prev = jp;
    }
    CHECK(sup_u - prev < 0.01);
}

TEST_CASE("jpc identity residual vanishes") {
    Rng rng(87);

    // Same configuration: identically zero.
    WeightedGeometry kh = make_kac_hammersley_geometry(64, 32);
    PotentialSpec quartic{2, {0.0, 1.0}, false};
    ZeroConfig zc = random_config(3, rng);
    CHECK(jpc_identity_residual(zc, zc, quartic, kh) == 0.0);

    // Random pairs on the circle geometry, exact quadrature.
    for (int trial = 0; trial < 30; ++trial) {
        ZeroConfig a = random_config(2, rng);
        ZeroConfig b = random_config(2, rng);
        CHECK(std::abs(jpc_identity_residual(a, b, quartic, kh)) < 1e-9);
    }

    // FS weight with nu = omega_h.
    WeightedGeometry fs = make_fs_geometry(4000, 64);
    PotentialSpec cubic{3, {0.2, -0.4, 1.0}, false};
    for (int trial = 0; trial < 10; ++trial) {
        ZeroConfig a = random_config(3, rng);
        ZeroConfig b = random_config(3, rng);
        CHECK(std::abs(jpc_identity_residual(a, b, cubic, fs)) < 1e-8);
    }

    // Kinetic term included: the extended Gamma factor cancels the same way.
    PotentialSpec quartic_kin{2, {0.0, 1.0}, true};
    for (int trial = 0; trial < 10; ++trial) {
        ZeroConfig a = random_config(3, rng);
        ZeroConfig b = random_config(3, rng);
        CHECK(std::abs(jpc_identity_residual(a, b, quartic_kin, kh)) < 1e-9);
    }
}
