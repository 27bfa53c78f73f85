#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pphi/rng.hpp"
#include "pphi/zeros.hpp"

using namespace pphi;

namespace {

PolySection kac_sample(int n, Rng& rng) {
    std::vector<Complex> by_power(n + 1);
    for (Complex& a : by_power) a = rng.complex_normal();
    return PolySection::from_monomial(std::move(by_power));
}

std::vector<Complex> sorted_roots(const ZeroConfig& zc) {
    std::vector<Complex> r = zc.finite_zeros;
    std::sort(r.begin(), r.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return r;
}

} // namespace

TEST_CASE("roots of simple polynomials") {
    PolySection quad;
    quad.degree = 2;
    quad.coeffs = {Complex{1, 0}, Complex{0, 0}, Complex{-1, 0}};
    ZeroConfig zc = find_roots(quad, 1e-10);
    REQUIRE(zc.finite_zeros.size() == 2);
    auto r = sorted_roots(zc);
    CHECK(std::abs(r[0] - Complex{-1, 0}) < 1e-12);
    CHECK(std::abs(r[1] - Complex{1, 0}) < 1e-12);

    PolySection pure;
    pure.degree = 12;
    pure.coeffs.assign(13, Complex{0, 0});
    pure.coeffs[0] = Complex{3.0, 1.0};
    ZeroConfig z12 = find_roots(pure, 1e-10);
    CHECK(z12.zeros_at_infinity == 0);
    REQUIRE(z12.finite_zeros.size() == 12);
    for (const Complex& z : z12.finite_zeros) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("round trip on random polynomials, degree 50") {
    Rng rng(31);
    for (int it = 0; it < 50; ++it) {
        PolySection s = kac_sample(50, rng);
        ZeroConfig zc = find_roots(s, 1e-8);
        PolySection rec = reconstruct(zc, s.coeffs[0]);
        CHECK(coefficient_rel_error(s, rec) <= 1e-8);
    }
}

TEST_CASE("round trip at degree 100 stays below 1e-8") {
    Rng rng(32);
    for (int it = 0; it < 20; ++it) {
        PolySection s = kac_sample(100, rng);
        ZeroConfig zc = find_roots(s, 1e-8);
        PolySection rec = reconstruct(zc, s.coeffs[0]);
        CHECK(coefficient_rel_error(s, rec) <= 1e-8);
    }
}

TEST_CASE("reconstruct examples") {
    ZeroConfig pm;
    pm.n = 2;
    pm.finite_zeros = {Complex{1, 0}, Complex{-1, 0}};
    PolySection s = reconstruct(pm, Complex{1, 0});
    CHECK(s.coeffs[0] == Complex{1, 0});
    CHECK(std::abs(s.coeffs[1]) == 0.0);
    CHECK(s.coeffs[2] == Complex{-1, 0});

    ZeroConfig zn;
    zn.n = 5;
    zn.finite_zeros.assign(5, Complex{0, 0});
    PolySection t = reconstruct(zn, Complex{0.0, 2.0});
    CHECK(t.coeffs[0] == Complex{0.0, 2.0});
    for (int j = 1; j <= 5; ++j) CHECK(std::abs(t.coeffs[j]) == 0.0);

    ZeroConfig withinf;
    withinf.n = 3;
    withinf.zeros_at_infinity = 1;
    withinf.finite_zeros = {Complex{1, 0}, Complex{2, 0}};
    CHECK_THROWS_AS(reconstruct(withinf, Complex{1, 0}), std::domain_error);
}

TEST_CASE("zeros at infinity from leading-coefficient deficiency") {
    PolySection s;
    s.degree = 3;
    s.coeffs = {Complex{1e-30, 0}, Complex{1, 0}, Complex{0, 0}, Complex{-4, 0}};
    ZeroConfig zc = find_roots(s, 1e-9);
    CHECK(zc.zeros_at_infinity == 1);
    CHECK(zc.finite_zeros.size() == 2);

    DiscreteMeasure m = empirical_measure(zc);
    double inf_mass = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.points[i].at_infinity) inf_mass += m.weights[i];
    CHECK(inf_mass == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("empirical measure basics") {
    ZeroConfig pm;
    pm.n = 2;
    pm.finite_zeros = {Complex{1, 0}, Complex{-1, 0}};
    DiscreteMeasure m = empirical_measure(pm);
    m.validate();
    CHECK(m.size() == 2);
    CHECK(m.weights[0] == 0.5);

    // Permutation invariance: the measure is the same multiset.
    ZeroConfig swapped = pm;
    std::swap(swapped.finite_zeros[0], swapped.finite_zeros[1]);
    DiscreteMeasure m2 = empirical_measure(swapped);
    CHECK(m.weights == m2.weights);
}

TEST_CASE("conjugation equivariance") {
    Rng rng(33);
    PolySection s = kac_sample(20, rng);
    PolySection conj = s;
    for (Complex& a : conj.coeffs) a = std::conj(a);

    auto r1 = sorted_roots(find_roots(s, 1e-9));
    auto r2c = find_roots(conj, 1e-9);
    for (Complex& z : r2c.finite_zeros) z = std::conj(z);
    auto r2 = sorted_roots(r2c);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        CHECK(std::abs(r1[i] - r2[i]) < 1e-7);
}

TEST_CASE("zero polynomial is rejected") {
    PolySection zero;
    zero.degree = 4;
    zero.coeffs.assign(5, Complex{0, 0});
    CHECK_THROWS_AS(find_roots(zero), std::invalid_argument);
}
