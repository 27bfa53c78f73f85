#include "pphi/jpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pphi/numeric.hpp"
#include "pphi/special.hpp"

namespace pphi {

void GammaInput::validate() const {
    if (k < 1) throw std::invalid_argument("GammaInput: k must be >= 1");
    if (c.size() != static_cast<std::size_t>(k - 1) ||
        betas.size() != static_cast<std::size_t>(k - 1))
        throw std::invalid_argument("GammaInput: need k-1 coefficients and betas");
    if (n < 0) throw std::invalid_argument("GammaInput: N must be >= 0");
    if (eta_over_alpha < 0.0)
        throw std::invalid_argument("GammaInput: kinetic shift must be >= 0");
}

namespace {

// Operations on configurations sum over the zeros; sorting first makes every
// downstream value exactly permutation invariant.
ZeroConfig canonical(const ZeroConfig& zc) {
    ZeroConfig out = zc;
    std::sort(out.finite_zeros.begin(), out.finite_zeros.end(),
              [](const Complex& a, const Complex& b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    return out;
}

} // namespace

double log_alpha(int i, const ZeroConfig& zc_in, const WeightedGeometry& geom) {
    zc_in.validate();
    if (i < 1) throw std::invalid_argument("log_alpha: index must be >= 1");
    if (zc_in.zeros_at_infinity > 0)
        throw std::domain_error("log_alpha: zeros at infinity break the monic form");
    const ZeroConfig zc = canonical(zc_in);
    const Quadrature& nu = geom.nu();
    LogSumAccumulator acc;
    const double nn = zc.n;
    for (std::size_t q = 0; q < nu.size(); ++q) {
        const Complex z = nu.nodes[q];
        double log_prod = 0.0;
        for (const Complex& zeta : zc.finite_zeros) log_prod += std::log(std::norm(z - zeta));
        acc.add(std::log(nu.weights[q]) + i * (log_prod - nn * geom.weight(z)));
    }
    return acc.value();
}

double beta_ratio(int i, const ZeroConfig& zc, const WeightedGeometry& geom, int k) {
    const double la_i = log_alpha(i, zc, geom);
    const double la_k = log_alpha(k, zc, geom);
    return std::exp(la_i - (static_cast<double>(i) / k) * la_k);
}

namespace {

// V(rho) = rho^k + sum_j beta_j c_j rho^j + eta rho.
double potential_v(const GammaInput& in, double rho) {
    double v = std::pow(rho, in.k) + in.eta_over_alpha * rho;
    for (int j = 1; j < in.k; ++j)
        v += in.betas[j - 1] * in.c[j - 1] * std::pow(rho, j);
    return v;
}

// rho V'(rho) = k rho^k + sum_j j beta_j c_j rho^j + eta rho.
double rho_v_prime(const GammaInput& in, double rho) {
    double v = in.k * std::pow(rho, in.k) + in.eta_over_alpha * rho;
    for (int j = 1; j < in.k; ++j)
        v += j * in.betas[j - 1] * in.c[j - 1] * std::pow(rho, j);
    return v;
}

// Mode of the log integrand in y = log rho: rho V'(rho) = N + 1.
double integrand_mode(const GammaInput& in) {
    const double target = in.n + 1.0;
    double hi = 1.0;
    for (int it = 0; it < 400 && rho_v_prime(in, hi) < target; ++it) hi *= 2.0;
    double lo = hi;
    for (int it = 0; it < 400 && rho_v_prime(in, lo) >= target; ++it) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rho_v_prime(in, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double log_gamma_n(const GammaInput& in) {
    in.validate();
    const double rho_star = integrand_mode(in);
    const double y_star = std::log(rho_star);
    auto g = [&](double y) {
        const double rho = std::exp(y);
        return -potential_v(in, rho) + (in.n + 1.0) * y;
    };
    const double g_star = g(y_star);

    // Curvature of g at the mode sets the step for the window search.
    double sigma;
    {
        const double h = 1e-4;
        const double gpp = (g(y_star + h) - 2.0 * g_star + g(y_star - h)) / (h * h);
        sigma = (gpp < 0.0) ? 1.0 / std::sqrt(-gpp) : 1.0;
        sigma = std::clamp(sigma, 1e-4, 2.0);
    }

    // Expand until the integrand has dropped 60 e-folds on both sides.
    double lo = y_star, hi = y_star, step = sigma;
    while (g(lo) > g_star - 60.0) {
        lo -= step;
        step *= 1.4;
    }
    step = sigma;
    while (g(hi) > g_star - 60.0) {
        hi += step;
        step *= 1.4;
    }

    // Composite Simpson on log-integrand values, doubled until stable.
    double prev = kNegInf;
    for (int level = 8; level <= 19; ++level) {
        const std::size_t segments = std::size_t{1} << level;
        const double h = (hi - lo) / segments;
        LogSumAccumulator acc;
        for (std::size_t q = 0; q <= segments; ++q) {
            const double coef = (q == 0 || q == segments) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
            acc.add(g(lo + q * h) - g_star + std::log(coef));
        }
        const double value = g_star + std::log(h / 3.0) + acc.value();
        if (level > 10 && std::abs(value - prev) < 1e-13 * std::max(1.0, std::abs(value)))
            return value;
        prev = value;
    }
    return prev;
}

GammaBounds gamma_sandwich(const GammaInput& in) {
    in.validate();
    if (in.eta_over_alpha != 0.0)
        throw std::invalid_argument("gamma_sandwich: stated for the potential-only case");
    const int k = in.k;
    const double nn = in.n;

    double c_max = 1.0; // c_k = 1 participates in the maximum
    for (double cj : in.c) c_max = std::max(c_max, std::abs(cj));

    // Threshold radius: sum_j |c_j| rho^{j-k} <= 1/2 for rho >= rho_k.
    double rho_k = 0.0;
    bool have_lower_order = false;
    for (double cj : in.c)
        if (cj != 0.0) have_lower_order = true;
    if (have_lower_order) {
        auto lhs = [&](double rho) {
            double s = 0.0;
            for (int j = 1; j < k; ++j)
                s += std::abs(in.c[j - 1]) * std::pow(rho, j - k);
            return s;
        };
        double hi = 1.0;
        while (lhs(hi) > 0.5) hi *= 2.0;
        double lo = hi;
        while (lo > 1e-12 && lhs(lo) <= 0.5) lo *= 0.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (lhs(mid) > 0.5)
                lo = mid;
            else
                hi = mid;
        }
        rho_k = hi;
    }

    // C_k = int_0^{rho_k} exp(-(rho^k - sum |c_j| rho^j)) drho, numerically.
    double log_head = kNegInf;
    if (rho_k > 0.0) {
        static std::vector<double> gx, gw;
        if (gx.empty()) gauss_legendre(16, 0.0, 1.0, gx, gw);
        double c_k_int = 0.0;
        const int panels = 64;
        for (int p = 0; p < panels; ++p) {
            for (std::size_t q = 0; q < gx.size(); ++q) {
                const double rho = rho_k * (p + gx[q]) / panels;
                double expo = -std::pow(rho, k);
                for (int j = 1; j < k; ++j)
                    expo += std::abs(in.c[j - 1]) * std::pow(rho, j);
                c_k_int += gw[q] * (rho_k / panels) * std::exp(expo);
            }
        }
        log_head = nn * std::log(rho_k) + std::log(c_k_int);
    }

    const double s = (nn + 1.0) / k;
    GammaBounds out;
    out.upper_log = log_add(log_head, s * std::log(2.0) + std::lgamma(s) - std::log(double(k)));
    const double ck = c_max * k;
    out.lower_log = log_add(-s * std::log(ck) + log_gamma_upper(s, ck) - std::log(double(k)),
                            -ck - std::log(nn + 1.0));
    return out;
}

double saddle_log_gamma(double log_alpha_k, int n, int k) {
    if (n < 1 || k < 1) throw std::invalid_argument("saddle_log_gamma: need N, k >= 1");
    const double nk = static_cast<double>(n) / k;
    return -nk * log_alpha_k + nk * (std::log(nk) - 1.0);
}

double monic_kinetic_energy(const PolySection& s, const WeightedGeometry& geom) {
    if (s.coeffs.empty() || s.coeffs[0] == Complex{0.0, 0.0})
        throw std::domain_error("monic_kinetic_energy: vanishing leading coefficient");
    return kinetic_energy(s, geom) / std::norm(s.coeffs[0]);
}

double monic_kinetic_energy(const ZeroConfig& zc, const WeightedGeometry& geom) {
    return kinetic_energy(reconstruct(canonical(zc), Complex{1.0, 0.0}), geom);
}

GammaInput make_gamma_input(const ZeroConfig& zc, const PotentialSpec& spec,
                            const WeightedGeometry& geom) {
    spec.validate();
    GammaInput in;
    in.k = spec.k;
    in.n = zc.n;
    in.c.assign(spec.c.begin(), spec.c.end() - 1);
    const double la_k = log_alpha(spec.k, zc, geom);
    for (int i = 1; i < spec.k; ++i) {
        const double la_i = log_alpha(i, zc, geom);
        in.betas.push_back(std::exp(la_i - (static_cast<double>(i) / spec.k) * la_k));
    }
    if (spec.include_kinetic) {
        const double eta = monic_kinetic_energy(zc, geom);
        in.eta_over_alpha = eta * std::exp(-la_k / spec.k);
    }
    return in;
}

namespace {

double log_vandermonde_sq(const ZeroConfig& zc) {
    double s = 0.0;
    const auto& z = zc.finite_zeros;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            const double d2 = std::norm(z[i] - z[j]);
            if (d2 == 0.0)
                throw std::domain_error("jpc density: coincident zeros");
            s += std::log(d2);
        }
    return s;
}

} // namespace

double jpc_log_density(const ZeroConfig& zc_in, const PotentialSpec& spec,
                       const WeightedGeometry& geom) {
    zc_in.validate();
    if (zc_in.zeros_at_infinity > 0)
        throw std::domain_error("jpc density: zeros at infinity unsupported");
    const ZeroConfig zc = canonical(zc_in);
    const double log_delta_sq = log_vandermonde_sq(zc);
    const double la_k = log_alpha(spec.k, zc, geom);
    const GammaInput in = make_gamma_input(zc, spec, geom);
    const double lg = log_gamma_n(in);
    return lg + log_delta_sq - ((zc.n + 1.0) / spec.k) * la_k;
}

ApproxRate approx_rate(const ZeroConfig& zc_in, const WeightedGeometry& geom, int k) {
    zc_in.validate();
    if (zc_in.zeros_at_infinity > 0)
        throw std::domain_error("approx_rate: needs finite zeros");
    const ZeroConfig zc = canonical(zc_in);
    const double nn = zc.n;
    ApproxRate out;

    double pair_sum = 0.0;
    for (std::size_t i = 0; i < zc.finite_zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zc.finite_zeros.size(); ++j)
            pair_sum += 2.0 * geom.green(zc.finite_zeros[i], zc.finite_zeros[j]);
    out.e_n = pair_sum / (nn * nn);

    const Quadrature& nu = geom.nu();
    LogSumAccumulator acc;
    for (std::size_t q = 0; q < nu.size(); ++q) {
        const Complex z = nu.nodes[q];
        double u = 0.0; // N * U^{mu_zeta}(z) = sum_j G(z, zeta_j)
        bool collided = false;
        for (const Complex& zeta : zc.finite_zeros) {
            if (z == zeta) {
                collided = true;
                break;
            }
            u += geom.green(z, zeta);
        }
        if (collided) continue; // e^{kNU} = 0 at a zero
        acc.add(std::log(nu.weights[q]) + k * u);
    }
    out.j_n = acc.value() / (k * nn);
    out.i_n = -0.5 * out.e_n + ((nn + 1.0) / nn) * out.j_n;
    return out;
}

double jpc_identity_residual(const ZeroConfig& zc1, const ZeroConfig& zc2,
                             const PotentialSpec& spec,
                             const WeightedGeometry& geom) {
    if (zc1.n != zc2.n)
        throw std::invalid_argument("jpc_identity_residual: degree mismatch");
    auto stat = [&](const ZeroConfig& zc) {
        const double nn = zc.n;
        const double density = jpc_log_density(zc, spec, geom);
        const double lg = log_gamma_n(make_gamma_input(zc, spec, geom));
        const ApproxRate ar = approx_rate(zc, geom, spec.k);
        double phi_sum = 0.0;
        for (const Complex& zeta : zc.finite_zeros) phi_sum += geom.weight(zeta);
        return density - lg + nn * nn * ar.i_n + 2.0 * phi_sum;
    };
    return stat(zc1) - stat(zc2);
}

} // namespace pphi
