#pragma once

#include <vector>

#include "pphi/ensemble.hpp"
#include "pphi/geometry.hpp"
#include "pphi/zeros.hpp"

namespace pphi {

// Inputs of the radial integral Gamma_N: potential coefficients c_1..c_{k-1}
// (c_k = 1 implicit), the measured ratios beta_i = alpha_i / alpha_k^{i/k},
// and the kinetic shift eta / alpha_k^{1/k} (zero in the potential-only
// case).
struct GammaInput {
    int k = 1;
    std::vector<double> c;     // c_1 .. c_{k-1}
    std::vector<double> betas; // beta_1 .. beta_{k-1}
    int n = 0;
    double eta_over_alpha = 0.0;

    void validate() const;
};

// log alpha_i = log int |prod_j (z - zeta_j)|^{2i} e^{-i N phi(z)} dnu(z),
// assembled in log space so large degrees do not overflow.
double log_alpha(int i, const ZeroConfig& zc, const WeightedGeometry& geom);

// beta_i = exp(log alpha_i - (i/k) log alpha_k); at most 1 for probability nu.
double beta_ratio(int i, const ZeroConfig& zc, const WeightedGeometry& geom, int k);

// log int_0^inf exp(-(rho^k + sum_j beta_j c_j rho^j + eta rho)) rho^N drho,
// by mode-centered adaptive quadrature on the log integrand; stable for N up
// to 1e4.
double log_gamma_n(const GammaInput& in);

// Two-sided bounds bracketing log Gamma_N for every beta in [0,1]; the
// potential-only case. Both sides follow the same split of the integral,
// with the majorant/minorant pieces evaluated exactly via (incomplete)
// gamma functions:
//   lower: (Ck)^{-(N+1)/k} Gamma((N+1)/k, Ck)/k + e^{-Ck}/(N+1)
//   upper: rho_k^N C_k + 2^{(N+1)/k} Gamma((N+1)/k)/k
// where C = max_j |c_j| (>= 1), rho_k is the smallest radius past which the
// lower-order terms lose to rho^k/2, and C_k = int_0^{rho_k}
// exp(-(rho^k - sum |c_j| rho^j)) drho.
struct GammaBounds {
    double lower_log = 0.0;
    double upper_log = 0.0;
};
GammaBounds gamma_sandwich(const GammaInput& in);

// Leading-order stationary-phase value of log int exp(-alpha_k rho^k) rho^N:
// -(N/k) log alpha_k + (N/k)(log(N/k) - 1).
double saddle_log_gamma(double log_alpha_k, int n, int k);

// Kinetic energy of the monic factor prod (z - zeta_j); equivalently
// kinetic_energy(s) / |a_0|^2, invariant under scaling of the section.
double monic_kinetic_energy(const PolySection& s, const WeightedGeometry& geom);
double monic_kinetic_energy(const ZeroConfig& zc, const WeightedGeometry& geom);

GammaInput make_gamma_input(const ZeroConfig& zc, const PotentialSpec& spec,
                            const WeightedGeometry& geom);

// log density of the zero configuration under the ensemble, up to one
// N-dependent additive constant:
//   log Gamma~_N + log |Delta|^2 - ((N+1)/k) log alpha_k.
double jpc_log_density(const ZeroConfig& zc, const PotentialSpec& spec,
                       const WeightedGeometry& geom);

// Pairwise Green sum, the L^{kN} potential average, and their combination:
//   e_n = (1/N^2) sum_{i != j} G(zeta_i, zeta_j)
//   j_n = (1/kN) log int exp(k N U^{mu_zeta}) dnu      (log-sum-exp path)
//   i_n = -e_n / 2 + ((N+1)/N) j_n
struct ApproxRate {
    double e_n = 0.0;
    double j_n = 0.0;
    double i_n = 0.0;
};
ApproxRate approx_rate(const ZeroConfig& zc, const WeightedGeometry& geom, int k);

// Difference between two configurations of
//   jpc_log_density - log Gamma~ + N^2 i_n + 2 sum_j phi(zeta_j),
// which is configuration independent; the residual is zero up to rounding.
// All unknown normalizations cancel in the two-configuration difference.
double jpc_identity_residual(const ZeroConfig& zc1, const ZeroConfig& zc2,
                             const PotentialSpec& spec,
                             const WeightedGeometry& geom);

} // namespace pphi
