#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "pphi/ensemble.hpp"
#include "pphi/geometry.hpp"

namespace pphi {

struct ChainConfig {
    int n_steps = 20000;
    int burn_in = 5000;
    int n_chains = 4;
    double target_accept = 0.234;
    std::uint64_t seed = 1;
    int thinning = 10;

    void validate() const;
};

struct ChainDiagnostics {
    double acceptance_rate = 0.0;
    double rhat_max = 0.0;
    double ess_min = 0.0;
    bool converged = true;     // false when rhat_max exceeds 1.1
    std::string warning;       // non-convergence is flagged, never silent
};

// Gram matrix of the monomial basis in the (h^N, nu) inner product:
// M(i, j) = int z^j conj(z)^i e^{-N phi} dnu, so ||s||^2 = b^H M b for the
// coefficient vector b in monomial order. Hermitian positive definite for a
// measure with enough support; rank deficiency throws.
Eigen::MatrixXcd gram_matrix(const WeightedGeometry& geom, int degree);

// Gram matrix of the covariant derivative (the kinetic quadratic form).
Eigen::MatrixXcd kinetic_gram_matrix(const WeightedGeometry& geom, int degree);

// i.i.d. draws from exp(-||s||^2) ds: complex Gaussian coefficients with
// covariance M^{-1}. Deterministic given the seed.
std::vector<PolySection> sample_gaussian(const WeightedGeometry& geom, int degree,
                                         int count, std::uint64_t seed);

struct McmcResult {
    std::vector<PolySection> samples;
    ChainDiagnostics diagnostics;
};

// Adaptive random-walk Metropolis targeting exp(-S(s)). The proposal is
// preconditioned by the Gaussian-part covariance and its global scale adapts
// toward target_accept during burn-in only; after the freeze the chain is
// exactly Markov. Chains run independently and merge by chain index.
McmcResult sample_mcmc(const PotentialSpec& spec, const WeightedGeometry& geom,
                       int degree, const ChainConfig& cfg);

// Split-chain potential scale reduction factor for one scalar series per
// chain (each row = one chain, columns = kept draws).
double split_rhat(const std::vector<std::vector<double>>& chains);

// Effective sample size by the initial-positive-sequence estimator, summed
// across chains.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

} // namespace pphi
