#pragma once

#include <string>
#include <vector>

#include "pphi/config.hpp"
#include "pphi/jpc.hpp"
#include "pphi/sampler.hpp"
#include "pphi/zeros.hpp"

namespace pphi {

// Pipeline stages. Outputs land in cfg.out_dir under stable names; when the
// directory already holds a manifest with the same config hash, existing
// stage files are loaded instead of recomputed, and downstream results are
// bit-identical.
std::vector<PolySection> stage_samples(const RunConfig& cfg, int degree,
                                       const WeightedGeometry& geom,
                                       ChainDiagnostics* diag = nullptr);
std::vector<ZeroConfig> stage_zeros(const RunConfig& cfg, int degree,
                                    const std::vector<PolySection>& samples);

// Writes (or validates) the run manifest; true when existing stage outputs
// may be reused.
bool prepare_out_dir(const RunConfig& cfg);

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string details;
};

struct Report {
    std::vector<CheckOutcome> checks;
    bool all_passed() const;
};

struct EqdistRow {
    int n = 0;
    double w1 = 0.0;
    double se = 0.0;
    double agg_bound = 0.0;
    double rhat = 0.0;
    double acceptance = 0.0;
};

struct EqdistResult {
    std::vector<EqdistRow> rows;
    bool strictly_decreasing = false;
    bool sampler_ok = true;
};

// Convergence study of the mean empirical measure toward the equilibrium
// measure; emits eqdist.csv and eqdist.svg.
EqdistResult run_eqdist(const RunConfig& cfg);

// Full circle-ensemble story: norm identities, derivative bound, radial
// concentration, angular uniformity, distance trend. Sub-check failures are
// flagged and the run continues.
Report run_kh_demo(const RunConfig& cfg);

// Two-configuration density-identity residuals plus the beta bound.
Report run_jpc_check(const RunConfig& cfg, int n_pairs);

struct GammaCheckRow {
    int n = 0;
    double log_gamma = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double normalized = 0.0; // log_gamma / N^2
};

Report run_gamma_check(const RunConfig& cfg, int k, std::vector<double> c,
                       int n_max, std::vector<GammaCheckRow>* rows_out = nullptr);

// Derivative-bound study: circle ensembles against the N^2 law, curvature
// geometries against the empirical growth exponent.
Report run_bernstein_check(const RunConfig& cfg);

Report run_equilibrium_experiment(const RunConfig& cfg);

RateValue run_rate(const RunConfig& cfg, const std::string& measure_path);

// Dispatch on cfg.experiment; returns the process exit code (0 ok, 1 checks
// failed).
int run_experiment(const RunConfig& cfg);

} // namespace pphi
