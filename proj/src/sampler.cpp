#include "pphi/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pphi/parallel.hpp"
#include "pphi/rng.hpp"

namespace pphi {

void ChainConfig::validate() const {
    if (n_steps <= 0 || burn_in < 0 || burn_in >= n_steps)
        throw std::invalid_argument("ChainConfig: need 0 <= burn_in < n_steps");
    if (n_chains < 2)
        throw std::invalid_argument("ChainConfig: need n_chains >= 2 for diagnostics");
    if (target_accept <= 0.0 || target_accept >= 1.0)
        throw std::invalid_argument("ChainConfig: target_accept must be in (0,1)");
    if (thinning < 1) throw std::invalid_argument("ChainConfig: thinning must be >= 1");
}

namespace {

// All built-in weight kinds are radial, so angular exactness is the only
// requirement for a diagonal Gram matrix.
bool diagonal_fast_path(const WeightedGeometry& geom, int degree) {
    (void)geom;
    const Quadrature& nu = geom.nu();
    return nu.is_radial_product() && nu.n_theta >= degree + 1;
}

// Stable magnitude of sqrt(w) e^{-N phi / 2} |z|^i assembled in log space.
inline double log_base_mag(double half_log_w, double n_half_phi, double log_abs_z, int i) {
    return half_log_w - n_half_phi + i * log_abs_z;
}

Eigen::MatrixXcd dense_design(const WeightedGeometry& geom, int degree) {
    const Quadrature& nu = geom.nu();
    const int cols = degree + 1;
    Eigen::MatrixXcd a(nu.size(), cols);
    for (std::size_t n = 0; n < nu.size(); ++n) {
        const Complex z = nu.nodes[n];
        const double half_log_w = 0.5 * std::log(nu.weights[n]);
        const double n_half_phi = 0.5 * degree * geom.weight(z);
        if (z == Complex{0.0, 0.0}) {
            a(n, 0) = std::exp(half_log_w - n_half_phi);
            for (int i = 1; i < cols; ++i) a(n, i) = Complex{0.0, 0.0};
            continue;
        }
        const double log_abs_z = std::log(std::abs(z));
        const double arg_z = std::arg(z);
        for (int i = 0; i < cols; ++i) {
            const double m = std::exp(log_base_mag(half_log_w, n_half_phi, log_abs_z, i));
            const double ph = i * arg_z;
            a(n, i) = Complex{m * std::cos(ph), m * std::sin(ph)};
        }
    }
    return a;
}

} // namespace

Eigen::MatrixXcd gram_matrix(const WeightedGeometry& geom, int degree) {
    if (degree < 0) throw std::invalid_argument("gram_matrix: degree must be >= 0");
    const int cols = degree + 1;
    const Quadrature& nu = geom.nu();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cols, cols);

    if (diagonal_fast_path(geom, degree)) {
        for (std::size_t s = 0; s < nu.radial_u.size(); ++s) {
            const double u = nu.radial_u[s];
            const double phi = geom.weight(Complex{std::sqrt(u), 0.0});
            const double log_w = std::log(nu.radial_weight[s]);
            for (int i = 0; i < cols; ++i) {
                const double lg = log_w - degree * phi + i * std::log(u);
                m(i, i) += std::exp(lg);
            }
        }
    } else {
        Eigen::MatrixXcd a = dense_design(geom, degree);
        m = a.adjoint() * a;
    }

    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("gram_matrix: degenerate measure (rank-deficient Gram)");
    return m;
}

Eigen::MatrixXcd kinetic_gram_matrix(const WeightedGeometry& geom, int degree) {
    if (degree < 0) throw std::invalid_argument("kinetic_gram_matrix: degree >= 0");
    const int cols = degree + 1;
    const Quadrature& nu = geom.nu();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cols, cols);

    if (diagonal_fast_path(geom, degree)) {
        for (std::size_t s = 0; s < nu.radial_u.size(); ++s) {
            const double u = nu.radial_u[s];
            const Complex zs{std::sqrt(u), 0.0};
            const double phi = geom.weight(zs);
            const double inv = geom.inv_metric_factor(zs);
            // phi_z = fp * conj(z) on the radial axis.
            const double fp = (u > 0.0) ? geom.connection_phi_z(zs).real() / zs.real() : 0.0;
            const double log_w = std::log(nu.radial_weight[s] * inv);
            for (int i = 0; i < cols; ++i) {
                // |i z^{i-1} - N phi_z z^i|^2 on the shell: u^{i-1} (i - N fp u)^2.
                const double amp = i - degree * fp * u;
                if (i == 0 && u == 0.0) continue;
                const double lg = log_w - degree * phi + (i - 1) * std::log(u);
                m(i, i) += std::exp(lg) * amp * amp;
            }
        }
        return m;
    }

    Eigen::MatrixXcd b(nu.size(), cols);
    for (std::size_t n = 0; n < nu.size(); ++n) {
        const Complex z = nu.nodes[n];
        const double half_log_w =
            0.5 * std::log(nu.weights[n] * geom.inv_metric_factor(z));
        const double n_half_phi = 0.5 * degree * geom.weight(z);
        const Complex phi_z = geom.connection_phi_z(z);
        if (z == Complex{0.0, 0.0}) {
            // d/dz z^i at 0 is nonzero only for i = 1.
            for (int i = 0; i < cols; ++i) b(n, i) = Complex{0.0, 0.0};
            if (cols > 1) b(n, 1) = std::exp(half_log_w - n_half_phi);
            continue;
        }
        const double log_abs_z = std::log(std::abs(z));
        const double arg_z = std::arg(z);
        for (int i = 0; i < cols; ++i) {
            // sqrt(w g) e^{-N phi/2} (i z^{i-1} - N phi_z z^i), written as
            // base * z^{max(i-1,0)} * (...) with the magnitude in log space.
            const int e = (i == 0) ? 0 : i - 1;
            const double mag = std::exp(log_base_mag(half_log_w, n_half_phi, log_abs_z, e));
            const double ph = e * arg_z;
            const Complex zpow{mag * std::cos(ph), mag * std::sin(ph)};
            const Complex factor =
                (i == 0) ? -static_cast<double>(degree) * phi_z
                         : static_cast<double>(i) - static_cast<double>(degree) * phi_z * z;
            b(n, i) = zpow * factor;
        }
    }
    m = b.adjoint() * b;
    return m;
}

namespace {

PolySection section_from_monomial_vector(const Eigen::VectorXcd& b) {
    const int n = static_cast<int>(b.size()) - 1;
    PolySection s;
    s.degree = n;
    s.coeffs.resize(n + 1);
    for (int p = 0; p <= n; ++p) s.coeffs[n - p] = b(p);
    return s;
}

} // namespace

std::vector<PolySection> sample_gaussian(const WeightedGeometry& geom, int degree,
                                         int count, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("sample_gaussian: count must be >= 0");
    std::vector<PolySection> out;
    if (count == 0) return out;

    Eigen::MatrixXcd m = gram_matrix(geom, degree);
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    const Eigen::MatrixXcd lh = llt.matrixL().adjoint(); // M = L L^H

    out.resize(count);
    parallel_for(count, [&](std::size_t idx) {
        Rng rng(seed, idx, 0xA11CEull);
        Eigen::VectorXcd xi(degree + 1);
        for (int i = 0; i <= degree; ++i) xi(i) = rng.complex_normal();
        // b = L^{-H} xi has covariance M^{-1}.
        Eigen::VectorXcd b = lh.triangularView<Eigen::Upper>().solve(xi);
        out[idx] = section_from_monomial_vector(b);
    });
    return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::vector<const double*> seq;
    std::vector<std::size_t> len;
    for (const auto& c : chains) {
        const std::size_t h = c.size() / 2;
        if (h < 2) return 1.0;
        seq.push_back(c.data());
        len.push_back(h);
        seq.push_back(c.data() + h);
        len.push_back(h);
    }
    const std::size_t m = seq.size();
    const std::size_t n = *std::min_element(len.begin(), len.end());
    std::vector<double> means(m), vars(m);
    for (std::size_t j = 0; j < m; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) mu += seq[j][i];
        mu /= n;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += (seq[j][i] - mu) * (seq[j][i] - mu);
        means[j] = mu;
        vars[j] = v / (n - 1);
    }
    const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b_over_n = 0.0;
    for (double mu : means) b_over_n += (mu - grand) * (mu - grand);
    b_over_n /= (m - 1);
    if (w <= 0.0) return 1.0;
    const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;
    return std::sqrt(var_plus / w);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
    const std::size_t m = chains.size();
    if (m == 0) return 0.0;
    std::size_t n = chains[0].size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (n < 4) return static_cast<double>(m * n);

    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) mu += chains[j][i];
        means[j] = mu / n;
        for (std::size_t i = 0; i < n; ++i)
            w += (chains[j][i] - means[j]) * (chains[j][i] - means[j]);
    }
    w /= m * (n - 1);
    if (w <= 0.0) return static_cast<double>(m * n);

    double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b_over_n = 0.0;
    for (double mu : means) b_over_n += (mu - grand) * (mu - grand);
    b_over_n = (m > 1) ? b_over_n / (m - 1) : 0.0;
    const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;

    auto rho = [&](std::size_t t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i + t < n; ++i)
                acc += (chains[j][i] - means[j]) * (chains[j][i + t] - means[j]);
        acc /= m * (n - t);
        return 1.0 - (w - acc) / var_plus;
    };

    double tau = 1.0;
    for (std::size_t t = 1; t + 1 < n; t += 2) {
        const double pair = rho(t) + rho(t + 1);
        if (pair < 0.0) break;
        tau += 2.0 * pair;
    }
    return static_cast<double>(m * n) / tau;
}

McmcResult sample_mcmc(const PotentialSpec& spec, const WeightedGeometry& geom,
                       int degree, const ChainConfig& cfg) {
    spec.validate();
    cfg.validate();
    const int dim = degree + 1;

    // Preconditioner: the quadratic part of the action (plus the Gram matrix
    // as a scale proxy when the potential has no quadratic term).
    Eigen::MatrixXcd pre = gram_matrix(geom, degree);
    if (spec.include_kinetic) pre += kinetic_gram_matrix(geom, degree);
    Eigen::LLT<Eigen::MatrixXcd> llt(pre);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("sample_mcmc: preconditioner not positive definite");
    const Eigen::MatrixXcd lh = llt.matrixL().adjoint();

    const int kept_per_chain = (cfg.n_steps - cfg.burn_in) / cfg.thinning;
    if (kept_per_chain < 2)
        throw std::invalid_argument("sample_mcmc: too few post-burn-in draws");

    const int n_monitor = 6;
    std::vector<std::vector<PolySection>> chain_samples(cfg.n_chains);
    std::vector<std::vector<std::vector<double>>> monitors(
        n_monitor, std::vector<std::vector<double>>(cfg.n_chains));
    std::vector<double> accept_rate(cfg.n_chains, 0.0);

    std::vector<int> watch(5);
    for (int j = 0; j < 5; ++j) watch[j] = std::min(degree, j * std::max(1, degree / 4));

    parallel_for(cfg.n_chains, [&](std::size_t chain) {
        Rng rng(cfg.seed, chain, 0x3C41Full);
        auto draw_direction = [&]() {
            Eigen::VectorXcd xi(dim);
            for (int i = 0; i < dim; ++i) xi(i) = rng.complex_normal();
            return lh.triangularView<Eigen::Upper>().solve(xi).eval();
        };

        Eigen::VectorXcd b = 1.5 * draw_direction();
        PolySection cur = section_from_monomial_vector(b);
        double cur_action = action(cur, spec, geom);

        double log_step = std::log(2.38 / std::sqrt(2.0 * dim));
        long accepted_sampling = 0, proposals_sampling = 0;

        chain_samples[chain].reserve(kept_per_chain);
        for (int mm = 0; mm < n_monitor; ++mm)
            monitors[mm][chain].reserve(kept_per_chain);

        for (int step = 0; step < cfg.n_steps; ++step) {
            const bool adapting = step < cfg.burn_in;
            const double scale = std::exp(log_step);
            Eigen::VectorXcd prop = b + scale * draw_direction();
            PolySection s_prop = section_from_monomial_vector(prop);
            const double a_prop = action(s_prop, spec, geom);
            const double log_alpha = cur_action - a_prop;
            const bool accept = std::log(rng.uniform() + 1e-300) < log_alpha;
            if (accept) {
                b.swap(prop);
                cur = std::move(s_prop);
                cur_action = a_prop;
            }
            if (adapting) {
                const double gamma = 2.0 / std::pow(step + 20.0, 0.6);
                log_step += gamma * ((accept ? 1.0 : 0.0) - cfg.target_accept);
                log_step = std::clamp(log_step, -12.0, 3.0);
            } else {
                ++proposals_sampling;
                if (accept) ++accepted_sampling;
                const int k = step - cfg.burn_in;
                if ((k + 1) % cfg.thinning == 0 &&
                    static_cast<int>(chain_samples[chain].size()) < kept_per_chain) {
                    chain_samples[chain].push_back(cur);
                    monitors[0][chain].push_back(cur_action);
                    for (int j = 0; j < 5; ++j)
                        monitors[1 + j][chain].push_back(std::norm(b(watch[j])));
                }
            }
        }
        accept_rate[chain] =
            proposals_sampling > 0
                ? static_cast<double>(accepted_sampling) / proposals_sampling
                : 0.0;
    });

    McmcResult res;
    for (int c = 0; c < cfg.n_chains; ++c)
        res.samples.insert(res.samples.end(), chain_samples[c].begin(),
                           chain_samples[c].end());

    double acc = 0.0;
    for (double a : accept_rate) acc += a;
    res.diagnostics.acceptance_rate = acc / cfg.n_chains;

    double rhat = 0.0, ess = std::numeric_limits<double>::infinity();
    for (int mm = 0; mm < n_monitor; ++mm) {
        rhat = std::max(rhat, split_rhat(monitors[mm]));
        ess = std::min(ess, effective_sample_size(monitors[mm]));
    }
    res.diagnostics.rhat_max = rhat;
    res.diagnostics.ess_min = ess;
    if (rhat > 1.1) {
        res.diagnostics.converged = false;
        res.diagnostics.warning =
            "chains did not converge: split R-hat " + std::to_string(rhat);
    }
    return res;
}

} // namespace pphi
