#include "pphi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "pphi/measures.hpp"
#include "pphi/numeric.hpp"
#include "pphi/parallel.hpp"
#include "pphi/rng.hpp"
#include "pphi/svg.hpp"

namespace pphi {

namespace fs = std::filesystem;
using nlohmann::json;

bool Report::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

std::uint64_t degree_seed(const RunConfig& cfg, int degree) {
    return cfg.seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(degree + 1));
}

fs::path samples_path(const RunConfig& cfg, int degree) {
    return fs::path(cfg.out_dir) / ("samples_N" + std::to_string(degree) + ".json");
}

fs::path zeros_path(const RunConfig& cfg, int degree) {
    return fs::path(cfg.out_dir) / ("zeros_N" + std::to_string(degree) + ".csv");
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    json j;
    f >> j;
    return j;
}

bool quadratic_gaussian(const PotentialSpec& spec) {
    return spec.k == 1 && !spec.include_kinetic;
}

DiscreteMeasure mean_empirical_measure(const std::vector<ZeroConfig>& zeros) {
    DiscreteMeasure mu;
    std::size_t total = 0;
    int inf_count = 0;
    for (const auto& zc : zeros) {
        total += zc.n;
        inf_count += zc.zeros_at_infinity;
    }
    const double w = 1.0 / static_cast<double>(total);
    for (const auto& zc : zeros)
        for (const Complex& z : zc.finite_zeros) {
            mu.points.push_back(CP1Point::finite(z));
            mu.weights.push_back(w);
        }
    if (inf_count > 0) {
        mu.points.push_back(CP1Point::infinity());
        mu.weights.push_back(w * inf_count);
    }
    return mu;
}

struct CsvWriter {
    std::ofstream f;
    explicit CsvWriter(const fs::path& p) : f(p) {
        if (!f) throw std::runtime_error("cannot write " + p.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) f << ",";
            f << cells[i];
        }
        f << "\r\n"; // RFC 4180
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

bool prepare_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const json config_json = run_config_to_json(cfg);
    const std::string hash = hash_hex(config_hash(config_json));
    const fs::path mpath = fs::path(cfg.out_dir) / "manifest.json";
    if (fs::exists(mpath)) {
        try {
            json m = read_json(mpath);
            if (m.value("config_hash", "") == hash) return true;
        } catch (...) {
        }
    }
    json m;
    m["tool"] = "pphi";
    m["format"] = "pphi-manifest-v1";
    m["config"] = config_json;
    m["config_hash"] = hash;
    m["seed"] = cfg.seed;
    write_json(mpath, m);
    return false;
}

std::vector<PolySection> stage_samples(const RunConfig& cfg, int degree,
                                       const WeightedGeometry& geom,
                                       ChainDiagnostics* diag) {
    const fs::path path = samples_path(cfg, degree);
    const bool resumable = prepare_out_dir(cfg);
    if (resumable && fs::exists(path)) {
        json j = read_json(path);
        std::vector<PolySection> out;
        for (const auto& sample : j.at("samples")) {
            PolySection s;
            s.degree = degree;
            for (const auto& pair : sample)
                s.coeffs.push_back(Complex{pair[0].get<double>(), pair[1].get<double>()});
            s.validate();
            out.push_back(std::move(s));
        }
        if (diag && j.contains("diagnostics")) {
            diag->acceptance_rate = j["diagnostics"].value("acceptance_rate", 0.0);
            diag->rhat_max = j["diagnostics"].value("rhat_max", 0.0);
            diag->ess_min = j["diagnostics"].value("ess_min", 0.0);
            diag->converged = j["diagnostics"].value("converged", true);
            diag->warning = j["diagnostics"].value("warning", "");
        }
        return out;
    }

    std::vector<PolySection> samples;
    ChainDiagnostics diagnostics;
    const std::uint64_t seed = degree_seed(cfg, degree);
    if (quadratic_gaussian(cfg.potential)) {
        samples = sample_gaussian(geom, degree, cfg.samples_per_n, seed);
        diagnostics.acceptance_rate = 1.0;
        diagnostics.rhat_max = 1.0;
        diagnostics.ess_min = cfg.samples_per_n;
    } else {
        ChainConfig chain = cfg.chain;
        chain.seed = seed;
        const int per_chain =
            (cfg.samples_per_n + chain.n_chains - 1) / chain.n_chains;
        chain.n_steps =
            std::max(chain.n_steps, chain.burn_in + per_chain * chain.thinning);
        McmcResult res = sample_mcmc(cfg.potential, geom, degree, chain);
        samples = std::move(res.samples);
        if (static_cast<int>(samples.size()) > cfg.samples_per_n)
            samples.resize(cfg.samples_per_n);
        diagnostics = res.diagnostics;
    }
    if (diag) *diag = diagnostics;

    json j;
    j["format"] = "pphi-samples-v1";
    j["config_hash"] = hash_hex(config_hash(run_config_to_json(cfg)));
    j["seed"] = degree_seed(cfg, degree);
    j["n"] = degree;
    j["potential"] = {{"k", cfg.potential.k},
                      {"c", cfg.potential.c},
                      {"kinetic", cfg.potential.include_kinetic}};
    j["diagnostics"] = {{"acceptance_rate", diagnostics.acceptance_rate},
                        {"rhat_max", diagnostics.rhat_max},
                        {"ess_min", diagnostics.ess_min},
                        {"converged", diagnostics.converged},
                        {"warning", diagnostics.warning}};
    json arr = json::array();
    for (const auto& s : samples) {
        json one = json::array();
        for (const Complex& a : s.coeffs) one.push_back({a.real(), a.imag()});
        arr.push_back(std::move(one));
    }
    j["samples"] = std::move(arr);
    write_json(path, j);
    return samples;
}

std::vector<ZeroConfig> stage_zeros(const RunConfig& cfg, int degree,
                                    const std::vector<PolySection>& samples) {
    const fs::path path = zeros_path(cfg, degree);
    const bool resumable = prepare_out_dir(cfg);
    if (resumable && fs::exists(path)) {
        std::ifstream f(path);
        std::string line;
        std::getline(f, line); // header
        std::vector<ZeroConfig> out(samples.size());
        for (auto& zc : out) zc.n = 0;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            long id;
            double re, im;
            int at_inf;
            if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%d", &id, &re, &im, &at_inf) == 4) {
                ZeroConfig& zc = out.at(id);
                ++zc.n;
                if (at_inf)
                    ++zc.zeros_at_infinity;
                else
                    zc.finite_zeros.push_back(Complex{re, im});
            }
        }
        for (auto& zc : out) zc.validate();
        return out;
    }

    std::vector<ZeroConfig> zeros(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        zeros[i] = find_roots(samples[i], 1e-6);
    });

    CsvWriter csv(path);
    csv.row({"sample_id", "re", "im", "at_infinity"});
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        for (const Complex& z : zeros[i].finite_zeros)
            csv.row({std::to_string(i), num(z.real()), num(z.imag()), "0"});
        for (int q = 0; q < zeros[i].zeros_at_infinity; ++q)
            csv.row({std::to_string(i), "0", "0", "1"});
    }
    return zeros;
}

namespace {

// Reference equilibrium measure on the configured support grid.
struct EquilibriumReference {
    GridEnergy grid;
    EquilibriumResult result;
    double eh = 0.0;
};

EquilibriumReference solve_reference(const RunConfig& cfg) {
    WeightedGeometry geom = make_geometry(cfg.geometry, std::max(cfg.n_list.front(), 2),
                                          cfg.potential.k, cfg.equilibrium.grid_size);
    GridEnergy grid(geom, geom.support_grid());
    EquilibriumResult res = equilibrium_measure(grid, cfg.equilibrium);
    const double eh = calibrate_eh(grid, res.weights);
    return EquilibriumReference{std::move(grid), std::move(res), eh};
}

// Aggregation tuned so the exact transport problem stays tractable: start
// fine and halve the angular resolution until at most ~4000 occupied bins
// remain. The displacement bound reported alongside is exact either way.
AggregatedMeasure aggregate_adaptive(const DiscreteMeasure& mu) {
    int n_theta = 2048;
    for (;;) {
        AggregatedMeasure agg = aggregate_measure(mu, n_theta, 512);
        if (agg.measure.size() <= 4200 || n_theta <= 256) return agg;
        n_theta /= 2;
    }
}

double batch_w1(const std::vector<ZeroConfig>& zeros, std::size_t lo, std::size_t hi,
                const DiscreteMeasure& ref) {
    std::vector<ZeroConfig> part(zeros.begin() + lo, zeros.begin() + hi);
    AggregatedMeasure agg = aggregate_adaptive(mean_empirical_measure(part));
    return wasserstein(agg.measure, ref);
}

} // namespace

EqdistResult run_eqdist(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    EquilibriumReference ref = solve_reference(cfg);

    EqdistResult out;
    for (int degree : cfg.n_list) {
        WeightedGeometry geom =
            make_geometry(cfg.geometry, degree, cfg.potential.k, cfg.equilibrium.grid_size);
        ChainDiagnostics diag;
        std::vector<PolySection> samples = stage_samples(cfg, degree, geom, &diag);
        std::vector<ZeroConfig> zeros = stage_zeros(cfg, degree, samples);

        AggregatedMeasure agg = aggregate_adaptive(mean_empirical_measure(zeros));
        EqdistRow row;
        row.n = degree;
        row.w1 = wasserstein(agg.measure, ref.result.measure);
        row.agg_bound = agg.displacement_bound;
        row.rhat = diag.rhat_max;
        row.acceptance = diag.acceptance_rate;
        if (!diag.converged) out.sampler_ok = false;

        // Monte-Carlo standard error across sample batches.
        const std::size_t b = 8;
        if (zeros.size() >= 2 * b) {
            std::vector<double> vals;
            const std::size_t step = zeros.size() / b;
            for (std::size_t q = 0; q < b; ++q)
                vals.push_back(batch_w1(zeros, q * step, (q + 1) * step,
                                        ref.result.measure));
            double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / b;
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            row.se = std::sqrt(var / (b - 1)) / std::sqrt(static_cast<double>(b));
        }
        out.rows.push_back(row);
    }

    out.strictly_decreasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (!(out.rows[i].w1 < out.rows[i - 1].w1)) out.strictly_decreasing = false;

    CsvWriter csv(fs::path(cfg.out_dir) / "eqdist.csv");
    csv.row({"n", "w1", "se", "agg_bound", "rhat", "acceptance"});
    for (const auto& r : out.rows)
        csv.row({std::to_string(r.n), num(r.w1), num(r.se), num(r.agg_bound),
                 num6(r.rhat), num6(r.acceptance)});

    PlotSeries series;
    for (const auto& r : out.rows) {
        series.x.push_back(r.n);
        series.y.push_back(r.w1);
    }
    series.x_label = "degree N";
    series.y_label = "W1 distance to equilibrium";
    series.title = "mean empirical measure vs equilibrium";
    emit_plot(series, PlotKind::Line, (fs::path(cfg.out_dir) / "eqdist.svg").string());
    return out;
}

Report run_kh_demo(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Report report;
    const int degree = cfg.n_list.back();
    WeightedGeometry geom =
        make_geometry(cfg.geometry, degree, cfg.potential.k, cfg.equilibrium.grid_size);
    Rng rng(cfg.seed, 0xDE110ull);

    // Closed-form norm identities for circle geometries.
    {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Complex> by_power(degree + 1);
            for (auto& a : by_power) a = rng.complex_normal();
            PolySection s = PolySection::from_monomial(by_power);
            double sum_sq = 0.0, sum_j2 = 0.0;
            for (int p = 0; p <= degree; ++p) {
                sum_sq += std::norm(s.monomial_coeff(p));
                sum_j2 += static_cast<double>(p) * p * std::norm(s.monomial_coeff(p));
            }
            worst = std::max(worst,
                             std::abs(weighted_norm_sq(s, geom) - sum_sq) / sum_sq);
            worst = std::max(worst,
                             std::abs(kinetic_energy(s, geom) - sum_j2) / sum_j2);
        }
        report.checks.push_back({"norm_identities", worst < 1e-10,
                                 "max relative deviation " + num6(worst)});
    }

    ChainDiagnostics diag;
    std::vector<PolySection> samples = stage_samples(cfg, degree, geom, &diag);
    std::vector<ZeroConfig> zeros = stage_zeros(cfg, degree, samples);

    // Derivative bound over every sampled section.
    {
        std::vector<double> ratios(samples.size());
        parallel_for(samples.size(), [&](std::size_t i) {
            ratios[i] = bernstein_ratio(samples[i], geom);
        });
        const double worst = *std::max_element(ratios.begin(), ratios.end());
        report.checks.push_back(
            {"derivative_bound",
             worst <= static_cast<double>(degree) * degree * (1.0 + 1e-12),
             "max ratio / N^2 = " + num6(worst / (static_cast<double>(degree) * degree))});
    }

    // Radial concentration of zeros.
    {
        std::size_t inside = 0, total = 0;
        for (const auto& zc : zeros) {
            total += zc.n;
            for (const Complex& z : zc.finite_zeros) {
                const double r = std::abs(z);
                if (r >= 0.85 && r <= 1.15) ++inside;
            }
        }
        const double frac = static_cast<double>(inside) / total;
        report.checks.push_back({"radial_mass", frac >= 0.90,
                                 "mass in [0.85, 1.15]: " + num6(frac)});

        // Radial histogram plot.
        PlotSeries hist;
        const int bins = 60;
        std::vector<double> counts(bins, 0.0);
        for (const auto& zc : zeros)
            for (const Complex& z : zc.finite_zeros) {
                const double r = std::abs(z);
                const int b = std::clamp(static_cast<int>((r - 0.5) / 1.0 * bins), 0,
                                         bins - 1);
                counts[b] += 1.0;
            }
        for (int b = 0; b < bins; ++b) {
            hist.x.push_back(0.5 + (b + 0.5) / bins);
            hist.y.push_back(counts[b]);
        }
        hist.x_label = "|z|";
        hist.y_label = "zero count";
        hist.title = "radial distribution of zeros";
        emit_plot(hist, PlotKind::Histogram,
                  (fs::path(cfg.out_dir) / "kh_radial.svg").string());
    }

    // Angular uniformity: mean Fourier modes across samples.
    {
        bool ok = true;
        std::string detail;
        for (int mode = 1; mode <= 4; ++mode) {
            std::vector<Complex> per_sample;
            for (const auto& zc : zeros) {
                Complex acc{0.0, 0.0};
                for (const Complex& z : zc.finite_zeros) {
                    const double th = std::arg(z);
                    acc += Complex{std::cos(mode * th), std::sin(mode * th)};
                }
                per_sample.push_back(acc / static_cast<double>(zc.n));
            }
            Complex mean{0.0, 0.0};
            for (const Complex& v : per_sample) mean += v;
            mean /= static_cast<double>(per_sample.size());
            double var = 0.0;
            for (const Complex& v : per_sample) var += std::norm(v - mean);
            var /= (per_sample.size() - 1.0);
            const double se = std::sqrt(var / per_sample.size());
            if (std::abs(mean) > 3.0 * se) ok = false;
            detail += "m" + std::to_string(mode) + ": " + num6(std::abs(mean)) + " (se " +
                      num6(se) + ") ";
        }
        report.checks.push_back({"angular_uniformity", ok, detail});
    }

    // Distance trend across the configured degrees.
    {
        EqdistResult eq = run_eqdist(cfg);
        report.checks.push_back(
            {"eqdist_trend", eq.strictly_decreasing && eq.sampler_ok,
             "W1 by N: " + [&] {
                 std::string s;
                 for (const auto& r : eq.rows)
                     s += std::to_string(r.n) + ":" + num6(r.w1) + " ";
                 return s;
             }()});
    }

    // Scatter of zeros from the first few samples.
    {
        PlotSeries sc;
        for (std::size_t i = 0; i < std::min<std::size_t>(zeros.size(), 100); ++i)
            for (const Complex& z : zeros[i].finite_zeros) {
                sc.x.push_back(z.real());
                sc.y.push_back(z.imag());
            }
        sc.x_label = "Re z";
        sc.y_label = "Im z";
        sc.title = "zeros";
        emit_plot(sc, PlotKind::Scatter,
                  (fs::path(cfg.out_dir) / "kh_zeros.svg").string());
    }

    json j;
    j["checks"] = json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
    j["all_passed"] = report.all_passed();
    write_json(fs::path(cfg.out_dir) / "kh_report.json", j);
    return report;
}

Report run_jpc_check(const RunConfig& cfg, int n_pairs) {
    prepare_out_dir(cfg);
    Report report;
    Rng rng(cfg.seed, 0x19C5ull);

    double max_resid = 0.0;
    double max_beta = 0.0;
    for (int pair = 0; pair < n_pairs; ++pair) {
        const int degree = 2 + static_cast<int>(rng.below(4)); // 2..5
        WeightedGeometry geom = make_geometry(cfg.geometry, degree, cfg.potential.k, 64);
        auto draw = [&]() {
            ZeroConfig zc;
            zc.n = degree;
            for (int q = 0; q < degree; ++q)
                zc.finite_zeros.push_back(
                    Complex{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
            return zc;
        };
        ZeroConfig a = draw(), b = draw();
        max_resid = std::max(
            max_resid, std::abs(jpc_identity_residual(a, b, cfg.potential, geom)));
        for (int i = 1; i < cfg.potential.k; ++i) {
            max_beta = std::max(max_beta, beta_ratio(i, a, geom, cfg.potential.k));
            max_beta = std::max(max_beta, beta_ratio(i, b, geom, cfg.potential.k));
        }
    }
    report.checks.push_back({"identity_residual", max_resid <= 1e-6,
                             "max |residual| = " + num6(max_resid)});
    if (cfg.potential.k > 1)
        report.checks.push_back({"beta_bound", max_beta <= 1.0 + 1e-10,
                                 "max beta = " + num(max_beta)});

    json j;
    j["n_pairs"] = n_pairs;
    j["max_residual"] = max_resid;
    j["max_beta"] = max_beta;
    j["checks"] = json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
    write_json(fs::path(cfg.out_dir) / "jpc_report.json", j);
    return report;
}

Report run_gamma_check(const RunConfig& cfg, int k, std::vector<double> c, int n_max,
                       std::vector<GammaCheckRow>* rows_out) {
    prepare_out_dir(cfg);
    Report report;
    if (k < 1 || static_cast<int>(c.size()) != k - 1)
        throw ConfigError("gamma-check: need k-1 lower coefficients");

    std::vector<int> ladder;
    for (int n = 1; n <= std::min(10, n_max); ++n) ladder.push_back(n);
    for (int n = 14; n < n_max; n = static_cast<int>(n * 1.4) + 1) ladder.push_back(n);
    if (n_max > 10) ladder.push_back(n_max);

    std::vector<GammaCheckRow> rows;
    bool inside = true;
    for (int n : ladder) {
        GammaInput in;
        in.k = k;
        in.c = c;
        in.betas.assign(k - 1, 1.0);
        in.n = n;
        GammaCheckRow row;
        row.n = n;
        row.log_gamma = log_gamma_n(in);
        GammaBounds b = gamma_sandwich(in);
        row.lower = b.lower_log;
        row.upper = b.upper_log;
        row.normalized = row.log_gamma / (static_cast<double>(n) * n);
        if (!(row.lower <= row.log_gamma + 1e-9 && row.log_gamma <= row.upper + 1e-9))
            inside = false;
        rows.push_back(row);
    }

    CsvWriter csv(fs::path(cfg.out_dir) / "gamma.csv");
    csv.row({"N", "log_gamma", "lower", "upper", "log_gamma_over_N2"});
    for (const auto& r : rows)
        csv.row({std::to_string(r.n), num(r.log_gamma), num(r.lower), num(r.upper),
                 num(r.normalized)});

    report.checks.push_back({"sandwich", inside,
                             "all " + std::to_string(rows.size()) + " rows in bounds"});
    const double tail_norm = std::abs(rows.back().normalized);
    report.checks.push_back({"normalization_decay",
                             tail_norm < std::abs(rows.front().normalized),
                             "|log Gamma|/N^2 at N=" + std::to_string(rows.back().n) +
                                 ": " + num6(tail_norm)});
    if (rows_out) *rows_out = rows;
    return report;
}

Report run_bernstein_check(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Report report;
    json j;

    // Circle ensemble: ratio <= N^2 on many random sections.
    {
        double worst_scaled = 0.0;
        for (int degree : {5, 10, 20, 50, 100, 200}) {
            WeightedGeometry geom = make_kac_hammersley_geometry(2 * degree + 4, 64);
            const int n_sections = 10000;
            std::vector<double> worst(worker_threads(), 0.0);
            parallel_for(n_sections, [&](std::size_t i) {
                Rng rng(cfg.seed, 0xBE57ull, degree, i);
                std::vector<Complex> by_power(degree + 1);
                for (auto& a : by_power) a = rng.complex_normal();
                PolySection s = PolySection::from_monomial(by_power);
                double sum_sq = 0.0, sum_j2 = 0.0;
                for (int p = 0; p <= degree; ++p) {
                    sum_sq += std::norm(s.monomial_coeff(p));
                    sum_j2 += static_cast<double>(p) * p * std::norm(s.monomial_coeff(p));
                }
                const double ratio = sum_j2 / sum_sq;
                auto& slot = worst[i % worst.size()];
                slot = std::max(slot, ratio / (static_cast<double>(degree) * degree));
            });
            worst_scaled = std::max(
                worst_scaled, *std::max_element(worst.begin(), worst.end()));
        }
        report.checks.push_back({"circle_n2_bound", worst_scaled <= 1.0 + 1e-12,
                                 "max ratio / N^2 = " + num(worst_scaled)});
        j["circle_max_ratio_over_n2"] = worst_scaled;
    }

    // Curvature geometry: growth exponent of the worst ratio.
    {
        std::vector<int> ladder = {10, 20, 40, 80, 140, 200};
        std::vector<double> log_n, log_ratio;
        for (int degree : ladder) {
            GeometrySpec fs_spec;
            fs_spec.weight = WeightKind::FubiniStudy;
            fs_spec.nu_kind = GeometrySpec::NuKind::Curvature;
            fs_spec.nu_n = 1000;
            fs_spec.support = GeometrySpec::SupportKind::Full;
            WeightedGeometry geom = make_geometry(fs_spec, degree, 1, 64);
            auto sections = sample_gaussian(geom, degree, 1000, cfg.seed ^ degree);
            std::vector<double> ratios(sections.size());
            parallel_for(sections.size(), [&](std::size_t i) {
                ratios[i] = bernstein_ratio(sections[i], geom);
            });
            const double worst = *std::max_element(ratios.begin(), ratios.end());
            log_n.push_back(std::log(static_cast<double>(degree)));
            log_ratio.push_back(std::log(worst));
        }
        // Least-squares slope.
        const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / log_n.size();
        const double my =
            std::accumulate(log_ratio.begin(), log_ratio.end(), 0.0) / log_ratio.size();
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxx += (log_n[i] - mx) * (log_n[i] - mx);
            sxy += (log_n[i] - mx) * (log_ratio[i] - my);
        }
        const double slope = sxy / sxx;
        report.checks.push_back(
            {"curvature_growth_exponent", slope <= 2.1, "slope = " + num6(slope)});
        j["curvature_slope"] = slope;
    }

    // Mixed geometry: growth of the curvature-to-nu norm ratio (the exponent
    // r in the L^2 condition), reported without a pass threshold.
    {
        std::vector<int> ladder = {5, 10, 20, 40};
        std::vector<double> log_n, log_ratio;
        for (int degree : ladder) {
            WeightedGeometry mixed(
                WeightKind::FubiniStudy, {}, circle_rule(2 * degree + 4),
                curvature_rule_product(WeightKind::FubiniStudy, {}, degree + 6,
                                       2 * degree + 4),
                circle_grid(64));
            auto sections = sample_gaussian(mixed, degree, 300, cfg.seed ^ (degree * 7));
            double worst = 0.0;
            for (const auto& s : sections)
                worst = std::max(worst, l2_condition_ratio(s, mixed));
            log_n.push_back(std::log(static_cast<double>(degree)));
            log_ratio.push_back(std::log(worst));
        }
        const double slope = (log_ratio.back() - log_ratio.front()) /
                             (log_n.back() - log_n.front());
        j["l2_condition_exponent_estimate"] = slope;
    }

    // Kinetic shift scale: eta / alpha_k^{1/k} against N^2 on curvature
    // geometries; the constant is estimated, never assumed.
    {
        GeometrySpec fs_spec;
        fs_spec.weight = WeightKind::FubiniStudy;
        fs_spec.nu_kind = GeometrySpec::NuKind::Curvature;
        fs_spec.nu_n = 1000;
        fs_spec.support = GeometrySpec::SupportKind::Full;
        double worst_c = 0.0;
        Rng rng(cfg.seed, 0xE7A0ull);
        for (int degree : {4, 8, 16}) {
            WeightedGeometry geom = make_geometry(fs_spec, degree, 2, 64);
            for (int trial = 0; trial < 40; ++trial) {
                ZeroConfig zc;
                zc.n = degree;
                for (int q = 0; q < degree; ++q)
                    zc.finite_zeros.push_back(
                        Complex{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)});
                const double eta = monic_kinetic_energy(zc, geom);
                const double la = log_alpha(2, zc, geom);
                const double shift = eta * std::exp(-la / 2.0);
                worst_c = std::max(worst_c,
                                   shift / (static_cast<double>(degree) * degree));
            }
        }
        j["eta_over_alpha_per_n2"] = worst_c;
    }

    j["checks"] = json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
    write_json(fs::path(cfg.out_dir) / "bernstein_report.json", j);
    return report;
}

Report run_equilibrium_experiment(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Report report;
    EquilibriumReference ref = solve_reference(cfg);
    RateValue rv = rate_functional_on_grid(ref.grid, ref.result.weights, ref.eh);

    report.checks.push_back({"certified", ref.result.certified,
                             "gap " + num6(ref.result.fw_gap) + ", potential spread " +
                                 num6(ref.result.potential_spread)});
    report.checks.push_back(
        {"rate_at_minimizer", std::abs(rv.total) <= 1e-6, "I(eq) = " + num(rv.total)});

    json j;
    j["points"] = json::array();
    for (std::size_t i = 0; i < ref.result.measure.size(); ++i) {
        const auto& p = ref.result.measure.points[i];
        j["points"].push_back({p.z.real(), p.z.imag()});
    }
    j["weights"] = ref.result.measure.weights;
    j["rate"] = {{"energy", rv.energy},
                 {"sup_potential", rv.sup_potential},
                 {"eh_constant", rv.eh_constant},
                 {"total", rv.total}};
    j["residuals"] = {{"fw_gap", ref.result.fw_gap},
                      {"potential_spread", ref.result.potential_spread},
                      {"off_support_excess", ref.result.off_support_excess},
                      {"iterations", ref.result.iterations}};
    j["grid_spacing"] = ref.grid.spacing();
    write_json(fs::path(cfg.out_dir) / "eq.json", j);

    PlotSeries sc;
    for (const auto& p : ref.result.measure.points) {
        sc.x.push_back(p.z.real());
        sc.y.push_back(p.z.imag());
    }
    sc.title = "equilibrium support";
    sc.x_label = "Re z";
    sc.y_label = "Im z";
    emit_plot(sc, PlotKind::Scatter, (fs::path(cfg.out_dir) / "eq.svg").string());
    return report;
}

RateValue run_rate(const RunConfig& cfg, const std::string& measure_path) {
    json j = read_json(measure_path);
    DiscreteMeasure mu;
    for (const auto& p : j.at("points")) {
        if (p.is_string() && p.get<std::string>() == "inf")
            mu.points.push_back(CP1Point::infinity());
        else
            mu.points.push_back(
                CP1Point::finite({p[0].get<double>(), p[1].get<double>()}));
    }
    mu.weights = j.at("weights").get<std::vector<double>>();
    mu.validate(1e-9);

    WeightedGeometry geom = make_geometry(cfg.geometry, std::max(cfg.n_list.front(), 2),
                                          cfg.potential.k, cfg.equilibrium.grid_size);
    GridEnergy grid(geom, geom.support_grid());
    EquilibriumResult eq = equilibrium_measure(grid, cfg.equilibrium);
    const double eh = calibrate_eh(grid, eq.weights);
    return rate_functional(mu, geom, eh);
}

int run_experiment(const RunConfig& cfg) {
    set_worker_threads(cfg.threads);
    switch (cfg.experiment) {
    case ExperimentKind::Eqdist: {
        EqdistResult r = run_eqdist(cfg);
        return r.sampler_ok ? 0 : 1;
    }
    case ExperimentKind::KhDemo:
        return run_kh_demo(cfg).all_passed() ? 0 : 1;
    case ExperimentKind::JpcCheck:
        return run_jpc_check(cfg, 100).all_passed() ? 0 : 1;
    case ExperimentKind::GammaCheck: {
        std::vector<double> c(cfg.potential.c.begin(), cfg.potential.c.end() - 1);
        return run_gamma_check(cfg, cfg.potential.k, c, cfg.n_list.back()).all_passed()
                   ? 0
                   : 1;
    }
    case ExperimentKind::BernsteinCheck:
        return run_bernstein_check(cfg).all_passed() ? 0 : 1;
    case ExperimentKind::Equilibrium:
        return run_equilibrium_experiment(cfg).all_passed() ? 0 : 1;
    }
    return 2;
}

} // namespace pphi
