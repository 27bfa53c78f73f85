#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "pphi/experiments.hpp"
#include "pphi/parallel.hpp"

namespace {

using namespace pphi;

void print_report(const Report& report) {
    for (const auto& c : report.checks)
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.details.c_str());
}

int with_config(const std::string& config_path, std::uint64_t* seed_override,
                std::string* out_override, int threads,
                const std::function<int(RunConfig&)>& body) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.chain.seed = *seed_override;
        }
        if (out_override && !out_override->empty()) cfg.out_dir = *out_override;
        if (threads > 0) cfg.threads = threads;
        set_worker_threads(cfg.threads);
        return body(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pphi: zeros of random polynomial ensembles on CP^1"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--threads", threads, "worker thread count (0 = auto)");

    auto* cmd_sample = app.add_subcommand("sample", "draw polynomial samples");
    auto* cmd_zeros = app.add_subcommand("zeros", "compute zeros of stored samples");
    auto* cmd_eq = app.add_subcommand("equilibrium", "solve the equilibrium measure");
    auto* cmd_rate = app.add_subcommand("rate", "evaluate the rate functional");
    auto* cmd_jpc = app.add_subcommand("jpc-check", "density identity residuals");
    auto* cmd_gamma = app.add_subcommand("gamma-check", "radial integral bounds");
    auto* cmd_bern = app.add_subcommand("bernstein-check", "derivative bound study");
    auto* cmd_kh = app.add_subcommand("kh-demo", "circle-ensemble demonstration");
    auto* cmd_eqdist = app.add_subcommand("eqdist", "convergence study");

    std::string measure_path;
    cmd_rate->add_option("--measure", measure_path, "measure file (JSON)")->required();

    int n_pairs = 100;
    cmd_jpc->add_option("--n-pairs", n_pairs, "number of configuration pairs");

    int gamma_k = 0;
    std::vector<double> gamma_c;
    int gamma_nmax = 0;
    cmd_gamma->add_option("--k", gamma_k, "top power (defaults to the config potential)");
    cmd_gamma->add_option("--c", gamma_c, "lower coefficients c_1..c_{k-1}");
    cmd_gamma->add_option("--n-max", gamma_nmax, "largest degree");

    CLI11_PARSE(app, argc, argv);

    auto seed_ptr = seed_given ? &seed : nullptr;
    return with_config(config_path, seed_ptr, &out_dir, threads, [&](RunConfig& cfg) {
        if (cmd_sample->parsed()) {
            for (int degree : cfg.n_list) {
                WeightedGeometry geom = make_geometry(cfg.geometry, degree,
                                                      cfg.potential.k,
                                                      cfg.equilibrium.grid_size);
                ChainDiagnostics diag;
                auto samples = stage_samples(cfg, degree, geom, &diag);
                std::printf("N=%d: %zu samples (acceptance %.3f, rhat %.4f)\n", degree,
                            samples.size(), diag.acceptance_rate, diag.rhat_max);
                if (!diag.converged)
                    std::printf("warning: %s\n", diag.warning.c_str());
            }
            return 0;
        }
        if (cmd_zeros->parsed()) {
            for (int degree : cfg.n_list) {
                WeightedGeometry geom = make_geometry(cfg.geometry, degree,
                                                      cfg.potential.k,
                                                      cfg.equilibrium.grid_size);
                auto samples = stage_samples(cfg, degree, geom, nullptr);
                auto zeros = stage_zeros(cfg, degree, samples);
                std::printf("N=%d: zeros of %zu samples written\n", degree, zeros.size());
            }
            return 0;
        }
        if (cmd_eq->parsed()) {
            Report r = run_equilibrium_experiment(cfg);
            print_report(r);
            return r.all_passed() ? 0 : 1;
        }
        if (cmd_rate->parsed()) {
            RateValue rv = run_rate(cfg, measure_path);
            std::printf("energy %.12g\nsup_potential %.12g\neh %.12g\ntotal %.12g\n",
                        rv.energy, rv.sup_potential, rv.eh_constant, rv.total);
            return 0;
        }
        if (cmd_jpc->parsed()) {
            Report r = run_jpc_check(cfg, n_pairs);
            print_report(r);
            return r.all_passed() ? 0 : 1;
        }
        if (cmd_gamma->parsed()) {
            const int k = gamma_k > 0 ? gamma_k : cfg.potential.k;
            std::vector<double> c = gamma_c;
            if (c.empty() && k == cfg.potential.k)
                c.assign(cfg.potential.c.begin(), cfg.potential.c.end() - 1);
            if (static_cast<int>(c.size()) != k - 1) {
                std::fprintf(stderr, "configuration error: need k-1 coefficients\n");
                return 2;
            }
            const int n_max = gamma_nmax > 0 ? gamma_nmax : cfg.n_list.back();
            Report r = run_gamma_check(cfg, k, c, n_max);
            print_report(r);
            return r.all_passed() ? 0 : 1;
        }
        if (cmd_bern->parsed()) {
            Report r = run_bernstein_check(cfg);
            print_report(r);
            return r.all_passed() ? 0 : 1;
        }
        if (cmd_kh->parsed()) {
            Report r = run_kh_demo(cfg);
            print_report(r);
            return r.all_passed() ? 0 : 1;
        }
        if (cmd_eqdist->parsed()) {
            EqdistResult r = run_eqdist(cfg);
            for (const auto& row : r.rows)
                std::printf("N=%d  W1=%.6g  se=%.2g  rhat=%.4f\n", row.n, row.w1, row.se,
                            row.rhat);
            std::printf("strictly decreasing: %s\n",
                        r.strictly_decreasing ? "yes" : "no");
            return r.sampler_ok ? 0 : 1;
        }
        return 2;
    });
}
