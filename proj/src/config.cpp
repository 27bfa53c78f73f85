#include "pphi/config.hpp"

#include <algorithm>
#include <fstream>

namespace pphi {

using nlohmann::json;

void RunConfig::validate() const {
    potential.validate();
    if (n_list.empty()) throw ConfigError("config: N list must be nonempty");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw ConfigError("config: N list must be strictly increasing");
    if (n_list.front() < 1) throw ConfigError("config: degrees must be >= 1");
    if (samples_per_n < 1) throw ConfigError("config: samples_per_n must be >= 1");
    if (geometry.weight == WeightKind::FlatOnDisk &&
        geometry.nu_kind == GeometrySpec::NuKind::Curvature)
        throw ConfigError("config: flat weight has no curvature measure");
    try {
        chain.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

GeometrySpec geometry_spec_from_json(const json& j) {
    GeometrySpec g;
    const auto& w = j.at("weight");
    if (w.is_string()) {
        const std::string s = w.get<std::string>();
        if (s == "fubini_study")
            g.weight = WeightKind::FubiniStudy;
        else if (s == "flat_disk")
            g.weight = WeightKind::FlatOnDisk;
        else
            throw ConfigError("config: unknown weight '" + s + "'");
    } else if (w.is_object() && w.contains("radial")) {
        g.weight = WeightKind::CustomRadial;
        g.radial_coeffs = w.at("radial").get<std::vector<double>>();
    } else {
        throw ConfigError("config: bad weight spec");
    }

    const auto& nu = j.at("nu");
    if (nu.contains("circle")) {
        g.nu_kind = GeometrySpec::NuKind::Circle;
        g.nu_n = nu.at("circle").get<int>();
    } else if (nu.contains("curvature")) {
        g.nu_kind = GeometrySpec::NuKind::Curvature;
        g.nu_n = nu.at("curvature").get<int>();
    } else if (nu.contains("sphere_grid")) {
        g.nu_kind = GeometrySpec::NuKind::SphereGrid;
        auto v = nu.at("sphere_grid").get<std::vector<int>>();
        if (v.size() != 2) throw ConfigError("config: sphere_grid needs [nt, np]");
        g.nu_nt = v[0];
        g.nu_np = v[1];
    } else {
        throw ConfigError("config: bad nu spec");
    }

    const auto& sup = j.at("support");
    if (sup.is_string() && sup.get<std::string>() == "full") {
        g.support = GeometrySpec::SupportKind::Full;
    } else if (sup.is_object() && sup.contains("circle")) {
        g.support = GeometrySpec::SupportKind::Circle;
    } else if (sup.is_object() && sup.contains("disk_radius")) {
        g.support = GeometrySpec::SupportKind::Disk;
        g.disk_radius = sup.at("disk_radius").get<double>();
        if (g.disk_radius <= 0.0) throw ConfigError("config: disk_radius must be > 0");
    } else {
        throw ConfigError("config: bad support spec");
    }
    return g;
}

json geometry_spec_to_json(const GeometrySpec& g) {
    json j;
    switch (g.weight) {
    case WeightKind::FubiniStudy: j["weight"] = "fubini_study"; break;
    case WeightKind::FlatOnDisk: j["weight"] = "flat_disk"; break;
    case WeightKind::CustomRadial: j["weight"] = {{"radial", g.radial_coeffs}}; break;
    }
    switch (g.nu_kind) {
    case GeometrySpec::NuKind::Circle: j["nu"] = {{"circle", g.nu_n}}; break;
    case GeometrySpec::NuKind::Curvature: j["nu"] = {{"curvature", g.nu_n}}; break;
    case GeometrySpec::NuKind::SphereGrid:
        j["nu"] = {{"sphere_grid", {g.nu_nt, g.nu_np}}};
        break;
    }
    switch (g.support) {
    case GeometrySpec::SupportKind::Full: j["support"] = "full"; break;
    case GeometrySpec::SupportKind::Circle: j["support"] = {{"circle", true}}; break;
    case GeometrySpec::SupportKind::Disk:
        j["support"] = {{"disk_radius", g.disk_radius}};
        break;
    }
    return j;
}

namespace {

ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "kh_demo") return ExperimentKind::KhDemo;
    if (s == "eqdist") return ExperimentKind::Eqdist;
    if (s == "jpc_check") return ExperimentKind::JpcCheck;
    if (s == "gamma_check") return ExperimentKind::GammaCheck;
    if (s == "bernstein_check") return ExperimentKind::BernsteinCheck;
    if (s == "equilibrium") return ExperimentKind::Equilibrium;
    throw ConfigError("config: unknown experiment '" + s + "'");
}

std::string experiment_to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::KhDemo: return "kh_demo";
    case ExperimentKind::Eqdist: return "eqdist";
    case ExperimentKind::JpcCheck: return "jpc_check";
    case ExperimentKind::GammaCheck: return "gamma_check";
    case ExperimentKind::BernsteinCheck: return "bernstein_check";
    case ExperimentKind::Equilibrium: return "equilibrium";
    }
    return "eqdist";
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    try {
        cfg.geometry = geometry_spec_from_json(j.at("geometry"));
        const auto& pot = j.at("potential");
        cfg.potential.k = pot.at("k").get<int>();
        cfg.potential.c = pot.at("c").get<std::vector<double>>();
        cfg.potential.include_kinetic = pot.value("kinetic", false);

        cfg.n_list = j.value("n_list", cfg.n_list);
        cfg.samples_per_n = j.value("samples_per_n", cfg.samples_per_n);
        if (j.contains("chain")) {
            const auto& c = j.at("chain");
            cfg.chain.n_steps = c.value("n_steps", cfg.chain.n_steps);
            cfg.chain.burn_in = c.value("burn_in", cfg.chain.burn_in);
            cfg.chain.n_chains = c.value("n_chains", cfg.chain.n_chains);
            cfg.chain.target_accept = c.value("target_accept", cfg.chain.target_accept);
            cfg.chain.thinning = c.value("thinning", cfg.chain.thinning);
        }
        if (j.contains("experiment"))
            cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());
        cfg.out_dir = j.value("out", cfg.out_dir);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.chain.seed = cfg.seed;
        if (j.contains("equilibrium")) {
            const auto& e = j.at("equilibrium");
            cfg.equilibrium.grid_size = e.value("grid_size", cfg.equilibrium.grid_size);
            cfg.equilibrium.max_iters = e.value("max_iters", cfg.equilibrium.max_iters);
            cfg.equilibrium.gap_tol = e.value("gap_tol", cfg.equilibrium.gap_tol);
        }
        cfg.threads = j.value("threads", 0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        cfg.potential.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.validate();
    return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["geometry"] = geometry_spec_to_json(cfg.geometry);
    j["potential"] = {{"k", cfg.potential.k},
                      {"c", cfg.potential.c},
                      {"kinetic", cfg.potential.include_kinetic}};
    j["n_list"] = cfg.n_list;
    j["samples_per_n"] = cfg.samples_per_n;
    j["chain"] = {{"n_steps", cfg.chain.n_steps},
                  {"burn_in", cfg.chain.burn_in},
                  {"n_chains", cfg.chain.n_chains},
                  {"target_accept", cfg.chain.target_accept},
                  {"thinning", cfg.chain.thinning}};
    j["experiment"] = experiment_to_string(cfg.experiment);
    j["out"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["equilibrium"] = {{"grid_size", cfg.equilibrium.grid_size},
                        {"max_iters", cfg.equilibrium.max_iters},
                        {"gap_tol", cfg.equilibrium.gap_tol}};
    return j;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    return run_config_from_json(j);
}

WeightedGeometry make_geometry(const GeometrySpec& spec, int degree, int k,
                               int support_grid_size) {
    Quadrature nu;
    switch (spec.nu_kind) {
    case GeometrySpec::NuKind::Circle:
        nu = circle_rule(std::max(spec.nu_n, 2 * k * degree + 2));
        break;
    case GeometrySpec::NuKind::Curvature: {
        const int n_theta = std::max(2 * k * degree + 4,
                                     static_cast<int>(std::sqrt(2.0 * spec.nu_n)));
        const int n_t = std::max({k * degree + 6, spec.nu_n / n_theta, 8});
        nu = curvature_rule_product(spec.weight, spec.radial_coeffs, n_t, n_theta);
        break;
    }
    case GeometrySpec::NuKind::SphereGrid:
        nu = sphere_grid_rule(std::max(spec.nu_nt, k * degree + 6),
                              std::max(spec.nu_np, 2 * k * degree + 4));
        break;
    }

    Quadrature curvature;
    if (spec.weight == WeightKind::FlatOnDisk) {
        // No curvature form; the slot holds the reference circle rule.
        curvature = circle_rule(std::max(spec.nu_n, 2 * k * degree + 2));
    } else {
        const int n_theta = std::max(2 * k * degree + 4, 64);
        const int n_t = std::max(k * degree + 6, 32);
        curvature = curvature_rule_product(spec.weight, spec.radial_coeffs, n_t, n_theta);
    }

    std::vector<Complex> grid;
    switch (spec.support) {
    case GeometrySpec::SupportKind::Circle:
        grid = circle_grid(support_grid_size);
        break;
    case GeometrySpec::SupportKind::Full: {
        const int n_theta = std::max(8, static_cast<int>(std::lround(
                                            std::sqrt(2.0 * support_grid_size))));
        const int n_t = std::max(4, (support_grid_size + n_theta - 1) / n_theta);
        grid = sphere_grid_points(n_t, n_theta);
        break;
    }
    case GeometrySpec::SupportKind::Disk: {
        // FS-uniform grid truncated to |z| <= r.
        const double t_max =
            spec.disk_radius * spec.disk_radius / (1.0 + spec.disk_radius * spec.disk_radius);
        const int n_theta = std::max(8, static_cast<int>(std::lround(
                                            std::sqrt(2.0 * support_grid_size))));
        const int n_t = std::max(4, (support_grid_size + n_theta - 1) / n_theta);
        for (int i = 0; i < n_t; ++i) {
            const double t = t_max * (i + 0.5) / n_t;
            const double r = std::sqrt(t / (1.0 - t));
            const double off = (i % 2 == 0) ? 0.0 : std::numbers::pi / n_theta;
            for (int j = 0; j < n_theta; ++j) {
                const double th = 2.0 * std::numbers::pi * j / n_theta + off;
                grid.push_back(Complex{r * std::cos(th), r * std::sin(th)});
            }
        }
        break;
    }
    }

    return WeightedGeometry(spec.weight, spec.radial_coeffs, std::move(nu),
                            std::move(curvature), std::move(grid));
}

std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pphi
