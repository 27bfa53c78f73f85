#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "pphi/ensemble.hpp"
#include "pphi/geometry.hpp"
#include "pphi/measures.hpp"
#include "pphi/sampler.hpp"

namespace pphi {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometrySpec {
    WeightKind weight = WeightKind::FlatOnDisk;
    std::vector<double> radial_coeffs;

    enum class NuKind { Circle, Curvature, SphereGrid };
    NuKind nu_kind = NuKind::Circle;
    int nu_n = 256;     // circle / curvature budget
    int nu_nt = 0, nu_np = 0; // sphere grid

    enum class SupportKind { Full, Circle, Disk };
    SupportKind support = SupportKind::Circle;
    double disk_radius = 1.0;
};

enum class ExperimentKind {
    KhDemo,
    Eqdist,
    JpcCheck,
    GammaCheck,
    BernsteinCheck,
    Equilibrium,
};

struct RunConfig {
    GeometrySpec geometry;
    PotentialSpec potential{1, {1.0}, false};
    std::vector<int> n_list = {50, 100, 200, 400};
    int samples_per_n = 200;
    ChainConfig chain;
    ExperimentKind experiment = ExperimentKind::Eqdist;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    EquilibriumConfig equilibrium;
    int threads = 0; // 0 = auto

    void validate() const;
};

GeometrySpec geometry_spec_from_json(const nlohmann::json& j);
nlohmann::json geometry_spec_to_json(const GeometrySpec& g);

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

// Geometry realized for a given polynomial degree and potential degree. The
// nu rule is upsized so that |s|^{2k}-type integrands are integrated
// exactly: circle rules get at least 2kN+2 nodes, curvature rules at least
// kN+6 radial by 2kN+4 angular nodes.
WeightedGeometry make_geometry(const GeometrySpec& spec, int degree, int k,
                               int support_grid_size);

// FNV-1a over the canonical serialization; stable run identifier.
std::uint64_t config_hash(const nlohmann::json& j);
std::string hash_hex(std::uint64_t h);

} // namespace pphi
