#pragma once

#include "geoprint/collision.hpp"
#include "geoprint/mesh_io.hpp"
#include "geoprint/pathplan.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace geoprint {

/// Every tunable of the pipeline. Loaded from one JSON document; CLI flags override single keys.
struct PlanConfig {
    std::filesystem::path mesh;
    std::string format;  ///< empty: guess from the extension

    std::string base_mode = "threshold";  ///< "threshold" or "explicit"
    double base_eps = 0.0;                ///< threshold mode; <= 0 picks the default
    std::vector<int> base_vertices;       ///< explicit mode

    Vec3 r = Vec3(1, 0, 0);
    double gamma_step = 0.6;
    double alpha_step = 4.0;
    double beta_step = 4.0;
    std::vector<double> gamma_levels, alpha_levels, beta_levels;  ///< explicit lists win over steps

    double nozzle_angle = 45.0;
    double nozzle_length = 50.0;

    double w = 0.8;
    double lambda = 1.5;
    double mu = 0.95;
    double r_m = 0.875;
    double f_p = 10.0;
    std::optional<double> tooth;  ///< defaults to 2 w
    double travel_speed = 50.0;

    double solver_tol = 1e-9;
    std::string strategy = "greedy";  ///< lpt, dpt or greedy
    std::filesystem::path out = "out";
    unsigned threads = 0;

    /// Throws ValidationError naming the offending key.
    void validate() const;

    [[nodiscard]] NozzleCone cone() const { return {nozzle_angle, nozzle_length}; }
    [[nodiscard]] PlanParams plan_params() const;
    [[nodiscard]] MeshFormat mesh_format() const;
};

/// Unknown keys are rejected so that typos do not silently fall back to defaults.
PlanConfig parse_config(const std::string& json_text, const std::string& origin = "<config>");
PlanConfig load_config(const std::filesystem::path& path);
std::string to_json(const PlanConfig& c);

}  // namespace geoprint
