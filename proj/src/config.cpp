#include "geoprint/config.hpp"

#include "geoprint/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace geoprint {

using json = nlohmann::json;

namespace {

void require_positive(double v, const char* key) {
    if (!(v > 0)) throw ValidationError(std::string(key) + " must be positive");
}

}  // namespace

void PlanConfig::validate() const {
    if (base_mode != "threshold" && base_mode != "explicit")
        throw ValidationError("base.mode must be \"threshold\" or \"explicit\"");
    if (base_mode == "explicit" && base_vertices.empty()) throw ValidationError("base.vertices is empty");
    if (!(r.norm() > 0)) throw ValidationError("r must be a nonzero vector");
    if (gamma_levels.empty()) require_positive(gamma_step, "gamma_step");
    if (alpha_levels.empty()) require_positive(alpha_step, "alpha_step");
    if (beta_levels.empty()) require_positive(beta_step, "beta_step");
    cone().validate();
    require_positive(w, "w");
    require_positive(mu, "mu");
    if (mu > 1) throw ValidationError("mu must not exceed 1");
    require_positive(r_m, "r_m");
    require_positive(f_p, "f_p");
    require_positive(travel_speed, "travel_speed");
    require_positive(solver_tol, "solver_tol");
    if (tooth) require_positive(*tooth, "tooth");
    if (!(lambda >= 1)) throw ValidationError("lambda must be at least 1");
    if (strategy != "lpt" && strategy != "dpt" && strategy != "greedy")
        throw ValidationError("strategy must be lpt, dpt or greedy");
    if (!format.empty()) parse_mesh_format(format);
}

PlanParams PlanConfig::plan_params() const {
    PlanParams p;
    p.w = w;
    p.lambda = lambda;
    p.mu = mu;
    p.r_m = r_m;
    p.f_p = f_p;
    p.tooth = tooth.value_or(2 * w);
    p.margin = nozzle_length + 5.0;
    p.travel_speed = travel_speed;
    return p;
}

MeshFormat PlanConfig::mesh_format() const {
    return format.empty() ? guess_mesh_format(mesh) : parse_mesh_format(format);
}

PlanConfig parse_config(const std::string& text, const std::string& origin) {
    static const std::set<std::string> known = {
        "mesh",   "format",        "base",         "r",          "gamma_step",   "alpha_step", "beta_step",
        "gamma_levels", "alpha_levels", "beta_levels", "nozzle_angle", "nozzle_length", "w", "lambda",
        "mu",     "r_m",           "f_p",          "tooth",      "travel_speed", "solver_tol", "strategy",
        "out",    "threads"};
    PlanConfig c;
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw ParseError(origin + ": top level must be an object");
        for (const auto& [k, v] : j.items()) {
            if (!known.count(k)) throw ValidationError(origin + ": unknown key \"" + k + "\"");
        }
        if (j.contains("mesh")) c.mesh = j["mesh"].get<std::string>();
        if (j.contains("format")) c.format = j["format"].get<std::string>();
        if (j.contains("base")) {
            const auto& b = j["base"];
            c.base_mode = b.value("mode", c.base_mode);
            c.base_eps = b.value("eps", c.base_eps);
            if (b.contains("vertices")) c.base_vertices = b["vertices"].get<std::vector<int>>();
        }
        if (j.contains("r")) {
            auto r = j["r"].get<std::vector<double>>();
            if (r.size() != 3) throw ValidationError(origin + ": r needs three components");
            c.r = Vec3(r[0], r[1], r[2]);
        }
        c.gamma_step = j.value("gamma_step", c.gamma_step);
        c.alpha_step = j.value("alpha_step", c.alpha_step);
        c.beta_step = j.value("beta_step", c.beta_step);
        if (j.contains("gamma_levels")) c.gamma_levels = j["gamma_levels"].get<std::vector<double>>();
        if (j.contains("alpha_levels")) c.alpha_levels = j["alpha_levels"].get<std::vector<double>>();
        if (j.contains("beta_levels")) c.beta_levels = j["beta_levels"].get<std::vector<double>>();
        c.nozzle_angle = j.value("nozzle_angle", c.nozzle_angle);
        c.nozzle_length = j.value("nozzle_length", c.nozzle_length);
        c.w = j.value("w", c.w);
        c.lambda = j.value("lambda", c.lambda);
        c.mu = j.value("mu", c.mu);
        c.r_m = j.value("r_m", c.r_m);
        c.f_p = j.value("f_p", c.f_p);
        if (j.contains("tooth")) c.tooth = j["tooth"].get<double>();
        c.travel_speed = j.value("travel_speed", c.travel_speed);
        c.solver_tol = j.value("solver_tol", c.solver_tol);
        c.strategy = j.value("strategy", c.strategy);
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return c;
}

PlanConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_json(const PlanConfig& c) {
    json j;
    j["mesh"] = c.mesh.string();
    j["format"] = c.format;
    j["base"] = {{"mode", c.base_mode}, {"eps", c.base_eps}, {"vertices", c.base_vertices}};
    j["r"] = {c.r.x(), c.r.y(), c.r.z()};
    j["gamma_step"] = c.gamma_step;
    j["alpha_step"] = c.alpha_step;
    j["beta_step"] = c.beta_step;
    j["gamma_levels"] = c.gamma_levels;
    j["alpha_levels"] = c.alpha_levels;
    j["beta_levels"] = c.beta_levels;
    j["nozzle_angle"] = c.nozzle_angle;
    j["nozzle_length"] = c.nozzle_length;
    j["w"] = c.w;
    j["lambda"] = c.lambda;
    j["mu"] = c.mu;
    j["r_m"] = c.r_m;
    j["f_p"] = c.f_p;
    j["tooth"] = c.tooth.value_or(2 * c.w);
    j["travel_speed"] = c.travel_speed;
    j["solver_tol"] = c.solver_tol;
    j["strategy"] = c.strategy;
    j["out"] = c.out.string();
    j["threads"] = c.threads;
    return j.dump(2);
}

}  // namespace geoprint
