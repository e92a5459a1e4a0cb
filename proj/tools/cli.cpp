#include "cli.hpp"

#include "geoprint/config.hpp"
#include "geoprint/errors.hpp"
#include "geoprint/gdf.hpp"
#include "geoprint/parallel.hpp"
#include "geoprint/pathplan.hpp"
#include "geoprint/sequencing.hpp"
#include "geoprint/skeleton.hpp"
#include "geoprint/slicer.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

namespace geoprint::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Stopwatch {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Overrides {
    std::string config, mesh, format, strategy, out;
    std::optional<double> gamma_step, alpha_step, beta_step, nozzle_angle, nozzle_length;
    std::optional<unsigned> threads;
};

PlanConfig resolve(const Overrides& o) {
    PlanConfig c = o.config.empty() ? PlanConfig{} : load_config(o.config);
    if (!o.mesh.empty()) c.mesh = o.mesh;
    if (!o.format.empty()) c.format = o.format;
    if (!o.strategy.empty()) c.strategy = o.strategy;
    if (!o.out.empty()) c.out = o.out;
    if (o.gamma_step) c.gamma_step = *o.gamma_step, c.gamma_levels.clear();
    if (o.alpha_step) c.alpha_step = *o.alpha_step, c.alpha_levels.clear();
    if (o.beta_step) c.beta_step = *o.beta_step, c.beta_levels.clear();
    if (o.nozzle_angle) c.nozzle_angle = *o.nozzle_angle;
    if (o.nozzle_length) c.nozzle_length = *o.nozzle_length;
    if (o.threads) c.threads = *o.threads;
    c.validate();
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
}

void write_field(const ScalarField& v, const fs::path& path) {
    std::string s;
    s.reserve(static_cast<size_t>(v.size()) * 24);
    for (Eigen::Index i = 0; i < v.size(); ++i) s += fmt::format("{:.17g}\n", v[i]);
    write_text(path, s);
}

TetMesh read_mesh(const PlanConfig& c) {
    if (c.mesh.empty()) throw ValidationError("no mesh given (use --mesh or the \"mesh\" config key)");
    return load_mesh(c.mesh, c.mesh_format());
}

BaseRegion base_of(const PlanConfig& c, const TetMesh& mesh) {
    return c.base_mode == "explicit" ? select_base_explicit(mesh, c.base_vertices)
                                     : select_base_threshold(mesh, c.base_eps);
}

IsoPlan iso_plan(const PlanConfig& c, const FieldSet& f) {
    bool explicit_lists = !c.gamma_levels.empty() || !c.alpha_levels.empty() || !c.beta_levels.empty();
    if (!explicit_lists) return plan_isovalues(f, c.gamma_step, c.alpha_step, c.beta_step);
    auto uniform = [](const std::vector<double>& given, double step, const ScalarField& field) {
        if (!given.empty()) return given;
        std::vector<double> out;
        double mx = field.size() ? field.maxCoeff() : 0.0;
        for (int k = 1; k * step < mx; ++k) out.push_back(k * step);
        return out;
    };
    return plan_isovalues(f, uniform(c.gamma_levels, c.gamma_step, f.gamma),
                          uniform(c.alpha_levels, c.alpha_step, f.alpha), uniform(c.beta_levels, c.beta_step, f.beta));
}

ScalarField read_field(const fs::path& path, int expected) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            size_t used = 0;
            v.push_back(std::stod(line, &used));
            if (used != line.size()) throw std::invalid_argument(line);
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(v.size() + 1) + ": not a number");
        }
    }
    if (static_cast<int>(v.size()) != expected)
        throw ParseError(path.string() + ": " + std::to_string(v.size()) + " values for " + std::to_string(expected) +
                         " vertices");
    return Eigen::Map<ScalarField>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::optional<json> read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

/// Everything upstream of a command. Stage outputs found in the output directory are reused when
/// their stamp matches the current mesh and parameters.
struct Pipeline {
    PlanConfig cfg;
    TetMesh mesh;
    GdfResult gdf;
    FieldSet fields;
    IsoPlan plan;
    std::vector<LatticeGraph> layers;
    SkeletonTree tree;
    std::vector<std::vector<int>> pcgs;
    std::map<std::string, double> runtime;
    Stopwatch clock;
    bool fields_loaded = false;

    explicit Pipeline(PlanConfig c) : cfg(std::move(c)) {
        set_thread_count(cfg.threads);
        mesh = read_mesh(cfg);
        runtime["load"] = clock.lap();
        spdlog::info("mesh {}: {} vertices, {} tets", cfg.mesh.string(), mesh.num_vertices(), mesh.num_tets());
    }

    [[nodiscard]] json fields_stamp() const {
        return {{"mesh", fs::absolute(cfg.mesh).lexically_normal().string()},
                {"vertices", mesh.num_vertices()},
                {"tets", mesh.num_tets()},
                {"r", {cfg.r.x(), cfg.r.y(), cfg.r.z()}},
                {"base", {cfg.base_mode, cfg.base_eps, cfg.base_vertices}},
                {"solver_tol", cfg.solver_tol}};
    }

    [[nodiscard]] json layers_stamp() const {
        return {{"fields", fields_stamp()},
                {"steps", {cfg.gamma_step, cfg.alpha_step, cfg.beta_step}},
                {"levels", {cfg.gamma_levels, cfg.alpha_levels, cfg.beta_levels}}};
    }

    bool load_fields() {
        auto rep = read_json_file(cfg.out / "gdf_report.json");
        if (!rep || !rep->contains("stamp") || (*rep)["stamp"] != fields_stamp()) return false;
        const int n = mesh.num_vertices();
        fields.gamma = read_field(cfg.out / "gamma.txt", n);
        fields.alpha = read_field(cfg.out / "alpha.txt", n);
        fields.beta = read_field(cfg.out / "beta.txt", n);
        fields.frames = build_frames(tet_gradient(mesh, fields.gamma), cfg.r.normalized());
        spdlog::info("reusing fields from {}", cfg.out.string());
        return true;
    }

    bool load_layers() {
        auto man = read_json_file(cfg.out / "layers" / "manifest.json");
        if (!man || !man->contains("stamp") || (*man)["stamp"] != layers_stamp()) return false;
        layers.clear();
        for (const auto& f : (*man)["files"]) layers.push_back(read_layer_json(cfg.out / "layers" / f.get<std::string>()));
        spdlog::info("reusing {} layers from {}", layers.size(), cfg.out.string());
        return true;
    }

    void run_gdf(bool reuse) {
        fields_loaded = reuse && load_fields();
        if (!fields_loaded) {
            gdf = compute_gdfs(mesh, base_of(cfg, mesh), GdfOptions{cfg.r.normalized(), 0.0, cfg.solver_tol});
            fields = FieldSet{gdf.gamma, gdf.alpha, gdf.beta, gdf.frames};
        }
        runtime["gdf"] = clock.lap();
    }

    void run_slice(bool reuse) {
        run_gdf(true);
        if (!(reuse && load_layers())) {
            plan = iso_plan(cfg, fields);
            layers = slice_all(mesh, fields, plan);
        }
        runtime["slice"] = clock.lap();
        spdlog::info("{} layers", layers.size());
    }

    void run_skeleton() {
        run_slice(true);
        tree = build_skeleton_tree(mesh, fields.gamma, layers);
        runtime["skeleton"] = clock.lap();
        pcgs = compute_pcgs(mesh, fields.gamma, layers, tree, cfg.cone());
        runtime["pcg"] = clock.lap();
    }
};

json frame_report(const Pipeline& p) {
    auto d = frame_diagnostics(p.fields.frames);
    auto b = p.mesh.bounds();
    auto solve = [](const SolveReport& r) {
        return json{{"iterations", r.iterations}, {"residual", r.residual}, {"seconds", r.seconds}};
    };
    return json{{"max_dot", d.max_dot},
                {"max_norm_error", d.max_norm_error},
                {"max_handedness_error", d.max_handedness_error},
                {"max_gamma", p.fields.gamma.maxCoeff()},
                {"max_alpha", p.fields.alpha.maxCoeff()},
                {"max_beta", p.fields.beta.maxCoeff()},
                {"part_height", b.hi.z() - b.lo.z()},
                {"solves",
                 {{"heat", solve(p.gdf.heat_report)},
                  {"gamma", solve(p.gdf.gamma_report)},
                  {"alpha", solve(p.gdf.alpha_report)},
                  {"beta", solve(p.gdf.beta_report)}}}};
}

/// Fixed-width bins over [lo, hi); values outside land in the end bins.
struct Histogram {
    double lo, width;
    std::vector<long> counts;
    Histogram(double lo_, double hi, double w)
        : lo(lo_), width(w), counts(static_cast<size_t>(std::ceil((hi - lo_) / w)), 0) {}
    void add(double v) {
        auto k = static_cast<long>(std::floor((v - lo) / width));
        k = std::clamp<long>(k, 0, static_cast<long>(counts.size()) - 1);
        counts[static_cast<size_t>(k)]++;
    }
    [[nodiscard]] json to_json() const {
        json bins = json::array();
        for (size_t k = 0; k < counts.size(); ++k)
            bins.push_back({{"from", lo + k * width}, {"to", lo + (k + 1) * width}, {"count", counts[k]}});
        return bins;
    }
};

/// Lateral faces: outward normal more than 30 degrees away from both the up and the down axis.
json overhang_report(const TetMesh& mesh, const FrameField& frames) {
    auto surface = extract_boundary(mesh);
    auto curved = overhang_angles(surface, frames);
    auto fixed = overhang_angles(surface, Vec3(0, 0, 1));
    const double lateral_cos = std::cos(30.0 * std::numbers::pi / 180.0);
    auto summarize_mode = [&](const std::vector<double>& theta) {
        Histogram h(0.0, 180.0, 10.0);
        double max_dev = 0.0, area = 0.0, over = 0.0;
        int lateral = 0;
        for (int t = 0; t < surface.size(); ++t) {
            h.add(theta[t]);
            if (std::abs(surface.normal[t].z()) >= lateral_cos) continue;
            ++lateral;
            max_dev = std::max(max_dev, std::abs(theta[t] - 90.0));
            area += surface.area[t];
            if (theta[t] > 135.0) over += surface.area[t];
        }
        return json{{"histogram", h.to_json()},
                    {"lateral_faces", lateral},
                    {"lateral_max_deviation_deg", max_dev},
                    {"lateral_area_beyond_45deg", area > 0 ? over / area : 0.0}};
    };
    return json{{"curved", summarize_mode(curved)}, {"fixed", summarize_mode(fixed)}};
}

std::optional<PrintSequence> run_strategy(const std::string& name, const Pipeline& p, std::string* error) {
    try {
        if (name == "lpt") return lpt(p.tree);
        if (name == "dpt") return dpt(p.tree);
        return greedy_sequence(p.tree, p.pcgs);
    } catch (const DeadlockError& e) {
        *error = e.what();
        return std::nullopt;
    }
}

fs::path layer_file(const fs::path& dir, int layer) { return dir / fmt::format("layer_{:04d}.json", layer); }

int cmd_gdf(const PlanConfig& cfg, std::ostream& out) {
    Pipeline p(cfg);
    p.run_gdf(false);
    write_field(p.fields.gamma, cfg.out / "gamma.txt");
    write_field(p.fields.alpha, cfg.out / "alpha.txt");
    write_field(p.fields.beta, cfg.out / "beta.txt");
    auto report = frame_report(p);
    report["runtime_s"] = p.runtime;
    report["stamp"] = p.fields_stamp();
    write_text(cfg.out / "gdf_report.json", report.dump(2) + "\n");
    out << fmt::format("max |dot| {:.3e}  max norm error {:.3e}  max gamma {:.4f}  part height {:.4f}\n",
                       report["max_dot"].get<double>(), report["max_norm_error"].get<double>(),
                       report["max_gamma"].get<double>(), report["part_height"].get<double>());
    return Ok;
}

int cmd_slice(const PlanConfig& cfg, std::ostream& out) {
    Pipeline p(cfg);
    p.run_slice(false);
    const fs::path dir = cfg.out / "layers";
    fs::create_directories(dir);
    json files = json::array();
    for (const auto& g : p.layers) {
        write_layer_json(g, layer_file(dir, g.layer));
        files.push_back(layer_file(dir, g.layer).filename().string());
    }
    write_text(dir / "manifest.json", json{{"stamp", p.layers_stamp()}, {"files", files}}.dump(2) + "\n");
    write_layers_obj(p.layers, cfg.out / "layers.obj");
    auto oh = overhang_report(p.mesh, p.fields.frames);
    write_text(cfg.out / "overhang.json", oh.dump(2) + "\n");
    size_t v = 0, e = 0;
    for (const auto& g : p.layers) v += g.vertices.size(), e += g.edges.size();
    out << fmt::format("{} layers, {} lattice vertices, {} edges\n", p.layers.size(), v, e);
    out << fmt::format("lateral overhang deviation: curved {:.2f} deg, fixed {:.2f} deg\n",
                       oh["curved"]["lateral_max_deviation_deg"].get<double>(),
                       oh["fixed"]["lateral_max_deviation_deg"].get<double>());
    return Ok;
}

int cmd_sequence(const PlanConfig& cfg, std::ostream& out, std::ostream& err) {
    Pipeline p(cfg);
    p.run_skeleton();
    fs::create_directories(cfg.out);
    write_dot(p.tree, cfg.out / "tree.dot");
    json pj = json::array();
    for (const auto& l : p.pcgs) pj.push_back(l);
    write_text(cfg.out / "pcgs.json", pj.dump() + "\n");

    auto anchors = node_anchors(p.tree, p.layers);
    std::vector<StrategyRow> rows;
    std::optional<PrintSequence> chosen;
    std::string chosen_error;
    for (std::string name : {"lpt", "dpt", "greedy"}) {
        Stopwatch sw;
        std::string error;
        auto seq = run_strategy(name, p, &error);
        StrategyRow row{name, {}, 0.0, error};
        if (seq) {
            row.report = validate_sequence(*seq, p.tree, anchors, p.pcgs, AirMoveOptions{cfg.nozzle_length + 5.0});
            write_sequence(*seq, p.tree, cfg.out / ("sequence_" + name + ".json"));
        }
        row.runtime_s = sw.lap();
        if (name == cfg.strategy) {
            chosen = seq;
            chosen_error = error;
        }
        rows.push_back(std::move(row));
    }
    auto table = comparison_table(rows);
    write_text(cfg.out / "sequence_table.txt", table);
    out << table;
    if (!chosen) {
        err << "strategy " << cfg.strategy << " failed: " << chosen_error << "\n";
        return Invalid;
    }
    write_sequence(*chosen, p.tree, cfg.out / "sequence.json");
    return Ok;
}

int cmd_plan(const PlanConfig& cfg, std::ostream& out, std::ostream& err) {
    Pipeline p(cfg);
    p.run_skeleton();
    std::string error;
    auto seq = run_strategy(cfg.strategy, p, &error);
    if (!seq) {
        err << "strategy " << cfg.strategy << " failed: " << error << "\n";
        return Invalid;
    }
    auto params = cfg.plan_params();
    auto report = validate_sequence(*seq, p.tree, node_anchors(p.tree, p.layers), p.pcgs, {params.margin});
    if (!report.valid) {
        err << "sequence violates the lower-layer rule\n";
        return Invalid;
    }
    if (!report.collision_free) spdlog::warn("sequence {} has nozzle collisions", seq->strategy);
    p.runtime["sequence"] = p.clock.lap();
    auto path = plan_part(p.mesh, p.fields, p.layers, p.tree, *seq, params);
    p.runtime["plan"] = p.clock.lap();
    fs::create_directories(cfg.out);
    write_toolpath(path, cfg.out / "path.jsonl");
    write_sequence(*seq, p.tree, cfg.out / "sequence.json");

    auto s = summarize(path, params);
    double lattice = 0.0;
    for (const auto& g : p.layers)
        for (const auto& e : g.edges) lattice += (g.vertices[e.a].position - g.vertices[e.b].position).norm();
    json summary{{"strategy", seq->strategy},
                 {"layers", s.layers},
                 {"nodes", p.tree.size()},
                 {"waypoints", s.waypoints},
                 {"retractions", s.retractions},
                 {"lattice_length_mm", lattice},
                 {"extrusion_length_mm", s.extrusion_length},
                 {"travel_length_mm", s.travel_length},
                 {"estimated_time_s", s.time_s},
                 {"collision_free", report.collision_free},
                 {"runtime_s", p.runtime}};
    write_text(cfg.out / "summary.json", summary.dump(2) + "\n");
    out << fmt::format("{} layers, {} sub-graphs, {} retractions, extrusion {:.1f} mm, travel {:.1f} mm\n", s.layers,
                       p.tree.size(), s.retractions, s.extrusion_length, s.travel_length);
    return Ok;
}

/// Reads an existing path file; needs only the config for the nominal layer spacing and feed constants.
int cmd_stats(const PlanConfig& cfg, const fs::path& path_file, std::ostream& out, std::ostream& err) {
    auto path = read_toolpath(path_file);
    auto phi_of = [&](int layer) {
        if (cfg.gamma_levels.empty()) return cfg.gamma_step;
        auto k = static_cast<size_t>(std::clamp(layer, 1, static_cast<int>(cfg.gamma_levels.size())) - 1);
        return k == 0 ? cfg.gamma_levels[0] : cfg.gamma_levels[k] - cfg.gamma_levels[k - 1];
    };

    std::map<int, std::vector<double>> dev;
    double worst_feed = 0.0;
    std::vector<size_t> flagged;
    json retractions = json::array();
    for (size_t i = 0; i < path.waypoints.size(); ++i) {
        const auto& w = path.waypoints[i];
        if (w.subgraph < 0) {
            if (std::abs(w.f_m) > 0) flagged.push_back(i + 1);
            if (i > 0 && path.waypoints[i - 1].subgraph >= 0)
                retractions.push_back({{"waypoint", i}, {"from_node", path.waypoints[i - 1].subgraph}});
            continue;
        }
        if (!retractions.empty() && !retractions.back().contains("to_node") && i > 0 &&
            path.waypoints[i - 1].subgraph < 0)
            retractions.back()["to_node"] = w.subgraph;
        if (!w.extrude) {
            if (std::abs(w.f_m) > 0) flagged.push_back(i + 1);
            continue;
        }
        double phi = phi_of(w.layer);
        dev[w.layer].push_back(100.0 * (w.h - phi) / phi);
        double expect = filament_feed(w.h, w.w, w.f_p, cfg.mu, cfg.r_m);
        double res = expect == 0.0 ? std::abs(w.f_m) : std::abs(w.f_m - expect) / std::abs(expect);
        worst_feed = std::max(worst_feed, res);
        if (res > 1e-9) flagged.push_back(i + 1);
    }

    json layers = json::array();
    double max_pos = 0.0, max_abs = 0.0;
    for (auto& [layer, e] : dev) {
        Histogram h(-100.0, 100.0, 10.0);
        for (double v : e) h.add(v);
        std::sort(e.begin(), e.end());
        const size_t n = e.size();
        double median = n % 2 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]);
        max_pos = std::max(max_pos, e.back());
        max_abs = std::max({max_abs, e.back(), -e.front()});
        layers.push_back({{"layer", layer},
                          {"waypoints", n},
                          {"min_deviation_pct", e.front()},
                          {"median_deviation_pct", median},
                          {"max_deviation_pct", e.back()},
                          {"histogram", h.to_json()}});
    }
    json stats{{"waypoints", path.waypoints.size()},
               {"layers", layers},
               {"max_positive_deviation_pct", max_pos},
               {"max_abs_deviation_pct", max_abs},
               {"feed_max_relative_residual", worst_feed},
               {"feed_violations", flagged.size()},
               {"flagged_lines", flagged},
               {"retractions", retractions}};
    write_text(cfg.out / "stats.json", stats.dump(2) + "\n");

    out << fmt::format("{} waypoints in {} layers, {} retractions\n", path.waypoints.size(), dev.size(),
                       retractions.size());
    for (const auto& l : layers)
        out << fmt::format("layer {:4d}: thickness deviation min {:6.1f}%  median {:6.1f}%  max {:6.1f}%\n",
                           l["layer"].get<int>(), l["min_deviation_pct"].get<double>(),
                           l["median_deviation_pct"].get<double>(), l["max_deviation_pct"].get<double>());
    out << fmt::format("feed residual: max {:.3e}, {} violations\n", worst_feed, flagged.size());
    if (!flagged.empty()) {
        for (size_t k = 0; k < std::min<size_t>(flagged.size(), 10); ++k)
            err << path_file.string() << ":" << flagged[k] << ": filament feed does not match the deposited volume\n";
        if (flagged.size() > 10) err << "(" << flagged.size() - 10 << " more)\n";
        return Invalid;
    }
    return Ok;
}

int cmd_export(const PlanConfig& cfg, const fs::path& path_file, const std::string& to, std::ostream& out) {
    int written = 0;
    if (!cfg.mesh.empty()) {
        auto mesh = read_mesh(cfg);
        auto fmt_out = parse_mesh_format(to);
        fs::path target = cfg.out / (fmt_out == MeshFormat::Medit ? "mesh.mesh" : "mesh");
        fs::create_directories(cfg.out);
        save_mesh(mesh, target, fmt_out);
        out << "wrote " << target.string() << "\n";
        ++written;
    }
    if (fs::exists(path_file)) {
        write_toolpath_obj(read_toolpath(path_file), cfg.out / "path.obj");
        out << "wrote " << (cfg.out / "path.obj").string() << "\n";
        ++written;
    }
    const fs::path dir = cfg.out / "layers";
    if (fs::is_directory(dir)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::vector<LatticeGraph> layers;
        for (const auto& f : files) layers.push_back(read_layer_json(f));
        write_layers_obj(layers, cfg.out / "layers.obj");
        out << "wrote " << (cfg.out / "layers.obj").string() << "\n";
        ++written;
    }
    if (written == 0) throw IoError("nothing to export: no mesh, no " + path_file.string() + ", no " + dir.string());
    return Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curved-layer lattice toolpath planner"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    std::string path_file, to = "medit", log_level = "warn";
    app.add_option("--config", o.config, "JSON config file");
    app.add_option("--mesh", o.mesh, "tetrahedral mesh (.node/.ele base name or .mesh)");
    app.add_option("--format", o.format, "mesh format: tetgen or medit");
    app.add_option("--gamma-step", o.gamma_step, "layer spacing");
    app.add_option("--alpha-step", o.alpha_step, "lattice spacing along alpha");
    app.add_option("--beta-step", o.beta_step, "lattice spacing along beta");
    app.add_option("--nozzle-angle", o.nozzle_angle, "nozzle cone half-angle in degrees");
    app.add_option("--nozzle-length", o.nozzle_length, "nozzle cone length");
    app.add_option("--strategy", o.strategy, "lpt, dpt or greedy");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--threads", o.threads, "worker threads (0: hardware)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    auto* gdf = app.add_subcommand("gdf", "solve the three distance fields and report frame quality");
    auto* slice = app.add_subcommand("slice", "write curved layer lattices and the overhang histogram");
    auto* sequence = app.add_subcommand("sequence", "compare print orders and write the chosen one");
    auto* plan = app.add_subcommand("plan", "run the full pipeline and write the toolpath");
    auto* stats = app.add_subcommand("stats", "check an existing toolpath");
    auto* exp = app.add_subcommand("export", "write OBJ views and convert the mesh");
    for (auto* sub : {stats, exp}) sub->add_option("--path", path_file, "toolpath file (default <out>/path.jsonl)");
    exp->add_option("--to", to, "mesh format to write: tetgen or medit");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Ok : Invalid;
    }

    spdlog::set_level(spdlog::level::from_str(log_level));
    try {
        PlanConfig cfg = resolve(o);
        fs::path pf = path_file.empty() ? cfg.out / "path.jsonl" : fs::path(path_file);
        if (*gdf) return cmd_gdf(cfg, out);
        if (*slice) return cmd_slice(cfg, out);
        if (*sequence) return cmd_sequence(cfg, out, err);
        if (*plan) return cmd_plan(cfg, out, err);
        if (*stats) return cmd_stats(cfg, pf, out, err);
        return cmd_export(cfg, pf, to, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return Io;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Io;
    } catch (const DeadlockError& e) {
        err << "deadlock: " << e.what() << "\n";
        return Invalid;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return Invalid;
    } catch (const SolverError& e) {
        err << "solver failed: " << e.what() << "\n";
        return Invalid;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return Io;
    }
}

}  // namespace geoprint::cli
