#pragma once

#include "geoprint/collision.hpp"
#include "geoprint/safe_box.hpp"
#include "geoprint/sequencing.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace geoprint {

/// Sub-graph with alternate boundary chains between degree-3 vertices removed.
struct TrimmedGraph {
    std::vector<int> edges;    ///< kept parent-graph edge ids, ascending
    std::vector<int> removed;  ///< removed boundary edge ids, ascending
};

/// Removes, on every boundary loop, the chain between v_k and v_{k+1} for k = 2, 4, ...
/// Loops are walked in their outward orientation starting at the lexicographically smallest
/// degree-3 vertex, so stacked layers of a prismatic part trim alike.
TrimmedGraph trim_to_eulerian(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg);

/// Closed walk: vertices.size() == edges.size() + 1 and vertices.front() == vertices.back().
struct Tour {
    std::vector<int> vertices;
    std::vector<int> edges;
};

/// One closed walk per connected component of `edges`, covering each edge once and turning
/// (alpha <-> beta) at every degree-4 vertex. Components are visited nearest-first from `from`;
/// each starts at its degree-2 vertex nearest the previous end point.
std::vector<Tour> euler_tour(const LatticeGraph& g, const std::vector<int>& edges, const Vec3& from);

struct PerimeterPoint {
    Vec3 position;
    int host_tet = -1;
};

/// Closed polyline inside one boundary loop (first point not repeated).
struct Perimeter {
    std::vector<PerimeterPoint> points;
    std::vector<int> teeth;  ///< tooth count of every removed span along this loop
    [[nodiscard]] double length() const;
};

/// Loops offset inward by `w` in the local tangent plane; removed spans of length s get
/// ceil(s / (2 l)) triangular teeth of depth `l` pointing into the layer.
std::vector<Perimeter> support_perimeter(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg,
                                         const TrimmedGraph& trimmed, double w, double l);

/// Distance from a point to the material deposited by the previous layer, clamped to lambda * phi.
/// Without a previous layer the distance to the base plane z = z_base is used.
class LayerThickness {
public:
    LayerThickness(std::vector<std::pair<Vec3, Vec3>> prev_segments, double phi, double lambda, double z_base);
    [[nodiscard]] double at(const Vec3& p) const;
    [[nodiscard]] double limit() const { return limit_; }

private:
    std::vector<std::pair<Vec3, Vec3>> segs_;
    Bvh bvh_;
    double limit_;
    double z_base_;
};

/// Per-vertex thickness of a sub-graph against the previous layer's edges (no perimeters).
std::vector<double> layer_thickness(const LatticeGraph& g, const SubGraph& sg, const LatticeGraph* prev,
                                    double lambda, double z_base);

/// Filament feed that conserves mass: mu * w * h * f_p / (pi * r_m^2).
double filament_feed(double h, double w, double f_p, double mu, double r_m);

struct PlanParams {
    double w = 0.8;
    double lambda = 1.5;
    double mu = 0.95;
    double r_m = 0.875;
    double f_p = 10.0;
    double tooth = 1.6;
    double margin = 55.0;        ///< safe box margin
    double travel_speed = 50.0;  ///< mm/s, time estimate only
};

struct Waypoint {
    Vec3 position;
    Vec3 orientation;
    double h = 0.0;
    double w = 0.0;
    double f_p = 0.0;
    double f_m = 0.0;
    bool extrude = false;  ///< the segment arriving at this waypoint deposits material
    int layer = 0;
    int subgraph = -1;  ///< skeleton tree node id, -1 for air-move waypoints
};

struct ToolPath {
    std::vector<Waypoint> waypoints;
    int retractions = 0;

    [[nodiscard]] double extrusion_length() const;
    [[nodiscard]] double travel_length() const;
    [[nodiscard]] int layer_count() const;
};

/// Per-sub-graph artifacts kept for diagnostics and tests.
struct SubgraphPlan {
    TrimmedGraph trimmed;
    std::vector<Perimeter> perimeters;
};

/// Perimeters then Euler tours of every sub-graph in sequence order, with safe-box air moves at retractions.
ToolPath plan_part(const TetMesh& mesh, const FieldSet& fields, const std::vector<LatticeGraph>& layers,
                   const SkeletonTree& tree, const PrintSequence& seq, const PlanParams& params,
                   std::vector<SubgraphPlan>* detail = nullptr);

struct PlanSummary {
    double extrusion_length = 0.0;
    double travel_length = 0.0;
    double time_s = 0.0;
    int layers = 0;
    int retractions = 0;
    size_t waypoints = 0;
};
PlanSummary summarize(const ToolPath& path, const PlanParams& params);

/// JSON Lines, one waypoint per line; coordinates to 6 decimals, other reals round-trip exact.
void write_toolpath(const ToolPath& path, const std::filesystem::path& file);
ToolPath read_toolpath(const std::filesystem::path& file);
void write_toolpath_obj(const ToolPath& path, const std::filesystem::path& file);

}  // namespace geoprint
