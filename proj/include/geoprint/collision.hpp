#pragma once

#include "geoprint/skeleton.hpp"

#include <filesystem>

namespace geoprint {

/// Bounding cone of the nozzle and toolhead.
struct NozzleCone {
    double angle_deg = 45.0;  ///< half-angle
    double length = 50.0;     ///< clearance height along the mean layer normal
    void validate() const;
};

/// Boundary cycle of a sub-graph, oriented so that tangent x normal points away from the interior.
struct BoundaryLoop {
    std::vector<int> vertices;  ///< parent-graph vertex ids, not repeated at the end
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    double length = 0.0;
};

std::vector<BoundaryLoop> oriented_loops(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg);

/// Closed triangle mesh swept by the cone over one sub-graph.
struct EnvelopeVolume {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    Aabb bounds;
    int generators = 0;
    bool fallback_bottom = false;  ///< bottom cap built by polygon capping instead of the layer patch
    Bvh bvh;

    /// Generalised winding number of p.
    [[nodiscard]] double winding(const Vec3& p) const;
    [[nodiscard]] bool contains(const Vec3& p) const;
    [[nodiscard]] bool segment_hits_surface(const Vec3& p, const Vec3& q) const;
};

struct EnvelopeOptions {
    double max_generator_step_deg = 10.0;
};

/// Ruled surface over every boundary loop, closed at the bottom by the layer's own iso-surface patch.
/// Generators run from the loop to the plane L above the loop centroid along the mean loop normal,
/// where a fan around the lifted centroid closes the top.
EnvelopeVolume sweep_envelope(const TetMesh& mesh, const ScalarField& gamma, const LatticeGraph& g,
                              const SubGraph& sg, const NozzleCone& cone, const EnvelopeOptions& opts = {});

/// Triangulates a closed 3D polygon by ear clipping (shortest new edge first), falling back to a
/// centroid fan. Triangles follow the polygon's vertex order. `index` maps polygon slots to output ids;
/// a fan centre is appended to `vertices`.
void cap_polygon(const std::vector<int>& index, std::vector<Vec3>& vertices, std::vector<std::array<int, 3>>& out);

/// Every undirected edge is used by exactly two triangles, once in each direction.
bool is_watertight(const std::vector<std::array<int, 3>>& triangles);
double signed_volume(const std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& triangles);

/// True when an edge of G_j crosses the envelope surface or G_j lies inside it.
bool collision_check(const EnvelopeVolume& env_i, const LatticeGraph& gj, const SubGraph& sj);

/// PCG list of every tree node: node j is listed under i when it collides with i's envelope.
/// Lists are sorted node ids.
std::vector<std::vector<int>> compute_pcgs(const TetMesh& mesh, const ScalarField& gamma,
                                           const std::vector<LatticeGraph>& layers, const SkeletonTree& tree,
                                           const NozzleCone& cone);

void write_ply(const EnvelopeVolume& env, const std::filesystem::path& path);

}  // namespace geoprint
