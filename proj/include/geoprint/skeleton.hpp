#pragma once

#include "geoprint/slicer.hpp"

#include <filesystem>
#include <optional>

namespace geoprint {

/// One connected component G_{i,j} of a layer graph.
struct SubGraph {
    int layer = 0;       ///< 1-based layer index (LatticeGraph::layer)
    int index = 0;       ///< 1-based component index j within the layer
    int graph = -1;      ///< position of the parent graph in the layer list
    double iso = 0.0;
    std::vector<int> vertices;  ///< parent-graph vertex ids, ascending
    std::vector<int> edges;     ///< parent-graph edge ids, ascending
    Vec3 centroid = Vec3::Zero();
    Aabb bounds;
    /// Closed boundary cycles as parent-graph vertex ids.
    std::vector<std::vector<int>> loops;
};

/// DFS components of a layer, ordered by their lexicographically smallest vertex position.
std::vector<SubGraph> connected_components(const LatticeGraph& g, int graph_index = -1);

/// Closed boundary cycles of a component, each starting at its smallest vertex id.
std::vector<std::vector<int>> boundary_loops(const LatticeGraph& g, const SubGraph& sg);

/// Steepest ascent/descent of a scalar field over the boundary surface.
class SurfaceTracer {
public:
    SurfaceTracer(const TetMesh& mesh, SurfaceMesh surface, const ScalarField& field);

    struct Hit {
        int tri;
        Vec3 point;
        int steps;
    };
    /// Follows the surface gradient (ascending or descending) from `start` inside triangle `tri`
    /// until the field reaches `target`. Returns nothing when the trace stalls at a critical
    /// point or exceeds the step guard.
    [[nodiscard]] std::optional<Hit> trace(int tri, const Vec3& start, double target, bool ascend,
                                           int max_steps = 100000) const;
    /// Surface triangle built on a boundary face of the tet mesh, or -1.
    [[nodiscard]] int tri_of_face(int face) const;
    [[nodiscard]] const SurfaceMesh& surface() const { return surface_; }
    /// In-plane gradient of the field on a surface triangle.
    [[nodiscard]] Vec3 gradient(int tri) const;

private:
    [[nodiscard]] Vec3 bary_gradient(int tri, int corner) const;
    [[nodiscard]] double value(int tri, const Vec3& p) const;

    const TetMesh* mesh_;
    SurfaceMesh surface_;
    const ScalarField* field_;
    std::vector<int> face_tri_;
    std::vector<std::vector<int>> vertex_tris_;
};

/// Evidence gathered for one lower/upper component pair.
struct Adjacency {
    bool ascent = false;   ///< a steepest-ascent trace from the lower component lands on the upper one
    bool descent = false;  ///< a steepest-descent trace from the upper component lands on the lower one
    bool band = false;     ///< both are joined through tets whose gamma range meets the slab between the layers
    [[nodiscard]] bool adjacent() const { return ascent == descent ? ascent : band; }
};

/// All pairwise adjacency evidence between the components of two consecutive layers,
/// indexed [lower component][upper component].
std::vector<std::vector<Adjacency>> layer_adjacency(const TetMesh& mesh, const ScalarField& gamma,
                                                    const SurfaceTracer& tracer, const LatticeGraph& lower,
                                                    const std::vector<SubGraph>& lower_parts,
                                                    const LatticeGraph& upper,
                                                    const std::vector<SubGraph>& upper_parts);

struct SkeletonTree {
    std::vector<SubGraph> nodes;
    std::vector<std::vector<int>> layer_nodes;  ///< node ids per entry of the layer list
    std::vector<std::vector<int>> upper, lower;
    std::vector<std::pair<int, int>> edges;     ///< (lower node, upper node)

    [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
    [[nodiscard]] std::vector<int> roots() const;
    /// Nodes with more than one upper node.
    [[nodiscard]] std::vector<int> bifurcations() const;
    /// Node id of G_{layer,index}, both 1-based, or -1.
    [[nodiscard]] int find(int layer, int index) const;
};

/// Builds the tree over all layers. Throws ValidationError when a node above the first layer has
/// no lower node.
SkeletonTree build_skeleton_tree(const TetMesh& mesh, const ScalarField& gamma,
                                 const std::vector<LatticeGraph>& layers);

void write_dot(const SkeletonTree& tree, const std::filesystem::path& path);
std::string to_dot(const SkeletonTree& tree);

}  // namespace geoprint
