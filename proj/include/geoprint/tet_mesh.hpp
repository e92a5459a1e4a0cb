#pragma once

#include "geoprint/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace geoprint {

/// Compressed adjacency lists: items of row r are data[offset[r] .. offset[r+1]).
struct Csr {
    std::vector<int> offset{0};
    std::vector<int> data;

    [[nodiscard]] std::span<const int> row(int r) const {
        return {data.data() + offset[r], static_cast<size_t>(offset[r + 1] - offset[r])};
    }
    [[nodiscard]] int rows() const { return static_cast<int>(offset.size()) - 1; }
};

/// Immutable tetrahedral mesh with derived topology and per-tet geometry.
class TetMesh {
public:
    static constexpr double kDegenerateVolume = 1e-12;

    /// Validates, fixes tet orientation and builds adjacency.
    /// Throws ValidationError naming the offending tet, face or vertex.
    static TetMesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_tets() const { return static_cast<int>(tets_.size()); }
    [[nodiscard]] int num_faces() const { return static_cast<int>(faces_.size()); }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] const std::vector<Vec3>& vertices() const { return vertices_; }
    [[nodiscard]] const Vec3& vertex(int v) const { return vertices_[v]; }
    [[nodiscard]] const std::vector<std::array<int, 4>>& tets() const { return tets_; }
    [[nodiscard]] const std::array<int, 4>& tet(int t) const { return tets_[t]; }

    /// Faces are sorted vertex triples. face_tets[f][1] == -1 on the boundary.
    [[nodiscard]] const std::array<int, 3>& face(int f) const { return faces_[f]; }
    [[nodiscard]] const std::array<int, 2>& face_tets(int f) const { return face_tets_[f]; }
    [[nodiscard]] bool face_on_boundary(int f) const { return face_tets_[f][1] < 0; }

    /// Edges are sorted vertex pairs.
    [[nodiscard]] const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    [[nodiscard]] std::span<const int> edge_tets(int e) const { return edge_tets_.row(e); }
    [[nodiscard]] bool edge_on_boundary(int e) const { return edge_boundary_[e]; }

    [[nodiscard]] bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }
    [[nodiscard]] std::span<const int> vertex_tets(int v) const { return vertex_tets_.row(v); }

    /// Face opposite local vertex i of tet t.
    [[nodiscard]] int tet_face(int t, int i) const { return tet_faces_[t][i]; }
    /// The six tet edges in local order (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
    [[nodiscard]] const std::array<int, 6>& tet_edges(int t) const { return tet_edges_[t]; }
    /// The three edges of face f, opposite its vertices 0, 1, 2.
    [[nodiscard]] const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }

    [[nodiscard]] double tet_volume(int t) const { return volumes_[t]; }
    /// Gradient of the linear hat function of local vertex i within tet t.
    [[nodiscard]] const Vec3& basis_gradient(int t, int i) const { return gradients_[t][i]; }
    [[nodiscard]] double total_volume() const;
    [[nodiscard]] Aabb bounds() const;
    [[nodiscard]] double average_edge_length() const;

    [[nodiscard]] std::optional<int> find_edge(int a, int b) const;
    [[nodiscard]] std::optional<int> find_face(int a, int b, int c) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 2>> face_tets_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<std::array<int, 2>> edges_;
    Csr edge_tets_;
    std::vector<char> edge_boundary_;
    std::vector<char> vertex_boundary_;
    Csr vertex_tets_;
    std::vector<std::array<int, 4>> tet_faces_;
    std::vector<std::array<int, 6>> tet_edges_;
    std::vector<double> volumes_;
    std::vector<std::array<Vec3, 4>> gradients_;
};

/// Boundary triangles with outward orientation and back-references.
struct SurfaceMesh {
    std::vector<std::array<int, 3>> tris;   ///< mesh vertex indices, counter-clockwise seen from outside
    std::vector<int> face;                  ///< parent TetMesh face
    std::vector<int> tet;                   ///< the single incident tet
    std::vector<Vec3> normal;               ///< outward unit normal
    std::vector<double> area;
    /// neighbor[t][k]: triangle across the edge opposite corner k.
    std::vector<std::array<int, 3>> neighbor;

    [[nodiscard]] int size() const { return static_cast<int>(tris.size()); }
    [[nodiscard]] double total_area() const;
    /// Volume enclosed by the surface (divergence theorem).
    [[nodiscard]] double enclosed_volume(const TetMesh& mesh) const;
    /// V - E + F over the referenced vertices.
    [[nodiscard]] int euler_characteristic() const;
};

SurfaceMesh extract_boundary(const TetMesh& mesh);

struct BaseRegion {
    std::vector<int> vertices;  ///< sorted, unique
};

/// All vertices with z < z_min + eps. eps <= 0 selects the default 1e-3 of the height.
BaseRegion select_base_threshold(const TetMesh& mesh, double eps = 0.0);
/// Exactly the listed vertices; rejects interior or out-of-range ones.
BaseRegion select_base_explicit(const TetMesh& mesh, std::vector<int> vertices);

}  // namespace geoprint
