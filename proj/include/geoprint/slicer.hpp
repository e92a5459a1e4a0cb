#pragma once

#include "geoprint/gdf.hpp"
#include "geoprint/tet_mesh.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace geoprint {

/// The three distance fields plus the frame field they were built with.
struct FieldSet {
    ScalarField gamma, alpha, beta;
    FrameField frames;
};

struct IsoPlan {
    std::vector<double> gamma, alpha, beta;
    /// gamma[i] - gamma[i-1], with gamma[-1] taken as 0
    std::vector<double> gamma_interval;
};

/// Uniform plan {d, 2d, ...} strictly below each field's maximum.
IsoPlan plan_isovalues(const FieldSet& fields, double d_gamma, double d_alpha, double d_beta);
/// Explicit (possibly non-uniform) lists; values must be increasing and inside (0, max).
IsoPlan plan_isovalues(const FieldSet& fields, std::vector<double> gamma, std::vector<double> alpha,
                       std::vector<double> beta);
/// Nudges `value` by multiples of 1e-7 * interval until no sorted field value lies within 1e-9 * interval.
double perturb_off_values(double value, double interval, const std::vector<double>& sorted_values);

enum class VertexKind { AlphaIsoline, BetaIsoline, Crossing, BoundaryInterp };
enum class EdgeKind { Alpha, Beta, Boundary };

const char* to_string(VertexKind k);
const char* to_string(EdgeKind k);

struct LatticeVertex {
    Vec3 position;
    VertexKind kind;
    int host = -1;       ///< face (isoline vertices), tet (crossings) or mesh edge (boundary-interp)
    int host_tet = -1;   ///< tet whose g_gamma gives the normal
    Vec3 normal;
    double gamma = 0, alpha = 0, beta = 0;
    int alpha_index = -1;  ///< index into the alpha iso list, -1 if not on an alpha isoline
    int beta_index = -1;
    bool on_boundary_face = false;  ///< isoline vertex lying on a boundary face
};

struct LatticeEdge {
    int a, b;
    EdgeKind kind;
    int host_tet;
    int host_face = -1;  ///< boundary face for boundary edges
};

struct LatticeGraph {
    int layer = 0;  ///< 1-based layer index into the gamma plan
    double iso = 0.0;
    double interval = 0.0;
    std::vector<LatticeVertex> vertices;
    std::vector<LatticeEdge> edges;
    /// largest disagreement between the two closed forms of a crossing position
    double max_crossing_discrepancy = 0.0;

    [[nodiscard]] bool empty() const { return vertices.empty(); }
    [[nodiscard]] std::vector<int> degrees() const;
};

/// Point where the gamma iso-surface crosses a face, with interpolated alpha/beta (Eqs 6-9).
/// `field` selects alpha (0) or beta (1); `iso` is the alpha/beta level.
std::optional<LatticeVertex> gen_face_vertex(const TetMesh& mesh, const FieldSet& f, int face, double gamma_iso,
                                             double iso, int field);
inline std::optional<LatticeVertex> gen_gx_vertex(const TetMesh& m, const FieldSet& f, int face, double g, double a) {
    return gen_face_vertex(m, f, face, g, a, 0);
}
inline std::optional<LatticeVertex> gen_gy_vertex(const TetMesh& m, const FieldSet& f, int face, double g, double b) {
    return gen_face_vertex(m, f, face, g, b, 1);
}
/// Boundary-interp vertex on a boundary mesh edge (Eqs 12-13).
std::optional<LatticeVertex> gen_bound_vertex(const TetMesh& mesh, const FieldSet& f, int edge, double gamma_iso);

/// Crossing of an alpha segment (p0,p1 with beta values b0,b1) and a beta segment (q0,q1 with alpha
/// values a0,a1) at levels (alpha_iso, beta_iso), Eqs 10-11. Returns the parameters along both
/// segments, or nothing when the sign test fails or the segments are near parallel.
struct CrossingParams {
    double s_alpha, s_beta;
    Vec3 from_alpha, from_beta;
};
std::optional<CrossingParams> crossing(const Vec3& p0, const Vec3& p1, double b0, double b1, const Vec3& q0,
                                       const Vec3& q1, double a0, double a1, double alpha_iso, double beta_iso);

/// Order in which interior points split the chord A-B: indices sorted by projection onto AB.
std::vector<int> order_along(const Vec3& A, const Vec3& B, const std::vector<Vec3>& interior);

LatticeGraph build_layer_graph(const TetMesh& mesh, const FieldSet& fields, int layer, double gamma_iso,
                               double interval, const std::vector<double>& alpha_isos,
                               const std::vector<double>& beta_isos);
std::vector<LatticeGraph> slice_all(const TetMesh& mesh, const FieldSet& fields, const IsoPlan& plan);

/// Planar cross-section of one tet by the gamma iso-surface; `edges` are mesh edges in cyclic order.
struct IsoPolygon {
    int tet;
    std::vector<int> edges;
};
/// Cross-section of a single tet; empty `edges` when the tet does not straddle `iso`.
IsoPolygon iso_polygon(const TetMesh& mesh, const ScalarField& gamma, int tet, double iso);
/// Marching-tets polygons of all tets straddling `iso`, in tet order.
std::vector<IsoPolygon> iso_polygons(const TetMesh& mesh, const ScalarField& gamma, double iso);
/// Canonical crossing point of the gamma iso-surface on a mesh edge.
Vec3 edge_crossing(const TetMesh& mesh, const ScalarField& gamma, int edge, double iso);

/// Angle in degrees between the nozzle direction at each boundary face and its outward normal.
std::vector<double> overhang_angles(const SurfaceMesh& surface, const FrameField& frames);
/// Same with one fixed nozzle direction for every face (2.5-axis printing).
std::vector<double> overhang_angles(const SurfaceMesh& surface, const Vec3& fixed_nozzle);

void write_layers_obj(const std::vector<LatticeGraph>& layers, const std::filesystem::path& path);
void write_layer_json(const LatticeGraph& g, const std::filesystem::path& path);
LatticeGraph read_layer_json(const std::filesystem::path& path);

}  // namespace geoprint
