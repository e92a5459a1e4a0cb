#include "geoprint/tet_mesh.hpp"

#include "geoprint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace geoprint {

namespace {

constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

Csr make_csr(int rows, const std::vector<std::pair<int, int>>& pairs) {
    Csr out;
    out.offset.assign(rows + 1, 0);
    for (auto& [r, v] : pairs) ++out.offset[r + 1];
    for (int r = 0; r < rows; ++r) out.offset[r + 1] += out.offset[r];
    out.data.resize(pairs.size());
    std::vector<int> fill(out.offset.begin(), out.offset.end() - 1);
    for (auto& [r, v] : pairs) out.data[fill[r]++] = v;
    for (int r = 0; r < rows; ++r) std::sort(out.data.begin() + out.offset[r], out.data.begin() + out.offset[r + 1]);
    return out;
}

}  // namespace

TetMesh TetMesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets) {
    TetMesh m;
    const int nv = static_cast<int>(vertices.size());
    const int nt = static_cast<int>(tets.size());
    if (nt == 0) throw ValidationError("mesh has no tetrahedra");
    for (int v = 0; v < nv; ++v)
        if (!vertices[v].allFinite()) throw ValidationError("vertex " + std::to_string(v) + " has non-finite coordinates", v);

    m.volumes_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        auto& T = tets[t];
        for (int k = 0; k < 4; ++k)
            if (T[k] < 0 || T[k] >= nv)
                throw ValidationError("tet " + std::to_string(t) + " references vertex " + std::to_string(T[k]) +
                                          " out of range [0," + std::to_string(nv) + ")",
                                      t);
        double vol = signed_volume(vertices[T[0]], vertices[T[1]], vertices[T[2]], vertices[T[3]]);
        if (std::abs(vol) <= kDegenerateVolume)
            throw ValidationError("tet " + std::to_string(t) + " is degenerate (volume " + std::to_string(vol) + ")", t);
        if (vol < 0) {
            std::swap(T[2], T[3]);
            vol = -vol;
        }
        m.volumes_[t] = vol;
    }

    // faces
    struct FaceRec {
        std::array<int, 3> key;
        int tet;
        int local;
    };
    std::vector<FaceRec> recs;
    recs.reserve(4 * static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 4; ++i) {
            std::array<int, 3> k;
            int n = 0;
            for (int j = 0; j < 4; ++j)
                if (j != i) k[n++] = tets[t][j];
            std::sort(k.begin(), k.end());
            recs.push_back({k, t, i});
        }
    std::sort(recs.begin(), recs.end(), [](const FaceRec& a, const FaceRec& b) {
        return std::tie(a.key, a.tet, a.local) < std::tie(b.key, b.tet, b.local);
    });
    m.tet_faces_.assign(nt, {-1, -1, -1, -1});
    for (size_t i = 0; i < recs.size();) {
        size_t j = i;
        while (j < recs.size() && recs[j].key == recs[i].key) ++j;
        int f = static_cast<int>(m.faces_.size());
        if (j - i > 2)
            throw ValidationError("face (" + std::to_string(recs[i].key[0]) + "," + std::to_string(recs[i].key[1]) + "," +
                                      std::to_string(recs[i].key[2]) + ") is shared by more than two tets",
                                  f);
        if (j - i == 2) {
            const auto& k = recs[i].key;
            const Vec3 &a = vertices[k[0]], &b = vertices[k[1]], &c = vertices[k[2]];
            double s1 = signed_volume(a, b, c, vertices[tets[recs[i].tet][recs[i].local]]);
            double s2 = signed_volume(a, b, c, vertices[tets[recs[i + 1].tet][recs[i + 1].local]]);
            if ((s1 > 0) == (s2 > 0))
                throw ValidationError("tets " + std::to_string(recs[i].tet) + " and " + std::to_string(recs[i + 1].tet) +
                                          " overlap across a shared face",
                                      recs[i + 1].tet);
        }
        m.faces_.push_back(recs[i].key);
        m.face_tets_.push_back({recs[i].tet, j - i == 2 ? recs[i + 1].tet : -1});
        for (size_t r = i; r < j; ++r) m.tet_faces_[recs[r].tet][recs[r].local] = f;
        i = j;
    }

    // edges
    std::vector<std::array<int, 3>> erecs;
    erecs.reserve(6 * static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int e = 0; e < 6; ++e) {
            int a = tets[t][kLocalEdges[e][0]], b = tets[t][kLocalEdges[e][1]];
            erecs.push_back({std::min(a, b), std::max(a, b), t * 8 + e});
        }
    std::sort(erecs.begin(), erecs.end());
    m.tet_edges_.assign(nt, {});
    std::vector<std::pair<int, int>> edge_tet_pairs;
    edge_tet_pairs.reserve(erecs.size());
    for (size_t i = 0; i < erecs.size();) {
        size_t j = i;
        while (j < erecs.size() && erecs[j][0] == erecs[i][0] && erecs[j][1] == erecs[i][1]) ++j;
        int e = static_cast<int>(m.edges_.size());
        m.edges_.push_back({erecs[i][0], erecs[i][1]});
        for (size_t r = i; r < j; ++r) {
            int t = erecs[r][2] / 8, le = erecs[r][2] % 8;
            m.tet_edges_[t][le] = e;
            edge_tet_pairs.emplace_back(e, t);
        }
        i = j;
    }
    m.edge_tets_ = make_csr(static_cast<int>(m.edges_.size()), edge_tet_pairs);

    m.vertices_ = std::move(vertices);
    m.tets_ = std::move(tets);

    m.face_edges_.resize(m.faces_.size());
    for (int f = 0; f < m.num_faces(); ++f) {
        const auto& F = m.faces_[f];
        m.face_edges_[f] = {*m.find_edge(F[1], F[2]), *m.find_edge(F[0], F[2]), *m.find_edge(F[0], F[1])};
    }

    // boundary flags and edge-manifold check
    m.edge_boundary_.assign(m.edges_.size(), 0);
    m.vertex_boundary_.assign(nv, 0);
    std::vector<int> bcount(m.edges_.size(), 0);
    for (int f = 0; f < m.num_faces(); ++f) {
        if (!m.face_on_boundary(f)) continue;
        for (int e : m.face_edges_[f]) {
            m.edge_boundary_[e] = 1;
            ++bcount[e];
        }
        for (int v : m.faces_[f]) m.vertex_boundary_[v] = 1;
    }
    for (int e = 0; e < m.num_edges(); ++e)
        if (m.edge_boundary_[e] && bcount[e] != 2)
            throw ValidationError("boundary is non-manifold at edge (" + std::to_string(m.edges_[e][0]) + "," +
                                      std::to_string(m.edges_[e][1]) + ")",
                                  e);

    std::vector<std::pair<int, int>> vt;
    vt.reserve(4 * static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int v : m.tets_[t]) vt.emplace_back(v, t);
    m.vertex_tets_ = make_csr(nv, vt);
    for (int v = 0; v < nv; ++v)
        if (m.vertex_tets_.row(v).empty())
            throw ValidationError("vertex " + std::to_string(v) + " is not referenced by any tet", v);

    m.gradients_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& T = m.tets_[t];
        auto& g = m.gradients_[t];
        for (int i = 1; i < 4; ++i) {
            int j = (i + 1) % 4, k = (i + 2) % 4, l = (i + 3) % 4;
            const Vec3& pj = m.vertices_[T[j]];
            Vec3 n = (m.vertices_[T[k]] - pj).cross(m.vertices_[T[l]] - pj);
            g[i] = n / n.dot(m.vertices_[T[i]] - pj);
        }
        g[0] = -(g[1] + g[2] + g[3]);
    }
    return m;
}

double TetMesh::total_volume() const {
    double s = 0.0;
    for (double v : volumes_) s += v;
    return s;
}

Aabb TetMesh::bounds() const {
    Aabb b;
    for (const auto& p : vertices_) b.expand(p);
    return b;
}

double TetMesh::average_edge_length() const {
    double s = 0.0;
    for (const auto& e : edges_) s += (vertices_[e[0]] - vertices_[e[1]]).norm();
    return edges_.empty() ? 0.0 : s / static_cast<double>(edges_.size());
}

std::optional<int> TetMesh::find_edge(int a, int b) const {
    std::array<int, 2> k{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), k);
    if (it == edges_.end() || *it != k) return std::nullopt;
    return static_cast<int>(it - edges_.begin());
}

std::optional<int> TetMesh::find_face(int a, int b, int c) const {
    std::array<int, 3> k{a, b, c};
    std::sort(k.begin(), k.end());
    auto it = std::lower_bound(faces_.begin(), faces_.end(), k);
    if (it == faces_.end() || *it != k) return std::nullopt;
    return static_cast<int>(it - faces_.begin());
}

double SurfaceMesh::total_area() const {
    double s = 0.0;
    for (double a : area) s += a;
    return s;
}

double SurfaceMesh::enclosed_volume(const TetMesh& mesh) const {
    // shift to the bounding-box center to limit cancellation
    Vec3 c = mesh.bounds().center();
    double s = 0.0;
    for (const auto& t : tris)
        s += (mesh.vertex(t[0]) - c).dot((mesh.vertex(t[1]) - c).cross(mesh.vertex(t[2]) - c));
    return s / 6.0;
}

int SurfaceMesh::euler_characteristic() const {
    std::set<int> verts;
    std::set<std::pair<int, int>> edges;
    for (const auto& t : tris)
        for (int k = 0; k < 3; ++k) {
            verts.insert(t[k]);
            int a = t[k], b = t[(k + 1) % 3];
            edges.emplace(std::min(a, b), std::max(a, b));
        }
    return static_cast<int>(verts.size()) - static_cast<int>(edges.size()) + size();
}

SurfaceMesh extract_boundary(const TetMesh& mesh) {
    SurfaceMesh s;
    std::vector<int> tri_of_face(mesh.num_faces(), -1);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!mesh.face_on_boundary(f)) continue;
        int t = mesh.face_tets(f)[0];
        int opp = -1;
        for (int i = 0; i < 4; ++i)
            if (mesh.tet_face(t, i) == f) opp = mesh.tet(t)[i];
        auto F = mesh.face(f);
        const Vec3 &a = mesh.vertex(F[0]), &b = mesh.vertex(F[1]), &c = mesh.vertex(F[2]);
        Vec3 n = (b - a).cross(c - a);
        if (n.dot(mesh.vertex(opp) - a) > 0) {
            std::swap(F[1], F[2]);
            n = -n;
        }
        tri_of_face[f] = s.size();
        s.tris.push_back(F);
        s.face.push_back(f);
        s.tet.push_back(t);
        s.area.push_back(0.5 * n.norm());
        s.normal.push_back(n.normalized());
    }
    // neighbors via shared boundary edges (each has exactly two boundary faces)
    std::vector<std::array<int, 2>> edge_tris(mesh.num_edges(), {-1, -1});
    for (int t = 0; t < s.size(); ++t)
        for (int e : mesh.face_edges(s.face[t])) {
            auto& slot = edge_tris[e];
            (slot[0] < 0 ? slot[0] : slot[1]) = t;
        }
    s.neighbor.resize(s.size());
    for (int t = 0; t < s.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            int e = *mesh.find_edge(s.tris[t][(k + 1) % 3], s.tris[t][(k + 2) % 3]);
            s.neighbor[t][k] = edge_tris[e][0] == t ? edge_tris[e][1] : edge_tris[e][0];
        }
    return s;
}

BaseRegion select_base_threshold(const TetMesh& mesh, double eps) {
    Aabb b = mesh.bounds();
    if (eps <= 0.0) eps = 1e-3 * (b.hi.z() - b.lo.z());
    BaseRegion r;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (mesh.vertex(v).z() < b.lo.z() + eps && mesh.vertex_on_boundary(v)) r.vertices.push_back(v);
    if (r.vertices.empty()) throw ValidationError("base selection is empty");
    return r;
}

BaseRegion select_base_explicit(const TetMesh& mesh, std::vector<int> vertices) {
    if (vertices.empty()) throw ValidationError("explicit base list is empty");
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    for (int v : vertices) {
        if (v < 0 || v >= mesh.num_vertices())
            throw ValidationError("base vertex " + std::to_string(v) + " is out of range", v);
        if (!mesh.vertex_on_boundary(v))
            throw ValidationError("base vertex " + std::to_string(v) + " is not on the boundary", v);
    }
    return {std::move(vertices)};
}

}  // namespace geoprint
