#include "geoprint/slicer.hpp"

#include "geoprint/errors.hpp"
#include "geoprint/parallel.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

namespace geoprint {

using json = nlohmann::json;

const char* to_string(VertexKind k) {
    switch (k) {
        case VertexKind::AlphaIsoline: return "alpha";
        case VertexKind::BetaIsoline: return "beta";
        case VertexKind::Crossing: return "crossing";
        case VertexKind::BoundaryInterp: return "boundary";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Alpha: return "alpha";
        case EdgeKind::Beta: return "beta";
        case EdgeKind::Boundary: return "boundary";
    }
    return "?";
}

std::vector<int> LatticeGraph::degrees() const {
    std::vector<int> d(vertices.size(), 0);
    for (const auto& e : edges) {
        ++d[e.a];
        ++d[e.b];
    }
    return d;
}

// ---------------------------------------------------------------- plans

double perturb_off_values(double value, double interval, const std::vector<double>& sorted) {
    auto collides = [&](double x) {
        double tol = 1e-9 * interval;
        auto it = std::lower_bound(sorted.begin(), sorted.end(), x - tol);
        return it != sorted.end() && *it <= x + tol;
    };
    if (!collides(value)) return value;
    // step inward first so values sitting on the field extremes stay inside the range
    double first = !sorted.empty() && value > 0.5 * (sorted.front() + sorted.back()) ? -1.0 : 1.0;
    for (int k = 1; k <= 64; ++k)
        for (double sign : {first, -first}) {
            double x = value + sign * k * 1e-7 * interval;
            if (!collides(x)) return x;
        }
    return value;
}

namespace {

std::vector<double> sorted_copy(const ScalarField& f) {
    std::vector<double> v(f.data(), f.data() + f.size());
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<double> uniform_levels(double d, double max) {
    std::vector<double> out;
    if (!(d > 0)) throw ValidationError("iso interval must be positive");
    for (long k = 1; k * d < max; ++k) out.push_back(k * d);
    return out;
}

void perturb_list(std::vector<double>& list, const std::vector<double>& sorted) {
    for (size_t i = 0; i < list.size(); ++i) {
        double lo = i > 0 ? list[i] - list[i - 1] : list[i];
        double hi = i + 1 < list.size() ? list[i + 1] - list[i] : lo;
        list[i] = perturb_off_values(list[i], std::min(lo, hi), sorted);
    }
}

void check_list(const std::vector<double>& list, double mx, const char* name) {
    for (size_t i = 0; i < list.size(); ++i) {
        if (!(list[i] > 0.0 && list[i] < mx))
            throw ValidationError(std::string(name) + " iso value " + std::to_string(list[i]) + " is outside (0, " +
                                      std::to_string(mx) + ")",
                                  static_cast<long>(i));
        if (i > 0 && !(list[i] > list[i - 1]))
            throw ValidationError(std::string(name) + " iso values must be strictly increasing", static_cast<long>(i));
    }
}

void finish_list(std::vector<double>& list, const ScalarField& field, const char* name, bool explicit_list) {
    auto sorted = sorted_copy(field);
    double mx = sorted.empty() ? 0.0 : sorted.back();
    if (explicit_list) check_list(list, mx, name);
    perturb_list(list, sorted);
    check_list(list, mx, name);
}

IsoPlan finish_plan(const FieldSet& f, IsoPlan p, bool explicit_list) {
    if (p.gamma.empty()) throw ValidationError("empty plan: gamma interval exceeds the field range");
    if (p.alpha.empty()) spdlog::warn("alpha plan is empty; layers carry no alpha isolines");
    if (p.beta.empty()) spdlog::warn("beta plan is empty; layers carry no beta isolines");
    finish_list(p.gamma, f.gamma, "gamma", explicit_list);
    finish_list(p.alpha, f.alpha, "alpha", explicit_list);
    finish_list(p.beta, f.beta, "beta", explicit_list);
    p.gamma_interval.resize(p.gamma.size());
    for (size_t i = 0; i < p.gamma.size(); ++i) p.gamma_interval[i] = p.gamma[i] - (i > 0 ? p.gamma[i - 1] : 0.0);
    return p;
}

}  // namespace

IsoPlan plan_isovalues(const FieldSet& f, double dg, double da, double db) {
    IsoPlan p;
    p.gamma = uniform_levels(dg, f.gamma.maxCoeff());
    p.alpha = uniform_levels(da, f.alpha.maxCoeff());
    p.beta = uniform_levels(db, f.beta.maxCoeff());
    return finish_plan(f, std::move(p), false);
}

IsoPlan plan_isovalues(const FieldSet& f, std::vector<double> g, std::vector<double> a, std::vector<double> b) {
    return finish_plan(f, IsoPlan{std::move(g), std::move(a), std::move(b), {}}, true);
}

// ---------------------------------------------------------------- primitives

Vec3 edge_crossing(const TetMesh& mesh, const ScalarField& gamma, int edge, double iso) {
    auto [a, b] = mesh.edge(edge);
    double t = (iso - gamma[a]) / (gamma[b] - gamma[a]);
    return mesh.vertex(a) + t * (mesh.vertex(b) - mesh.vertex(a));
}

namespace {

bool straddles(double x, double y, double c) { return (x - c) * (y - c) < 0.0; }

bool edge_crosses(const TetMesh& m, const ScalarField& g, int e, double c) {
    return straddles(g[m.edge(e)[0]], g[m.edge(e)[1]], c);
}

double lerp_param(const TetMesh& m, const ScalarField& g, int e, double c) {
    auto [a, b] = m.edge(e);
    return (c - g[a]) / (g[b] - g[a]);
}

struct EdgePoint {
    Vec3 pos;
    double alpha, beta;
};

EdgePoint edge_point(const TetMesh& m, const FieldSet& f, int e, double c) {
    auto [a, b] = m.edge(e);
    double t = lerp_param(m, f.gamma, e, c);
    return {m.vertex(a) + t * (m.vertex(b) - m.vertex(a)), f.alpha[a] + t * (f.alpha[b] - f.alpha[a]),
            f.beta[a] + t * (f.beta[b] - f.beta[a])};
}

/// The two crossing edges of a face (lower edge index first), or {-1,-1}.
std::array<int, 2> face_chord(const TetMesh& m, const ScalarField& g, int face, double c) {
    std::array<int, 2> out{-1, -1};
    int n = 0;
    std::array<int, 3> fe = m.face_edges(face);
    std::sort(fe.begin(), fe.end());
    for (int e : fe)
        if (edge_crosses(m, g, e, c)) {
            if (n == 2) return {-1, -1};
            out[n++] = e;
        }
    return n == 2 ? out : std::array<int, 2>{-1, -1};
}

int lowest_tet_of_face(const TetMesh& m, int face) {
    auto ft = m.face_tets(face);
    return ft[1] < 0 ? ft[0] : std::min(ft[0], ft[1]);
}

LatticeVertex make_face_vertex(const TetMesh& m, const FieldSet& f, int face, const EdgePoint& P,
                               const EdgePoint& Q, double c, double iso, int field, int index) {
    double vp = field == 0 ? P.alpha : P.beta;
    double vq = field == 0 ? Q.alpha : Q.beta;
    double s = (iso - vp) / (vq - vp);
    LatticeVertex v;
    v.position = P.pos + s * (Q.pos - P.pos);
    v.kind = field == 0 ? VertexKind::AlphaIsoline : VertexKind::BetaIsoline;
    v.host = face;
    v.host_tet = lowest_tet_of_face(m, face);
    v.normal = f.frames.empty() ? Vec3(0, 0, 1) : f.frames[v.host_tet].gamma;
    v.gamma = c;
    v.alpha = field == 0 ? iso : P.alpha + s * (Q.alpha - P.alpha);
    v.beta = field == 1 ? iso : P.beta + s * (Q.beta - P.beta);
    (field == 0 ? v.alpha_index : v.beta_index) = index;
    v.on_boundary_face = m.face_on_boundary(face);
    return v;
}

}  // namespace

std::optional<LatticeVertex> gen_face_vertex(const TetMesh& m, const FieldSet& f, int face, double c, double iso,
                                             int field) {
    auto ch = face_chord(m, f.gamma, face, c);
    if (ch[0] < 0) return std::nullopt;
    EdgePoint P = edge_point(m, f, ch[0], c), Q = edge_point(m, f, ch[1], c);
    double vp = field == 0 ? P.alpha : P.beta;
    double vq = field == 0 ? Q.alpha : Q.beta;
    if (!straddles(vp, vq, iso)) return std::nullopt;
    return make_face_vertex(m, f, face, P, Q, c, iso, field, -1);
}

std::optional<LatticeVertex> gen_bound_vertex(const TetMesh& m, const FieldSet& f, int edge, double c) {
    if (!m.edge_on_boundary(edge) || !edge_crosses(m, f.gamma, edge, c)) return std::nullopt;
    EdgePoint P = edge_point(m, f, edge, c);
    LatticeVertex v;
    v.position = P.pos;
    v.kind = VertexKind::BoundaryInterp;
    v.host = edge;
    auto et = m.edge_tets(edge);
    v.host_tet = *std::min_element(et.begin(), et.end());
    v.normal = f.frames.empty() ? Vec3(0, 0, 1) : f.frames[v.host_tet].gamma;
    v.gamma = c;
    v.alpha = P.alpha;
    v.beta = P.beta;
    return v;
}

std::optional<CrossingParams> crossing(const Vec3& p0, const Vec3& p1, double b0, double b1, const Vec3& q0,
                                       const Vec3& q1, double a0, double a1, double alpha_iso, double beta_iso) {
    if (!straddles(b0, b1, beta_iso) || !straddles(a0, a1, alpha_iso)) return std::nullopt;
    if (std::abs(b1 - b0) < 1e-12 || std::abs(a1 - a0) < 1e-12) {
        spdlog::warn("skipping near-parallel isoline crossing");
        return std::nullopt;
    }
    CrossingParams c;
    c.s_alpha = (beta_iso - b0) / (b1 - b0);
    c.s_beta = (alpha_iso - a0) / (a1 - a0);
    c.from_alpha = p0 + c.s_alpha * (p1 - p0);
    c.from_beta = q0 + c.s_beta * (q1 - q0);
    return c;
}

std::vector<int> order_along(const Vec3& A, const Vec3& B, const std::vector<Vec3>& interior) {
    Vec3 d = B - A;
    std::vector<std::pair<double, int>> key;
    for (size_t i = 0; i < interior.size(); ++i) key.emplace_back((interior[i] - A).dot(d), static_cast<int>(i));
    std::sort(key.begin(), key.end());
    std::vector<int> out;
    for (auto& k : key) out.push_back(k.second);
    return out;
}

// ---------------------------------------------------------------- layer graph

namespace {

std::vector<int> straddling_tets(const TetMesh& m, const ScalarField& g, double c) {
    std::vector<int> out;
    for (int t = 0; t < m.num_tets(); ++t) {
        const auto& T = m.tet(t);
        double lo = std::min({g[T[0]], g[T[1]], g[T[2]], g[T[3]]});
        double hi = std::max({g[T[0]], g[T[1]], g[T[2]], g[T[3]]});
        if (lo < c && c < hi) out.push_back(t);
    }
    return out;
}

struct IsoSegment {
    int kind;  // 0 alpha, 1 beta
    int index;
    int a, b;  // lattice vertex ids
    int tet;
    std::vector<std::pair<double, int>> splits;  // (parameter from a, crossing vertex)
};

}  // namespace

LatticeGraph build_layer_graph(const TetMesh& m, const FieldSet& f, int layer, double c, double interval,
                               const std::vector<double>& alpha_isos, const std::vector<double>& beta_isos) {
    LatticeGraph G;
    G.layer = layer;
    G.iso = c;
    G.interval = interval;
    std::vector<int> tets = straddling_tets(m, f.gamma, c);
    if (tets.empty()) return G;

    // faces carrying a chord of the iso-surface
    std::vector<int> faces;
    for (int t : tets)
        for (int i = 0; i < 4; ++i) faces.push_back(m.tet_face(t, i));
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

    std::unordered_map<int, std::vector<int>> face_verts;  // face -> lattice vertices on it
    std::unordered_map<int, std::array<int, 2>> chords;
    // alpha/beta levels are nudged off the values at the iso-surface corners of this layer,
    // the same tie-breaking the plan applies to mesh vertices
    std::vector<double> local[2] = {alpha_isos, beta_isos};
    {
        std::vector<double> corner[2];
        for (int t : tets)
            for (int e : m.tet_edges(t))
                if (edge_crosses(m, f.gamma, e, c)) {
                    EdgePoint P = edge_point(m, f, e, c);
                    corner[0].push_back(P.alpha);
                    corner[1].push_back(P.beta);
                }
        for (int k = 0; k < 2; ++k) {
            std::sort(corner[k].begin(), corner[k].end());
            perturb_list(local[k], corner[k]);
        }
    }
    const std::vector<double>* lists[2] = {&local[0], &local[1]};
    for (int face : faces) {
        auto ch = face_chord(m, f.gamma, face, c);
        if (ch[0] < 0) continue;
        chords[face] = ch;
        EdgePoint P = edge_point(m, f, ch[0], c), Q = edge_point(m, f, ch[1], c);
        std::vector<std::pair<double, int>> on_chord[2];  // (chord parameter, vertex) per field
        for (int field = 0; field < 2; ++field) {
            const auto& L = *lists[field];
            double vp = field == 0 ? P.alpha : P.beta, vq = field == 0 ? Q.alpha : Q.beta;
            double lo = std::min(vp, vq), hi = std::max(vp, vq);
            auto it = std::upper_bound(L.begin(), L.end(), lo);
            for (; it != L.end() && *it < hi; ++it) {
                int j = static_cast<int>(it - L.begin());
                on_chord[field].emplace_back((*it - vp) / (vq - vp), static_cast<int>(G.vertices.size()));
                face_verts[face].push_back(static_cast<int>(G.vertices.size()));
                G.vertices.push_back(make_face_vertex(m, f, face, P, Q, c, *it, field, j));
            }
        }
        // an alpha and a beta isoline meeting exactly on the face: one crossing shared by both tets
        for (auto [sa, va] : on_chord[0])
            for (auto [sb, vb] : on_chord[1]) {
                if (std::abs(sa - sb) > 1e-9 || G.vertices[vb].kind != VertexKind::BetaIsoline) continue;
                LatticeVertex& A = G.vertices[va];
                const LatticeVertex& B = G.vertices[vb];
                A.kind = VertexKind::Crossing;
                A.position = 0.5 * (A.position + B.position);
                A.beta = B.beta;
                A.beta_index = B.beta_index;
                G.vertices[vb].kind = VertexKind::Crossing;  // marks vb as dropped
                G.vertices[vb].alpha_index = -2;
            }
        auto& fv = face_verts[face];
        fv.erase(std::remove_if(fv.begin(), fv.end(), [&](int v) { return G.vertices[v].alpha_index == -2; }), fv.end());
    }
    // compact away merged duplicates
    {
        std::vector<int> remap(G.vertices.size(), -1);
        std::vector<LatticeVertex> kept;
        for (size_t v = 0; v < G.vertices.size(); ++v)
            if (G.vertices[v].alpha_index != -2) {
                remap[v] = static_cast<int>(kept.size());
                kept.push_back(G.vertices[v]);
            }
        if (kept.size() != G.vertices.size()) {
            G.vertices = std::move(kept);
            for (auto& [face, vs] : face_verts)
                for (int& v : vs) v = remap[v];
        }
    }

    // boundary-interp vertices, one per crossing boundary edge
    std::map<int, int> bound_vertex;
    for (int face : faces) {
        if (!m.face_on_boundary(face) || !chords.count(face)) continue;
        for (int e : chords[face])
            if (!bound_vertex.count(e)) {
                bound_vertex[e] = -1;
            }
    }
    for (auto& [e, vid] : bound_vertex) {
        vid = static_cast<int>(G.vertices.size());
        G.vertices.push_back(*gen_bound_vertex(m, f, e, c));
    }

    // isoline segments inside each tet
    std::vector<IsoSegment> segs;
    std::vector<std::vector<int>> tet_segs(tets.size());
    for (size_t ti = 0; ti < tets.size(); ++ti) {
        int t = tets[ti];
        std::map<std::pair<int, int>, std::vector<int>> groups;
        for (int i = 0; i < 4; ++i) {
            auto it = face_verts.find(m.tet_face(t, i));
            if (it == face_verts.end()) continue;
            for (int v : it->second) {
                const auto& V = G.vertices[v];
                if (V.alpha_index >= 0) groups[{0, V.alpha_index}].push_back(v);
                if (V.beta_index >= 0) groups[{1, V.beta_index}].push_back(v);
            }
        }
        for (auto& [key, vs] : groups) {
            if (vs.size() == 2) {
                tet_segs[ti].push_back(static_cast<int>(segs.size()));
                segs.push_back({key.first, key.second, vs[0], vs[1], t, {}});
                continue;
            }
            spdlog::warn("tet {} holds {} vertices of one isoline; pairing by distance", t, vs.size());
            std::vector<char> used(vs.size(), 0);
            for (size_t a = 0; a < vs.size(); ++a) {
                if (used[a]) continue;
                int best = -1;
                double bd = 1e300;
                for (size_t b = a + 1; b < vs.size(); ++b) {
                    if (used[b]) continue;
                    double d = (G.vertices[vs[a]].position - G.vertices[vs[b]].position).norm();
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(b);
                    }
                }
                if (best < 0) continue;
                used[a] = used[best] = 1;
                tet_segs[ti].push_back(static_cast<int>(segs.size()));
                segs.push_back({key.first, key.second, vs[a], vs[best], t, {}});
            }
        }
    }

    // alpha x beta crossings
    for (size_t ti = 0; ti < tets.size(); ++ti) {
        for (int sa : tet_segs[ti]) {
            if (segs[sa].kind != 0) continue;
            for (int sb : tet_segs[ti]) {
                if (segs[sb].kind != 1) continue;
                IsoSegment& A = segs[sa];
                IsoSegment& B = segs[sb];
                const auto &a0 = G.vertices[A.a], &a1 = G.vertices[A.b];
                const auto &b0 = G.vertices[B.a], &b1 = G.vertices[B.b];
                double ai = local[0][A.index], bi = local[1][B.index];
                auto cp = crossing(a0.position, a1.position, a0.beta, a1.beta, b0.position, b1.position, b0.alpha,
                                   b1.alpha, ai, bi);
                if (!cp) continue;
                G.max_crossing_discrepancy = std::max(G.max_crossing_discrepancy, (cp->from_alpha - cp->from_beta).norm());
                LatticeVertex v;
                v.position = cp->from_alpha;
                v.kind = VertexKind::Crossing;
                v.host = A.tet;
                v.host_tet = A.tet;
                v.normal = f.frames.empty() ? Vec3(0, 0, 1) : f.frames[A.tet].gamma;
                v.gamma = c;
                v.alpha = ai;
                v.beta = bi;
                v.alpha_index = A.index;
                v.beta_index = B.index;
                int id = static_cast<int>(G.vertices.size());
                G.vertices.push_back(v);
                A.splits.emplace_back(cp->s_alpha, id);
                B.splits.emplace_back(cp->s_beta, id);
            }
        }
    }
    for (auto& s : segs) {
        std::sort(s.splits.begin(), s.splits.end());
        int prev = s.a;
        EdgeKind k = s.kind == 0 ? EdgeKind::Alpha : EdgeKind::Beta;
        for (auto& [par, v] : s.splits) {
            G.edges.push_back({prev, v, k, s.tet, -1});
            prev = v;
        }
        G.edges.push_back({prev, s.b, k, s.tet, -1});
    }

    // boundary chords split at the isoline vertices on the same face
    for (int face : faces) {
        if (!m.face_on_boundary(face)) continue;
        auto ch = chords.find(face);
        if (ch == chords.end()) continue;
        int A = bound_vertex[ch->second[0]], B = bound_vertex[ch->second[1]];
        std::vector<int> inner;
        std::vector<Vec3> pos;
        if (auto it = face_verts.find(face); it != face_verts.end())
            for (int v : it->second) {
                inner.push_back(v);
                pos.push_back(G.vertices[v].position);
            }
        int prev = A, tet = m.face_tets(face)[0];
        for (int i : order_along(G.vertices[A].position, G.vertices[B].position, pos)) {
            G.edges.push_back({prev, inner[i], EdgeKind::Boundary, tet, face});
            prev = inner[i];
        }
        G.edges.push_back({prev, B, EdgeKind::Boundary, tet, face});
    }
    return G;
}

std::vector<LatticeGraph> slice_all(const TetMesh& m, const FieldSet& f, const IsoPlan& plan) {
    std::vector<LatticeGraph> all(plan.gamma.size());
    parallel_for(all.size(), [&](size_t i) {
        all[i] = build_layer_graph(m, f, static_cast<int>(i) + 1, plan.gamma[i], plan.gamma_interval[i], plan.alpha,
                                   plan.beta);
    });
    std::vector<LatticeGraph> out;
    for (auto& g : all) {
        if (g.empty()) {
            spdlog::info("layer {} at gamma {} is empty and dropped", g.layer, g.iso);
            continue;
        }
        out.push_back(std::move(g));
    }
    return out;
}

IsoPolygon iso_polygon(const TetMesh& m, const ScalarField& g, int t, double c) {
    // chords on the tet faces chain into a triangle or quad
    std::vector<std::array<int, 2>> ch;
    for (int i = 0; i < 4; ++i) {
        auto fc = face_chord(m, g, m.tet_face(t, i), c);
        if (fc[0] >= 0) ch.push_back(fc);
    }
    IsoPolygon poly{t, {}};
    if (ch.empty()) return poly;
    std::vector<char> used(ch.size(), 0);
    poly.edges = {ch[0][0], ch[0][1]};
    used[0] = 1;
    for (size_t step = 1; step + 1 < ch.size(); ++step) {
        int tail = poly.edges.back();
        for (size_t k = 0; k < ch.size(); ++k) {
            if (used[k]) continue;
            if (ch[k][0] == tail || ch[k][1] == tail) {
                poly.edges.push_back(ch[k][0] == tail ? ch[k][1] : ch[k][0]);
                used[k] = 1;
                break;
            }
        }
    }
    return poly;
}

std::vector<IsoPolygon> iso_polygons(const TetMesh& m, const ScalarField& g, double c) {
    std::vector<IsoPolygon> out;
    for (int t : straddling_tets(m, g, c)) {
        auto poly = iso_polygon(m, g, t, c);
        if (!poly.edges.empty()) out.push_back(std::move(poly));
    }
    return out;
}

std::vector<double> overhang_angles(const SurfaceMesh& s, const FrameField& frames) {
    std::vector<double> out(s.size());
    for (int i = 0; i < s.size(); ++i) out[i] = angle_deg(frames[s.tet[i]].gamma, s.normal[i]);
    return out;
}

std::vector<double> overhang_angles(const SurfaceMesh& s, const Vec3& nozzle) {
    std::vector<double> out(s.size());
    for (int i = 0; i < s.size(); ++i) out[i] = angle_deg(nozzle, s.normal[i]);
    return out;
}

// ---------------------------------------------------------------- files

void write_layers_obj(const std::vector<LatticeGraph>& layers, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(10);
    size_t base = 1;
    for (const auto& g : layers) {
        out << "o layer_" << g.layer << "\n";
        for (const auto& v : g.vertices) out << "v " << v.position.x() << " " << v.position.y() << " " << v.position.z() << "\n";
        for (const auto& e : g.edges) out << "l " << base + e.a << " " << base + e.b << "\n";
        base += g.vertices.size();
    }
}

void write_layer_json(const LatticeGraph& g, const std::filesystem::path& path) {
    json j;
    j["layer"] = g.layer;
    j["iso"] = g.iso;
    j["interval"] = g.interval;
    json vs = json::array();
    for (const auto& v : g.vertices)
        vs.push_back({{"p", {v.position.x(), v.position.y(), v.position.z()}},
                      {"n", {v.normal.x(), v.normal.y(), v.normal.z()}},
                      {"kind", to_string(v.kind)},
                      {"host", v.host},
                      {"tet", v.host_tet},
                      {"gamma", v.gamma},
                      {"alpha", v.alpha},
                      {"beta", v.beta},
                      {"ai", v.alpha_index},
                      {"bi", v.beta_index},
                      {"bface", v.on_boundary_face}});
    j["vertices"] = std::move(vs);
    json es = json::array();
    for (const auto& e : g.edges)
        es.push_back({{"a", e.a}, {"b", e.b}, {"kind", to_string(e.kind)}, {"tet", e.host_tet}, {"face", e.host_face}});
    j["edges"] = std::move(es);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump() << "\n";
}

namespace {
Vec3 vec3(const json& a) { return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()}; }
}  // namespace

LatticeGraph read_layer_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    LatticeGraph g;
    try {
        json j = json::parse(in);
        g.layer = j.at("layer");
        g.iso = j.at("iso");
        g.interval = j.at("interval");
        static const std::map<std::string, VertexKind> vk = {{"alpha", VertexKind::AlphaIsoline},
                                                             {"beta", VertexKind::BetaIsoline},
                                                             {"crossing", VertexKind::Crossing},
                                                             {"boundary", VertexKind::BoundaryInterp}};
        static const std::map<std::string, EdgeKind> ek = {
            {"alpha", EdgeKind::Alpha}, {"beta", EdgeKind::Beta}, {"boundary", EdgeKind::Boundary}};
        for (const auto& v : j.at("vertices")) {
            LatticeVertex x;
            x.position = vec3(v.at("p"));
            x.normal = vec3(v.at("n"));
            x.kind = vk.at(v.at("kind").get<std::string>());
            x.host = v.at("host");
            x.host_tet = v.at("tet");
            x.gamma = v.at("gamma");
            x.alpha = v.at("alpha");
            x.beta = v.at("beta");
            x.alpha_index = v.at("ai");
            x.beta_index = v.at("bi");
            x.on_boundary_face = v.at("bface");
            g.vertices.push_back(x);
        }
        for (const auto& e : j.at("edges"))
            g.edges.push_back({e.at("a"), e.at("b"), ek.at(e.at("kind").get<std::string>()), e.at("tet"), e.at("face")});
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(path.string() + ": unknown kind");
    }
    return g;
}

}  // namespace geoprint
