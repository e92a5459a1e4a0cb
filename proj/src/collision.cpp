#include "geoprint/collision.hpp"

#include "geoprint/errors.hpp"
#include "geoprint/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <unordered_map>

namespace geoprint {

void NozzleCone::validate() const {
    if (!(angle_deg > 0.0 && angle_deg < 90.0))
        throw ValidationError("nozzle half-angle must lie in (0, 90) degrees");
    if (!(length > 0.0)) throw ValidationError("nozzle length must be positive");
}

namespace {

/// Smallest generator component along the mean loop normal used to place its tip.
constexpr double kMinLean = 0.1;

Vec3 face_outward(const TetMesh& m, int f) {
    const auto& fv = m.face(f);
    const Vec3 &a = m.vertex(fv[0]), &b = m.vertex(fv[1]), &c = m.vertex(fv[2]);
    Vec3 n = (b - a).cross(c - a);
    int t = m.face_tets(f)[0];
    for (int v : m.tet(t)) {
        if (v != fv[0] && v != fv[1] && v != fv[2]) {
            if (n.dot(m.vertex(v) - a) > 0.0) n = -n;
            break;
        }
    }
    return n.normalized();
}

Vec3 any_perpendicular(const Vec3& n) {
    Vec3 a = std::abs(n.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    return n.cross(a).normalized();
}

/// Unit tangent projected into the plane normal to n.
Vec3 in_plane(const Vec3& v, const Vec3& n) {
    Vec3 p = v - v.dot(n) * n;
    return normalized_or(p, any_perpendicular(n));
}

/// n tilted by the cone angle towards tau x n.
Vec3 generator(const Vec3& n, const Vec3& tau, double ca, double sa) {
    Vec3 b = in_plane(tau.cross(n), n);
    return ca * n + sa * b;
}

Vec3 tet_grad(const TetMesh& m, const ScalarField& g, int t) {
    Vec3 out = Vec3::Zero();
    for (int i = 0; i < 4; ++i) out += g[m.tet(t)[i]] * m.basis_gradient(t, i);
    return out;
}

Vec3 newell(const std::vector<Vec3>& p) {
    Vec3 n = Vec3::Zero();
    for (size_t i = 0; i < p.size(); ++i) {
        const Vec3 &a = p[i], &b = p[(i + 1) % p.size()];
        n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()),
                  (a.x() - b.x()) * (a.y() + b.y()));
    }
    return n;
}

void centroid_fan(const std::vector<int>& ids, std::vector<Vec3>& V, std::vector<std::array<int, 3>>& out) {
    Vec3 c = Vec3::Zero();
    for (int i : ids) c += V[i];
    c /= static_cast<double>(ids.size());
    int ci = static_cast<int>(V.size());
    V.push_back(c);
    for (size_t i = 0; i < ids.size(); ++i) out.push_back({ci, ids[i], ids[(i + 1) % ids.size()]});
}

struct Patch {
    std::vector<std::array<int, 3>> tris;
    bool ok = true;
};

/// Triangulated iso-surface patch of the sub-graph, oriented against the gamma gradient.
Patch bottom_patch(const TetMesh& m, const ScalarField& gamma, const LatticeGraph& g, const SubGraph& sg,
                   const std::function<int(int)>& lat, std::vector<Vec3>& V) {
    Patch out;
    // ordered vertex chain of every boundary chord, keyed by face
    std::map<int, std::vector<int>> chains;
    {
        std::map<int, std::vector<std::pair<int, int>>> by_face;
        for (int e : sg.edges) {
            const auto& E = g.edges[e];
            if (E.kind == EdgeKind::Boundary) by_face[E.host_face].emplace_back(E.a, E.b);
        }
        for (auto& [f, es] : by_face) {
            std::map<int, std::vector<int>> adj;
            for (auto [a, b] : es) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
            int start = -1;
            for (auto& [v, nb] : adj) {
                if (nb.size() == 1 && g.vertices[v].kind == VertexKind::BoundaryInterp) {
                    start = v;
                    break;
                }
            }
            if (start < 0) {
                out.ok = false;
                return out;
            }
            std::vector<int> chain{start};
            int prev = -1, cur = start;
            while (true) {
                int next = -1;
                for (int w : adj[cur]) {
                    if (w != prev) next = w;
                }
                if (next < 0) break;
                chain.push_back(next);
                prev = cur;
                cur = next;
                if (chain.size() > es.size() + 1) break;
            }
            if (chain.size() != es.size() + 1) {
                out.ok = false;
                return out;
            }
            chains[f] = std::move(chain);
        }
    }
    std::unordered_map<int, int> edge_vertex;  // mesh edge -> envelope vertex
    for (int v : sg.vertices) {
        if (g.vertices[v].kind == VertexKind::BoundaryInterp) edge_vertex[g.vertices[v].host] = lat(v);
    }
    auto corner = [&](int e) {
        auto [it, inserted] = edge_vertex.try_emplace(e, static_cast<int>(V.size()));
        if (inserted) V.push_back(edge_crossing(m, gamma, e, g.iso));
        return it->second;
    };

    std::vector<int> stack;
    std::unordered_map<int, char> seen;
    for (auto& [f, chain] : chains) {
        int t = m.face_tets(f)[0];
        if (seen.emplace(t, 1).second) stack.push_back(t);
    }
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        IsoPolygon poly = iso_polygon(m, gamma, t, g.iso);
        const int k = static_cast<int>(poly.edges.size());
        if (k < 3) {
            out.ok = false;
            return out;
        }
        std::vector<int> ring;
        for (int s = 0; s < k; ++s) {
            int ea = poly.edges[s], eb = poly.edges[(s + 1) % k];
            ring.push_back(corner(ea));
            int face = -1;
            for (int i = 0; i < 4; ++i) {
                const auto& fe = m.face_edges(m.tet_face(t, i));
                if (std::find(fe.begin(), fe.end(), ea) != fe.end() && std::find(fe.begin(), fe.end(), eb) != fe.end())
                    face = m.tet_face(t, i);
            }
            if (face < 0) {
                out.ok = false;
                return out;
            }
            if (!m.face_on_boundary(face)) {
                const auto& ft = m.face_tets(face);
                int nb = ft[0] == t ? ft[1] : ft[0];
                if (seen.emplace(nb, 1).second) stack.push_back(nb);
                continue;
            }
            auto it = chains.find(face);
            if (it == chains.end()) {
                out.ok = false;
                return out;
            }
            std::vector<int> inner(it->second.begin() + 1, it->second.end() - 1);
            if (g.vertices[it->second.front()].host != ea) std::reverse(inner.begin(), inner.end());
            for (int v : inner) ring.push_back(lat(v));
        }
        std::vector<Vec3> pts;
        for (int r : ring) pts.push_back(V[r]);
        if (newell(pts).dot(tet_grad(m, gamma, t)) > 0.0) std::reverse(ring.begin(), ring.end());
        if (ring.size() == 3) {
            out.tris.push_back({ring[0], ring[1], ring[2]});
        } else if (ring.size() == 4 && k == 4) {
            out.tris.push_back({ring[0], ring[1], ring[2]});
            out.tris.push_back({ring[0], ring[2], ring[3]});
        } else {
            centroid_fan(ring, V, out.tris);
        }
    }
    return out;
}

}  // namespace

std::vector<BoundaryLoop> oriented_loops(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg) {
    std::map<std::pair<int, int>, int> face_of;
    for (int e : sg.edges) {
        const auto& E = g.edges[e];
        if (E.kind == EdgeKind::Boundary) face_of[std::minmax(E.a, E.b)] = E.host_face;
    }
    std::vector<BoundaryLoop> out;
    for (const auto& cyc : sg.loops) {
        BoundaryLoop L;
        L.vertices = cyc;
        const size_t n = cyc.size();
        double score = 0.0;
        for (size_t i = 0; i < n; ++i) {
            int a = cyc[i], b = cyc[(i + 1) % n];
            const Vec3 &pa = g.vertices[a].position, &pb = g.vertices[b].position;
            L.length += (pb - pa).norm();
            auto it = face_of.find(std::minmax(a, b));
            if (it == face_of.end()) continue;
            Vec3 nrm = (g.vertices[a].normal + g.vertices[b].normal).normalized();
            score += (pb - pa).cross(nrm).dot(face_outward(mesh, it->second));
        }
        if (score < 0.0) std::reverse(L.vertices.begin() + 1, L.vertices.end());
        for (int v : L.vertices) {
            L.points.push_back(g.vertices[v].position);
            L.normals.push_back(g.vertices[v].normal.normalized());
        }
        out.push_back(std::move(L));
    }
    return out;
}

void cap_polygon(const std::vector<int>& index, std::vector<Vec3>& V, std::vector<std::array<int, 3>>& out) {
    const int n = static_cast<int>(index.size());
    if (n < 3) return;
    if (n == 3) {
        out.push_back({index[0], index[1], index[2]});
        return;
    }
    std::vector<Vec3> p3;
    for (int i : index) p3.push_back(V[i]);
    Vec3 N = newell(p3);
    double scale = 0.0;
    for (const auto& p : p3) scale = std::max(scale, (p - p3[0]).norm());
    if (N.norm() <= 1e-12 * scale * scale) {
        centroid_fan(index, V, out);
        return;
    }
    N.normalize();
    Vec3 u = any_perpendicular(N), w = N.cross(u);
    std::vector<Eigen::Vector2d> p(n);
    for (int i = 0; i < n; ++i) p[i] = {p3[i].dot(u), p3[i].dot(w)};
    const double eps = 1e-14 * scale * scale;
    auto cross2 = [&](int a, int b, int c) {
        Eigen::Vector2d x = p[b] - p[a], y = p[c] - p[a];
        return x.x() * y.y() - x.y() * y.x();
    };
    std::vector<int> prev(n), next(n);
    for (int i = 0; i < n; ++i) {
        prev[i] = (i + n - 1) % n;
        next[i] = (i + 1) % n;
    }
    std::vector<char> alive(n, 1), ear(n, 0);
    auto is_ear = [&](int i) {
        int a = prev[i], c = next[i];
        if (cross2(a, i, c) <= eps) return false;
        for (int k = next[c]; k != a; k = next[k]) {
            if ((p[k] - p[a]).norm() == 0.0 || (p[k] - p[i]).norm() == 0.0 || (p[k] - p[c]).norm() == 0.0) continue;
            if (cross2(a, i, k) >= -eps && cross2(i, c, k) >= -eps && cross2(c, a, k) >= -eps) return false;
        }
        return true;
    };
    for (int i = 0; i < n; ++i) ear[i] = is_ear(i);
    int remaining = n, head = 0;
    bool refreshed = false;
    while (remaining > 3) {
        int best = -1;
        double best_len = std::numeric_limits<double>::infinity();
        for (int k = 0, i = head; k < remaining; ++k, i = next[i]) {
            if (!ear[i]) continue;
            double len = (p[prev[i]] - p[next[i]]).squaredNorm();
            if (len < best_len) {
                best_len = len;
                best = i;
            }
        }
        if (best < 0) {
            if (!refreshed) {
                for (int k = 0, i = head; k < remaining; ++k, i = next[i]) ear[i] = is_ear(i);
                refreshed = true;
                continue;
            }
            std::vector<int> rest;
            for (int k = 0, i = head; k < remaining; ++k, i = next[i]) rest.push_back(index[i]);
            centroid_fan(rest, V, out);
            return;
        }
        refreshed = false;
        int a = prev[best], c = next[best];
        out.push_back({index[a], index[best], index[c]});
        alive[best] = 0;
        next[a] = c;
        prev[c] = a;
        if (head == best) head = c;
        --remaining;
        ear[a] = is_ear(a);
        ear[c] = is_ear(c);
    }
    int a = head, b = next[a], c = next[b];
    out.push_back({index[a], index[b], index[c]});
}

bool is_watertight(const std::vector<std::array<int, 3>>& tris) {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : tris) {
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            if (a == b) return false;
            ++directed[{a, b}];
        }
    }
    for (auto& [e, count] : directed) {
        if (count != 1) return false;
        auto it = directed.find({e.second, e.first});
        if (it == directed.end() || it->second != 1) return false;
    }
    return !tris.empty();
}

double signed_volume(const std::vector<Vec3>& V, const std::vector<std::array<int, 3>>& tris) {
    double vol = 0.0;
    for (const auto& t : tris) vol += V[t[0]].dot(V[t[1]].cross(V[t[2]]));
    return vol / 6.0;
}

double EnvelopeVolume::winding(const Vec3& p) const {
    double w = 0.0;
    for (const auto& t : triangles) w += triangle_winding(p, vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    return w;
}

bool EnvelopeVolume::contains(const Vec3& p) const {
    return bounds.contains(p) && winding(p) >= 0.5;
}

bool EnvelopeVolume::segment_hits_surface(const Vec3& p, const Vec3& q) const {
    if (bvh.empty()) return false;
    Aabb box;
    box.expand(p);
    box.expand(q);
    return bvh.any_overlap(box, [&](int t) {
        const auto& tri = triangles[t];
        return segment_intersects_triangle(p, q, vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    });
}

EnvelopeVolume sweep_envelope(const TetMesh& mesh, const ScalarField& gamma, const LatticeGraph& g,
                              const SubGraph& sg, const NozzleCone& cone, const EnvelopeOptions& opts) {
    cone.validate();
    EnvelopeVolume env;
    auto& V = env.vertices;
    auto& T = env.triangles;
    std::unordered_map<int, int> lat_id;
    std::function<int(int)> lat = [&](int v) {
        auto [it, inserted] = lat_id.try_emplace(v, static_cast<int>(V.size()));
        if (inserted) V.push_back(g.vertices[v].position);
        return it->second;
    };
    const double a = cone.angle_deg * std::numbers::pi / 180.0;
    const double ca = std::cos(a), sa = std::sin(a);
    const double step = opts.max_generator_step_deg;

    auto loops = oriented_loops(mesh, g, sg);
    std::vector<std::vector<int>> bottoms;
    for (const auto& L : loops) {
        const int n = static_cast<int>(L.points.size());
        if (n < 3) continue;
        struct Gen {
            int base;
            Vec3 k;
        };
        std::vector<Gen> gens;
        for (int i = 0; i < n; ++i) {
            const Vec3& P = L.points[i];
            const Vec3& nrm = L.normals[i];
            Vec3 tin = in_plane(P - L.points[(i + n - 1) % n], nrm);
            Vec3 tout = in_plane(L.points[(i + 1) % n] - P, nrm);
            Vec3 kin = generator(nrm, tin, ca, sa), kout = generator(nrm, tout, ca, sa);
            double th = angle_deg(kin, kout);
            int base = lat(L.vertices[i]);
            if (th <= step) {
                gens.push_back({base, generator(nrm, normalized_or(tin + tout, tin), ca, sa)});
                continue;
            }
            // corner fan: tangent swings from tin to tout about the normal
            double phi = std::atan2(tin.cross(tout).dot(nrm), tin.dot(tout));
            int m = static_cast<int>(std::ceil(th / step));
            while (angle_deg(kin, generator(nrm, Eigen::AngleAxisd(phi / m, nrm) * tin, ca, sa)) > step) ++m;
            for (int j = 0; j <= m; ++j)
                gens.push_back({base, generator(nrm, Eigen::AngleAxisd(phi * j / m, nrm) * tin, ca, sa)});
        }
        env.generators += static_cast<int>(gens.size());
        // generators end on the plane L above the loop centroid along the mean loop normal
        Vec3 c = Vec3::Zero(), nbar = Vec3::Zero();
        for (int i = 0; i < n; ++i) {
            c += L.points[i];
            nbar += L.normals[i];
        }
        c /= n;
        nbar = normalized_or(nbar, L.normals[0]);
        auto tip = [&](const Vec3& P, const Vec3& k) {
            double t = (cone.length - (P - c).dot(nbar)) / std::max(k.dot(nbar), kMinLean);
            return Vec3(P + std::max(t, 0.0) * k);
        };
        std::vector<int> gen_top(gens.size());
        for (size_t s = 0; s < gens.size(); ++s) {
            gen_top[s] = static_cast<int>(V.size());
            V.push_back(tip(V[gens[s].base], gens[s].k));
        }
        std::vector<int> top;
        std::vector<int> bottom;
        const size_t S = gens.size();
        for (size_t s = 0; s < S; ++s) {
            const Gen &g0 = gens[s], &g1 = gens[(s + 1) % S];
            std::vector<int> chain{gen_top[s]};
            double th = angle_deg(g0.k, g1.k);
            if (th > step) {
                int m = static_cast<int>(std::ceil(th / step));
                for (int j = 1; j < m; ++j) {
                    double t = static_cast<double>(j) / m;
                    Vec3 P = (1 - t) * V[g0.base] + t * V[g1.base];
                    Vec3 k = ((1 - t) * g0.k + t * g1.k).normalized();
                    chain.push_back(static_cast<int>(V.size()));
                    V.push_back(tip(P, k));
                }
            }
            chain.push_back(gen_top[(s + 1) % S]);
            const int m = static_cast<int>(chain.size()) - 1;
            for (int j = 0; j + 1 < static_cast<int>(chain.size()); ++j) top.push_back(chain[j]);
            if (g0.base == g1.base) {
                for (int j = 0; j < m; ++j) T.push_back({g0.base, chain[j + 1], chain[j]});
                continue;
            }
            bottom.push_back(g0.base);
            const int h = m / 2;
            for (int j = 0; j < h; ++j) T.push_back({g0.base, chain[j + 1], chain[j]});
            T.push_back({g0.base, g1.base, chain[h]});
            for (int j = h; j < m; ++j) T.push_back({g1.base, chain[j + 1], chain[j]});
        }
        // lid: fan from the loop centroid lifted by L along the mean loop normal
        int apex = static_cast<int>(V.size());
        V.push_back(c + cone.length * nbar);
        for (size_t i = 0; i < top.size(); ++i) T.push_back({apex, top[i], top[(i + 1) % top.size()]});
        bottoms.push_back(std::move(bottom));
    }
    if (T.empty()) return env;

    const size_t ring_tris = T.size(), ring_verts = V.size();
    Patch patch = bottom_patch(mesh, gamma, g, sg, lat, V);
    if (patch.ok) {
        T.insert(T.end(), patch.tris.begin(), patch.tris.end());
        patch.ok = is_watertight(T);
    }
    if (!patch.ok) {
        spdlog::warn("layer {} component {}: capping the envelope bottom with the boundary polygon", sg.layer,
                     sg.index);
        T.resize(ring_tris);
        V.resize(ring_verts);
        for (auto b : bottoms) {
            std::reverse(b.begin(), b.end());
            cap_polygon(b, V, T);
        }
        env.fallback_bottom = true;
    }
    if (!is_watertight(T)) spdlog::warn("layer {} component {}: envelope is not watertight", sg.layer, sg.index);

    std::vector<Aabb> boxes(T.size());
    for (size_t t = 0; t < T.size(); ++t) {
        for (int v : T[t]) boxes[t].expand(V[v]);
        env.bounds.expand(boxes[t]);
    }
    env.bvh = Bvh(boxes);
    return env;
}

bool collision_check(const EnvelopeVolume& env, const LatticeGraph& gj, const SubGraph& sj) {
    if (env.triangles.empty() || sj.vertices.empty() || !env.bounds.overlaps(sj.bounds)) return false;
    for (int e : sj.edges) {
        const auto& E = gj.edges[e];
        if (env.segment_hits_surface(gj.vertices[E.a].position, gj.vertices[E.b].position)) return true;
    }
    // no edge crosses the surface, so the connected sub-graph is entirely inside or outside
    return env.contains(gj.vertices[sj.vertices.front()].position);
}

std::vector<std::vector<int>> compute_pcgs(const TetMesh& mesh, const ScalarField& gamma,
                                           const std::vector<LatticeGraph>& layers, const SkeletonTree& tree,
                                           const NozzleCone& cone) {
    cone.validate();
    const int k = tree.size();
    std::vector<std::vector<int>> pcg(k);
    parallel_for(static_cast<size_t>(k), [&](size_t i) {
        const SubGraph& gi = tree.nodes[i];
        EnvelopeVolume env = sweep_envelope(mesh, gamma, layers[gi.graph], gi, cone);
        for (int j = 0; j < k; ++j) {
            if (j == static_cast<int>(i)) continue;
            const SubGraph& gj = tree.nodes[j];
            if (collision_check(env, layers[gj.graph], gj)) pcg[i].push_back(j);
        }
    });
    return pcg;
}

void write_ply(const EnvelopeVolume& env, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << env.vertices.size() << "\nproperty double x\nproperty double y\nproperty double z\n";
    out << "element face " << env.triangles.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
    out.precision(17);
    for (const auto& v : env.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : env.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace geoprint
