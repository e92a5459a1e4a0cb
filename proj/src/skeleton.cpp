#include "geoprint/skeleton.hpp"

#include "geoprint/errors.hpp"
#include "geoprint/parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace geoprint {

// ---------------------------------------------------------------- components

std::vector<std::vector<int>> boundary_loops(const LatticeGraph& g, const SubGraph& sg) {
    std::map<int, std::vector<int>> adj;
    for (int e : sg.edges) {
        const auto& E = g.edges[e];
        if (E.kind != EdgeKind::Boundary) continue;
        adj[E.a].push_back(E.b);
        adj[E.b].push_back(E.a);
    }
    std::vector<std::vector<int>> loops;
    std::set<int> done;
    for (auto& [start, nb] : adj) {
        if (done.count(start)) continue;
        std::vector<int> loop{start};
        done.insert(start);
        int prev = start, cur = nb.front();
        while (cur != start && !done.count(cur)) {
            loop.push_back(cur);
            done.insert(cur);
            const auto& n = adj[cur];
            int next = n.front() == prev ? (n.size() > 1 ? n[1] : n[0]) : n.front();
            prev = cur;
            cur = next;
        }
        if (cur != start) spdlog::warn("layer {}: boundary chain at vertex {} does not close", g.layer, start);
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<SubGraph> connected_components(const LatticeGraph& g, int graph_index) {
    const int n = static_cast<int>(g.vertices.size());
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        adj[g.edges[e].a].emplace_back(g.edges[e].b, e);
        adj[g.edges[e].b].emplace_back(g.edges[e].a, e);
    }
    std::vector<int> comp(n, -1);
    std::vector<SubGraph> out;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        SubGraph sg;
        sg.layer = g.layer;
        sg.graph = graph_index;
        sg.iso = g.iso;
        const int id = static_cast<int>(out.size());
        std::vector<int> stack{s};
        comp[s] = id;
        std::set<int> edges;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            sg.vertices.push_back(v);
            for (auto [w, e] : adj[v]) {
                edges.insert(e);
                if (comp[w] < 0) {
                    comp[w] = id;
                    stack.push_back(w);
                }
            }
        }
        std::sort(sg.vertices.begin(), sg.vertices.end());
        sg.edges.assign(edges.begin(), edges.end());
        for (int v : sg.vertices) {
            sg.centroid += g.vertices[v].position;
            sg.bounds.expand(g.vertices[v].position);
        }
        sg.centroid /= static_cast<double>(sg.vertices.size());
        out.push_back(std::move(sg));
    }
    auto min_pos = [&](const SubGraph& sg) {
        Vec3 best = g.vertices[sg.vertices.front()].position;
        for (int v : sg.vertices) {
            const Vec3& p = g.vertices[v].position;
            if (std::lexicographical_compare(p.data(), p.data() + 3, best.data(), best.data() + 3)) best = p;
        }
        return best;
    };
    std::vector<Vec3> keys;
    for (const auto& sg : out) keys.push_back(min_pos(sg));
    std::vector<int> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::lexicographical_compare(keys[a].data(), keys[a].data() + 3, keys[b].data(), keys[b].data() + 3);
    });
    std::vector<SubGraph> sorted;
    for (int i : order) {
        sorted.push_back(std::move(out[i]));
        sorted.back().index = static_cast<int>(sorted.size());
        sorted.back().loops = boundary_loops(g, sorted.back());
    }
    return sorted;
}

// ---------------------------------------------------------------- surface tracing

SurfaceTracer::SurfaceTracer(const TetMesh& mesh, SurfaceMesh surface, const ScalarField& field)
    : mesh_(&mesh), surface_(std::move(surface)), field_(&field) {
    face_tri_.assign(mesh.num_faces(), -1);
    vertex_tris_.resize(mesh.num_vertices());
    for (int t = 0; t < surface_.size(); ++t) {
        face_tri_[surface_.face[t]] = t;
        for (int v : surface_.tris[t]) vertex_tris_[v].push_back(t);
    }
}

int SurfaceTracer::tri_of_face(int face) const { return face < 0 ? -1 : face_tri_[face]; }

Vec3 SurfaceTracer::bary_gradient(int t, int k) const {
    const auto& T = surface_.tris[t];
    const Vec3& b = mesh_->vertex(T[(k + 1) % 3]);
    const Vec3& c = mesh_->vertex(T[(k + 2) % 3]);
    return surface_.normal[t].cross(c - b) / (2.0 * surface_.area[t]);
}

Vec3 SurfaceTracer::gradient(int t) const {
    Vec3 g = Vec3::Zero();
    for (int k = 0; k < 3; ++k) g += (*field_)[surface_.tris[t][k]] * bary_gradient(t, k);
    return g;
}

double SurfaceTracer::value(int t, const Vec3& p) const {
    const auto& T = surface_.tris[t];
    double v = 0;
    for (int k = 0; k < 3; ++k) v += (*field_)[T[k]] * (1.0 + bary_gradient(t, k).dot(p - mesh_->vertex(T[k])));
    return v;
}

std::optional<SurfaceTracer::Hit> SurfaceTracer::trace(int tri, const Vec3& start, double target, bool ascend,
                                                       int max_steps) const {
    const ScalarField& F = *field_;
    const double sgn = ascend ? 1.0 : -1.0;
    auto reached = [&](double v) { return sgn * (v - target) >= 0.0; };
    auto tri_with_edge = [&](int a, int b) {
        for (int t : vertex_tris_[a]) {
            const auto& T = surface_.tris[t];
            if (T[0] == b || T[1] == b || T[2] == b) return t;
        }
        return -1;
    };
    // walks the mesh edge a -> b; returns a hit when the target level lies on it
    auto along_edge = [&](const Vec3& from, double v_from, int b, int t, int steps) -> std::optional<Hit> {
        if (reached(F[b])) {
            double s = (target - v_from) / (F[b] - v_from);
            return Hit{t, from + s * (mesh_->vertex(b) - from), steps};
        }
        return std::nullopt;
    };

    int t = tri;
    Vec3 p = start;
    int vertex = -1;  // >= 0 while standing on a mesh vertex
    for (int step = 0; step < max_steps; ++step) {
        if (vertex >= 0) {
            const Vec3& pv = mesh_->vertex(vertex);
            if (reached(F[vertex])) return Hit{vertex_tris_[vertex].front(), pv, step};
            int best = -1;
            double best_g = 0;
            for (int s : vertex_tris_[vertex]) {
                Vec3 d = sgn * gradient(s);
                const auto& T = surface_.tris[s];
                bool inward = true;
                for (int k = 0; k < 3; ++k)
                    if (T[k] != vertex && bary_gradient(s, k).dot(d) < 0.0) inward = false;
                if (inward && d.norm() > best_g) {
                    best_g = d.norm();
                    best = s;
                }
            }
            if (best >= 0 && best_g > 1e-14) {
                t = best;
                p = pv;
                vertex = -1;
                continue;
            }
            int next = -1;
            double slope = 0;
            for (int s : vertex_tris_[vertex])
                for (int w : surface_.tris[s]) {
                    if (w == vertex) continue;
                    double sl = sgn * (F[w] - F[vertex]) / (mesh_->vertex(w) - pv).norm();
                    if (sl > slope) {
                        slope = sl;
                        next = w;
                    }
                }
            if (next < 0) return std::nullopt;  // local extremum
            if (auto h = along_edge(pv, F[vertex], next, tri_with_edge(vertex, next), step)) return h;
            vertex = next;
            continue;
        }

        double v = value(t, p);
        if (reached(v)) return Hit{t, p, step};
        Vec3 g = gradient(t);
        double g2 = g.squaredNorm();
        if (g2 < 1e-28) return std::nullopt;
        Vec3 d = sgn * g;
        double t_target = (target - v) / (sgn * g2);
        double t_exit = std::numeric_limits<double>::infinity();
        int k_exit = -1;
        const auto& T = surface_.tris[t];
        double lambda[3];
        for (int k = 0; k < 3; ++k) {
            lambda[k] = std::max(0.0, 1.0 + bary_gradient(t, k).dot(p - mesh_->vertex(T[k])));
            double r = bary_gradient(t, k).dot(d);
            if (r < 0.0 && lambda[k] / -r < t_exit) {
                t_exit = lambda[k] / -r;
                k_exit = k;
            }
        }
        if (k_exit < 0) return std::nullopt;
        if (t_target <= t_exit) return Hit{t, p + t_target * d, step};
        p += t_exit * d;
        int a = T[(k_exit + 1) % 3], b = T[(k_exit + 2) % 3];
        // landed (numerically) on a corner
        double la = 1.0 + bary_gradient(t, (k_exit + 1) % 3).dot(p - mesh_->vertex(a));
        double lb = 1.0 + bary_gradient(t, (k_exit + 2) % 3).dot(p - mesh_->vertex(b));
        if (la > 1.0 - 1e-9) {
            vertex = a;
            continue;
        }
        if (lb > 1.0 - 1e-9) {
            vertex = b;
            continue;
        }
        int n = surface_.neighbor[t][k_exit];
        const auto& N = surface_.tris[n];
        int m = 0;
        while (N[m] == a || N[m] == b) ++m;
        Vec3 dn = sgn * gradient(n);
        if (bary_gradient(n, m).dot(dn) > 1e-12 * dn.norm()) {
            t = n;
            continue;
        }
        // crease: both sides push into the shared edge, so follow the edge itself
        int up = sgn * (F[a] - F[b]) > 0 ? a : b;
        double vp = value(t, p);
        if (sgn * (F[up] - vp) <= 0) return std::nullopt;
        if (auto h = along_edge(p, vp, up, t, step)) return h;
        vertex = up;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- adjacency

namespace {

/// Component of the upper/lower layer owning each boundary face chord.
std::map<int, int> face_owner(const LatticeGraph& g, const std::vector<SubGraph>& parts) {
    std::map<int, int> owner;
    for (size_t j = 0; j < parts.size(); ++j)
        for (int e : parts[j].edges)
            if (g.edges[e].kind == EdgeKind::Boundary) owner[g.edges[e].host_face] = static_cast<int>(j);
    return owner;
}

int lookup(const std::map<int, int>& owner, const SurfaceTracer& tr, int tri) {
    const auto& s = tr.surface();
    if (auto it = owner.find(s.face[tri]); it != owner.end()) return it->second;
    for (int n : s.neighbor[tri])
        if (auto it = owner.find(s.face[n]); it != owner.end()) return it->second;
    return -1;
}

/// Components reached by tracing from every boundary chord of `from`.
std::set<int> traced(const SurfaceTracer& tr, const LatticeGraph& g, const SubGraph& from, double target,
                     bool ascend, const std::map<int, int>& owner) {
    std::set<int> hit;
    std::set<int> faces;
    for (int e : from.edges) {
        const auto& E = g.edges[e];
        if (E.kind != EdgeKind::Boundary || !faces.insert(E.host_face).second) continue;
        int tri = tr.tri_of_face(E.host_face);
        if (tri < 0) continue;
        Vec3 mid = 0.5 * (g.vertices[E.a].position + g.vertices[E.b].position);
        if (auto h = tr.trace(tri, mid, target, ascend)) {
            int k = lookup(owner, tr, h->tri);
            if (k >= 0) hit.insert(k);
        }
    }
    return hit;
}

}  // namespace

std::vector<std::vector<Adjacency>> layer_adjacency(const TetMesh& mesh, const ScalarField& gamma,
                                                    const SurfaceTracer& tracer, const LatticeGraph& lower,
                                                    const std::vector<SubGraph>& lp, const LatticeGraph& upper,
                                                    const std::vector<SubGraph>& up) {
    std::vector<std::vector<Adjacency>> adj(lp.size(), std::vector<Adjacency>(up.size()));
    auto upper_owner = face_owner(upper, up);
    auto lower_owner = face_owner(lower, lp);
    for (size_t j = 0; j < lp.size(); ++j)
        for (int k : traced(tracer, lower, lp[j], upper.iso, true, upper_owner)) adj[j][k].ascent = true;
    for (size_t k = 0; k < up.size(); ++k)
        for (int j : traced(tracer, upper, up[k], lower.iso, false, lower_owner)) adj[j][k].descent = true;

    // slab connectivity: tets whose gamma range meets (lower.iso, upper.iso), joined across faces
    const double lo = lower.iso, hi = upper.iso;
    std::vector<int> label(mesh.num_tets(), -1);
    auto in_slab = [&](int t) {
        const auto& T = mesh.tet(t);
        double a = std::min({gamma[T[0]], gamma[T[1]], gamma[T[2]], gamma[T[3]]});
        double b = std::max({gamma[T[0]], gamma[T[1]], gamma[T[2]], gamma[T[3]]});
        return a < hi && b > lo;
    };
    int next = 0;
    for (int s = 0; s < mesh.num_tets(); ++s) {
        if (label[s] >= 0 || !in_slab(s)) continue;
        std::vector<int> stack{s};
        label[s] = next;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int i = 0; i < 4; ++i) {
                const auto& ft = mesh.face_tets(mesh.tet_face(t, i));
                int o = ft[0] == t ? ft[1] : ft[0];
                if (o >= 0 && label[o] < 0 && in_slab(o)) {
                    label[o] = next;
                    stack.push_back(o);
                }
            }
        }
        ++next;
    }
    auto labels_of = [&](const LatticeGraph& g, const SubGraph& sg) {
        std::set<int> out;
        for (int v : sg.vertices) out.insert(label[g.vertices[v].host_tet]);
        return out;
    };
    std::vector<std::set<int>> ul;
    for (const auto& s : up) ul.push_back(labels_of(upper, s));
    for (size_t j = 0; j < lp.size(); ++j) {
        auto ll = labels_of(lower, lp[j]);
        for (size_t k = 0; k < up.size(); ++k)
            for (int l : ll)
                if (l >= 0 && ul[k].count(l)) {
                    adj[j][k].band = true;
                    break;
                }
    }
    return adj;
}

// ---------------------------------------------------------------- tree

std::vector<int> SkeletonTree::roots() const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
        if (lower[i].empty()) r.push_back(i);
    return r;
}

std::vector<int> SkeletonTree::bifurcations() const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
        if (upper[i].size() > 1) r.push_back(i);
    return r;
}

int SkeletonTree::find(int layer, int index) const {
    for (int i = 0; i < size(); ++i)
        if (nodes[i].layer == layer && nodes[i].index == index) return i;
    return -1;
}

SkeletonTree build_skeleton_tree(const TetMesh& mesh, const ScalarField& gamma,
                                 const std::vector<LatticeGraph>& layers) {
    SkeletonTree tree;
    std::vector<std::vector<SubGraph>> parts(layers.size());
    parallel_for(layers.size(), [&](size_t l) { parts[l] = connected_components(layers[l], static_cast<int>(l)); });
    tree.layer_nodes.resize(layers.size());
    for (size_t l = 0; l < layers.size(); ++l)
        for (auto& sg : parts[l]) {
            tree.layer_nodes[l].push_back(tree.size());
            tree.nodes.push_back(sg);
        }
    tree.upper.resize(tree.size());
    tree.lower.resize(tree.size());
    if (layers.size() < 2) return tree;

    SurfaceTracer tracer(mesh, extract_boundary(mesh), gamma);
    std::vector<std::vector<std::vector<Adjacency>>> adj(layers.size() - 1);
    parallel_for(layers.size() - 1, [&](size_t l) {
        adj[l] = layer_adjacency(mesh, gamma, tracer, layers[l], parts[l], layers[l + 1], parts[l + 1]);
    });
    for (size_t l = 0; l + 1 < layers.size(); ++l)
        for (size_t j = 0; j < parts[l].size(); ++j)
            for (size_t k = 0; k < parts[l + 1].size(); ++k) {
                const Adjacency& a = adj[l][j][k];
                if (a.ascent != a.descent)
                    spdlog::debug("layers {}/{}: traces disagree for components {} and {}; band says {}",
                                  layers[l].layer, layers[l + 1].layer, j + 1, k + 1, a.band);
                if (!a.adjacent()) continue;
                int lo = tree.layer_nodes[l][j], hi = tree.layer_nodes[l + 1][k];
                tree.edges.emplace_back(lo, hi);
                tree.upper[lo].push_back(hi);
                tree.lower[hi].push_back(lo);
            }
    for (size_t l = 1; l < layers.size(); ++l)
        for (int n : tree.layer_nodes[l])
            if (tree.lower[n].empty()) {
                const auto& sg = tree.nodes[n];
                throw ValidationError("sub-graph G_{" + std::to_string(sg.layer) + "," + std::to_string(sg.index) +
                                          "} has no lower node (floating material or failed adjacency)",
                                      n);
            }
    return tree;
}

std::string to_dot(const SkeletonTree& tree) {
    std::ostringstream out;
    out << "digraph skeleton {\n  rankdir=BT;\n";
    for (int i = 0; i < tree.size(); ++i)
        out << "  n" << i << " [label=\"G" << tree.nodes[i].layer << "," << tree.nodes[i].index << "\"];\n";
    for (auto [a, b] : tree.edges) out << "  n" << a << " -> n" << b << ";\n";
    out << "}\n";
    return out.str();
}

void write_dot(const SkeletonTree& tree, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_dot(tree);
}

}  // namespace geoprint
