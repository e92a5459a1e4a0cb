#include "geoprint/pathplan.hpp"

#include "geoprint/errors.hpp"
#include "geoprint/parallel.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

namespace geoprint {

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

/// Degree of every parent-graph vertex counting only `edges`.
std::unordered_map<int, int> degrees_of(const LatticeGraph& g, const std::vector<int>& edges) {
    std::unordered_map<int, int> deg;
    for (int e : edges) {
        ++deg[g.edges[e].a];
        ++deg[g.edges[e].b];
    }
    return deg;
}

}  // namespace

TrimmedGraph trim_to_eulerian(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg) {
    auto deg = degrees_of(g, sg.edges);
    std::map<std::pair<int, int>, int> boundary;
    for (int e : sg.edges) {
        if (g.edges[e].kind == EdgeKind::Boundary) boundary[std::minmax(g.edges[e].a, g.edges[e].b)] = e;
    }
    std::set<int> removed;
    for (const auto& loop : oriented_loops(mesh, g, sg)) {
        const int n = static_cast<int>(loop.vertices.size());
        std::vector<int> odd;
        for (int i = 0; i < n; ++i) {
            if (deg[loop.vertices[i]] == 3) odd.push_back(i);
        }
        if (odd.empty()) continue;
        if (odd.size() % 2) {
            throw ValidationError(fmt::format("layer {} sub-graph {}: odd number of degree-3 vertices on a loop",
                                              sg.layer, sg.index),
                                  loop.vertices[odd.front()]);
        }
        auto first = std::min_element(odd.begin(), odd.end(), [&](int a, int b) {
            return lex_less(g.vertices[loop.vertices[a]].position, g.vertices[loop.vertices[b]].position);
        });
        std::rotate(odd.begin(), first, odd.end());
        const size_t m = odd.size();
        for (size_t k = 1; k < m; k += 2) {
            for (int p = odd[k]; p != odd[(k + 1) % m]; p = (p + 1) % n) {
                auto it = boundary.find(std::minmax(loop.vertices[p], loop.vertices[(p + 1) % n]));
                if (it == boundary.end()) throw ValidationError("boundary loop step is not a boundary edge");
                removed.insert(it->second);
            }
        }
    }
    TrimmedGraph out;
    out.removed.assign(removed.begin(), removed.end());
    for (int e : sg.edges) {
        if (!removed.count(e)) out.edges.push_back(e);
    }
    for (const auto& [v, d] : degrees_of(g, out.edges)) {
        if (d % 2) throw ValidationError(fmt::format("vertex {} keeps odd degree {} after trimming", v, d), v);
    }
    return out;
}

namespace {

/// Fleury walk restricted to turning continuations at crossings, with splicing of leftover circuits.
class TurningFleury {
public:
    TurningFleury(const LatticeGraph& g, const std::vector<int>& edges) : g_(g), edges_(edges) {
        for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
            for (int v : {g.edges[edges[i]].a, g.edges[edges[i]].b}) {
                auto [it, fresh] = local_.try_emplace(v, static_cast<int>(verts_.size()));
                if (fresh) {
                    verts_.push_back(v);
                    adj_.emplace_back();
                }
                adj_[it->second].push_back(i);
            }
        }
        used_.assign(edges.size(), 0);
        for (const auto& a : adj_) {
            if (a.size() % 2) throw ValidationError("Euler tour needs even degrees");
        }
    }

    int local(int v) const { return local_.at(v); }
    int parent(int lv) const { return verts_[lv]; }
    int degree(int lv) const { return static_cast<int>(adj_[lv].size()); }
    int vertex_count() const { return static_cast<int>(verts_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool used(int le) const { return used_[le]; }
    int other(int le, int lv) const {
        const auto& e = g_.edges[edges_[le]];
        return local_.at(e.a) == lv ? local_.at(e.b) : local_.at(e.a);
    }
    EdgeKind kind(int le) const { return g_.edges[edges_[le]].kind; }

    /// Local vertices of the component of `lv` over all edges.
    std::vector<int> component(int lv) const {
        std::vector<int> out{lv};
        std::vector<char> seen(verts_.size(), 0);
        seen[lv] = 1;
        for (size_t i = 0; i < out.size(); ++i) {
            for (int le : adj_[out[i]]) {
                int u = other(le, out[i]);
                if (!seen[u]) {
                    seen[u] = 1;
                    out.push_back(u);
                }
            }
        }
        return out;
    }

    /// Closed walk from `start` covering every unused edge of its component.
    Tour tour(int start) {
        auto [vs, es] = walk(start, -1);
        for (;;) {
            size_t at = vs.size();
            for (size_t i = 0; i < vs.size() && at == vs.size(); ++i) {
                if (remaining(vs[i]) > 0) at = i;
            }
            if (at == vs.size()) break;
            int entry = at > 0 ? es[at - 1] : es.back();
            int exit = at < es.size() ? es[at] : es.front();
            auto [sv, se] = walk(vs[at], static_cast<int>(kind(entry)));
            if (kind(se.back()) == kind(exit) && kind(se.front()) != kind(exit) && kind(se.back()) != kind(entry)) {
                std::reverse(sv.begin(), sv.end());
                std::reverse(se.begin(), se.end());
            }
            vs.insert(vs.begin() + static_cast<long>(at) + 1, sv.begin() + 1, sv.end());
            es.insert(es.begin() + static_cast<long>(at), se.begin(), se.end());
        }
        Tour t;
        for (int v : vs) t.vertices.push_back(verts_[v]);
        for (int e : es) t.edges.push_back(edges_[e]);
        return t;
    }

private:
    int remaining(int lv) const {
        int r = 0;
        for (int le : adj_[lv]) r += !used_[le];
        return r;
    }

    /// After tentatively removing `le` from v, is its far end still reachable from v?
    bool is_bridge(int le, int v) {
        int target = other(le, v);
        used_[le] = 1;
        std::vector<char> seen(verts_.size(), 0);
        std::vector<int> stack{v};
        seen[v] = 1;
        bool reach = false;
        while (!stack.empty() && !reach) {
            int x = stack.back();
            stack.pop_back();
            for (int e : adj_[x]) {
                if (used_[e]) continue;
                int y = other(e, x);
                if (y == target) {
                    reach = true;
                    break;
                }
                if (!seen[y]) {
                    seen[y] = 1;
                    stack.push_back(y);
                }
            }
        }
        used_[le] = 0;
        return !reach;
    }

    std::pair<std::vector<int>, std::vector<int>> walk(int start, int in_kind) {
        std::vector<int> vs{start}, es;
        int v = start;
        for (;;) {
            std::vector<int> cand;
            for (int le : adj_[v]) {
                if (!used_[le]) cand.push_back(le);
            }
            if (cand.empty()) break;
            if (degree(v) == 4 && in_kind >= 0) {
                std::vector<int> turn;
                for (int le : cand) {
                    if (static_cast<int>(kind(le)) != in_kind) turn.push_back(le);
                }
                if (!turn.empty()) cand = std::move(turn);
            }
            int pick = cand.front();
            if (cand.size() > 1) {
                for (int le : cand) {
                    if (!is_bridge(le, v)) {
                        pick = le;
                        break;
                    }
                }
            }
            used_[pick] = 1;
            es.push_back(pick);
            in_kind = static_cast<int>(kind(pick));
            v = other(pick, v);
            vs.push_back(v);
        }
        return {vs, es};
    }

    const LatticeGraph& g_;
    const std::vector<int>& edges_;
    std::unordered_map<int, int> local_;
    std::vector<int> verts_;
    std::vector<std::vector<int>> adj_;
    std::vector<char> used_;
};

/// Inward offset of a closed polyline: edge i runs P[i] -> P[i+1] with outward normal o[i]. Offset
/// edges that flip direction (short edges near corners) are dropped and their neighbours joined.
/// Returns the start point of every edge's offset; dropped edges take the next surviving start.
std::vector<Vec3> offset_vertices(const std::vector<Vec3>& P, const std::vector<Vec3>& o, double w) {
    const int n = static_cast<int>(P.size());
    std::vector<Vec3> dir(n);
    for (int i = 0; i < n; ++i) dir[i] = normalized_or(P[(i + 1) % n] - P[i], Vec3::Zero());
    std::vector<int> live;
    for (int i = 0; i < n; ++i) {
        if (dir[i].squaredNorm() > 0) live.push_back(i);
    }
    // start of offset edge b given the previous surviving edge a
    auto join = [&](int a, int b) -> Vec3 {
        Vec3 pa = P[a] - w * o[a], pb = P[b] - w * o[b];
        Vec3 cr = dir[a].cross(dir[b]);
        if (cr.squaredNorm() < 1e-12) return pb;
        Vec3 r = pb - pa;
        double d = dir[a].dot(dir[b]);
        double denom = 1 - d * d;
        double s = (r.dot(dir[a]) - d * r.dot(dir[b])) / denom;
        double t = (d * r.dot(dir[a]) - r.dot(dir[b])) / denom;
        Vec3 x = 0.5 * (pa + s * dir[a] + pb + t * dir[b]);
        // limit the miter at sharp corners of adjacent edges
        if ((a + 1) % n == b && (x - P[b]).norm() > 4 * w) x = P[b] + 4 * w * (x - P[b]).normalized();
        return x;
    };
    std::vector<Vec3> start(n);
    for (bool changed = true; changed && live.size() >= 3;) {
        changed = false;
        const size_t m = live.size();
        for (size_t k = 0; k < m; ++k) start[live[k]] = join(live[(k + m - 1) % m], live[k]);
        for (size_t k = 0; k < m; ++k) {
            int a = live[k], b = live[(k + 1) % m];
            if ((start[b] - start[a]).dot(dir[a]) < 0) {
                live.erase(live.begin() + static_cast<long>(k));
                changed = true;
                break;
            }
        }
    }
    std::vector<Vec3> q(n);
    if (live.empty()) return std::vector<Vec3>(P.begin(), P.end());
    std::vector<char> alive(n, 0);
    for (int i : live) alive[i] = 1;
    for (int i = 0; i < n; ++i) {
        int j = i;
        while (!alive[j]) j = (j + 1) % n;
        q[i] = start[j];
    }
    return q;
}

}  // namespace

std::vector<Tour> euler_tour(const LatticeGraph& g, const std::vector<int>& edges, const Vec3& from) {
    TurningFleury f(g, edges);
    std::vector<char> done(f.vertex_count(), 0);
    std::vector<Tour> out;
    Vec3 cur = from;
    for (;;) {
        // nearest start over all untoured components, degree-2 vertices first
        int best = -1;
        double best_d = 0;
        bool best_two = false;
        for (int v = 0; v < f.vertex_count(); ++v) {
            if (done[v]) continue;
            bool two = f.degree(v) == 2;
            double d = (g.vertices[f.parent(v)].position - cur).squaredNorm();
            if (best < 0 || (two && !best_two) || (two == best_two && d < best_d)) {
                best = v;
                best_d = d;
                best_two = two;
            }
        }
        if (best < 0) break;
        for (int v : f.component(best)) done[v] = 1;
        out.push_back(f.tour(best));
        cur = g.vertices[out.back().vertices.back()].position;
    }
    return out;
}

double Perimeter::length() const {
    double s = 0;
    for (size_t i = 0; i < points.size(); ++i)
        s += (points[(i + 1) % points.size()].position - points[i].position).norm();
    return s;
}

std::vector<Perimeter> support_perimeter(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg,
                                         const TrimmedGraph& trimmed, double w, double l) {
    std::set<std::pair<int, int>> removed;
    for (int e : trimmed.removed) removed.insert(std::minmax(g.edges[e].a, g.edges[e].b));
    std::vector<Perimeter> out;
    for (const auto& loop : oriented_loops(mesh, g, sg)) {
        const int n = static_cast<int>(loop.points.size());
        const auto& P = loop.points;
        std::vector<Vec3> o(n);
        for (int i = 0; i < n; ++i) {
            Vec3 nb = normalized_or(loop.normals[i] + loop.normals[(i + 1) % n], Vec3(0, 0, 1));
            o[i] = normalized_or((P[(i + 1) % n] - P[i]).cross(nb), i > 0 ? o[i - 1] : Vec3(1, 0, 0));
        }
        std::vector<Vec3> inward(n);
        for (int i = 0; i < n; ++i) inward[i] = -normalized_or(o[(i + n - 1) % n] + o[i], o[i]);
        auto q = offset_vertices(P, o, w);
        auto cut = [&](int i) { return removed.count(std::minmax(loop.vertices[i], loop.vertices[(i + 1) % n])) > 0; };
        auto host = [&](int i) { return g.vertices[loop.vertices[i % n]].host_tet; };
        auto clearance = [&](const Vec3& x) {
            double d = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) d = std::min(d, point_segment_distance(x, P[i], P[(i + 1) % n]));
            return d;
        };

        // begin at a vertex that starts a removed run, or anywhere when nothing was removed
        int r0 = 0;
        for (int i = 0; i < n; ++i) {
            if (cut(i) && !cut((i + n - 1) % n)) {
                r0 = i;
                break;
            }
        }
        Perimeter per;
        for (int step = 0; step < n;) {
            int i = (r0 + step) % n;
            per.points.push_back({q[i], host(i)});
            if (!cut(i)) {
                ++step;
                continue;
            }
            int len = 0;
            while (len < n && cut((i + len) % n)) ++len;
            std::vector<int> idx;
            for (int k = 0; k <= len; ++k) idx.push_back((i + k) % n);
            std::vector<double> arc{0.0};
            for (int k = 0; k < len; ++k) arc.push_back(arc.back() + (q[idx[k + 1]] - q[idx[k]]).norm());
            double s = arc.back();
            int teeth = s > 0 ? static_cast<int>(std::ceil(s / (2 * l))) : 0;
            auto at = [&](double t) {
                size_t k = std::upper_bound(arc.begin(), arc.end(), t) - arc.begin();
                k = std::clamp<size_t>(k, 1, arc.size() - 1);
                double u = arc[k] > arc[k - 1] ? (t - arc[k - 1]) / (arc[k] - arc[k - 1]) : 0.0;
                Vec3 p = (1 - u) * q[idx[k - 1]] + u * q[idx[k]];
                Vec3 d = normalized_or((1 - u) * inward[idx[k - 1]] + u * inward[idx[k]], inward[idx[k]]);
                return std::make_tuple(p, d, u < 0.5 ? host(idx[k - 1]) : host(idx[k]));
            };
            std::vector<PerimeterPoint> zig;
            bool ok = true;
            for (int t = 0; t < teeth && ok; ++t) {
                auto [p, d, h] = at((t + 0.5) * s / teeth);
                Vec3 apex = p + l * d;
                if (clearance(apex) < 0.5 * w) ok = false;
                zig.push_back({apex, h});
                if (t + 1 < teeth) {
                    auto [v, dv, hv] = at((t + 1.0) * s / teeth);
                    zig.push_back({v, hv});
                }
            }
            if (ok) {
                per.points.insert(per.points.end(), zig.begin(), zig.end());
                per.teeth.push_back(teeth);
            } else {
                spdlog::warn("layer {} sub-graph {}: support teeth leave the layer, bridging straight", sg.layer,
                             sg.index);
                for (int k = 1; k < len; ++k) per.points.push_back({q[idx[k]], host(idx[k])});
                per.teeth.push_back(0);
            }
            step += len;
        }
        auto same = [](const PerimeterPoint& a, const PerimeterPoint& b) {
            return (a.position - b.position).squaredNorm() < 1e-24;
        };
        per.points.erase(std::unique(per.points.begin(), per.points.end(), same), per.points.end());
        while (per.points.size() > 1 && same(per.points.front(), per.points.back())) per.points.pop_back();
        out.push_back(std::move(per));
    }
    return out;
}

LayerThickness::LayerThickness(std::vector<std::pair<Vec3, Vec3>> prev_segments, double phi, double lambda,
                               double z_base)
    : segs_(std::move(prev_segments)), limit_(lambda * phi), z_base_(z_base) {
    std::vector<Aabb> boxes;
    for (const auto& [a, b] : segs_) {
        Aabb box;
        box.expand(a);
        box.expand(b);
        boxes.push_back(box);
    }
    if (!boxes.empty()) bvh_ = Bvh(boxes);
}

double LayerThickness::at(const Vec3& p) const {
    double h;
    if (segs_.empty()) {
        h = p.z() - z_base_;
    } else {
        h = bvh_.nearest(p, [&](int i) { return point_segment_distance(p, segs_[i].first, segs_[i].second); })
                .second;
    }
    return std::min(h, limit_);
}

std::vector<double> layer_thickness(const LatticeGraph& g, const SubGraph& sg, const LatticeGraph* prev,
                                    double lambda, double z_base) {
    std::vector<std::pair<Vec3, Vec3>> segs;
    if (prev) {
        for (const auto& e : prev->edges) segs.emplace_back(prev->vertices[e.a].position, prev->vertices[e.b].position);
    }
    LayerThickness lt(std::move(segs), g.interval, lambda, z_base);
    std::vector<double> h;
    for (int v : sg.vertices) h.push_back(lt.at(g.vertices[v].position));
    return h;
}

double filament_feed(double h, double w, double f_p, double mu, double r_m) {
    return mu * w * h * f_p / (std::numbers::pi * r_m * r_m);
}

double ToolPath::extrusion_length() const {
    double s = 0;
    for (size_t i = 1; i < waypoints.size(); ++i) {
        if (waypoints[i].extrude) s += (waypoints[i].position - waypoints[i - 1].position).norm();
    }
    return s;
}

double ToolPath::travel_length() const {
    double s = 0;
    for (size_t i = 1; i < waypoints.size(); ++i) {
        if (!waypoints[i].extrude) s += (waypoints[i].position - waypoints[i - 1].position).norm();
    }
    return s;
}

int ToolPath::layer_count() const {
    std::set<int> layers;
    for (const auto& w : waypoints) {
        if (w.subgraph >= 0) layers.insert(w.layer);
    }
    return static_cast<int>(layers.size());
}

ToolPath plan_part(const TetMesh& mesh, const FieldSet& fields, const std::vector<LatticeGraph>& layers,
                   const SkeletonTree& tree, const PrintSequence& seq, const PlanParams& prm,
                   std::vector<SubgraphPlan>* detail) {
    const int k = tree.size();
    if (static_cast<int>(seq.order.size()) != k) throw ValidationError("sequence does not cover the tree");
    std::vector<SubgraphPlan> plans(k);
    parallel_for(k, [&](size_t i) {
        const auto& n = tree.nodes[i];
        plans[i].trimmed = trim_to_eulerian(mesh, layers[n.graph], n);
        plans[i].perimeters = support_perimeter(mesh, layers[n.graph], n, plans[i].trimmed, prm.w, prm.tooth);
    });

    // deposited segments per layer graph: trimmed lattice plus perimeters
    std::vector<std::vector<std::pair<Vec3, Vec3>>> deposit(layers.size());
    for (int i = 0; i < k; ++i) {
        const auto& n = tree.nodes[i];
        const auto& g = layers[n.graph];
        auto& d = deposit[n.graph];
        for (int e : plans[i].trimmed.edges) d.emplace_back(g.vertices[g.edges[e].a].position, g.vertices[g.edges[e].b].position);
        for (const auto& per : plans[i].perimeters) {
            for (size_t j = 0; j < per.points.size(); ++j)
                d.emplace_back(per.points[j].position, per.points[(j + 1) % per.points.size()].position);
        }
    }
    const double z_base = mesh.bounds().lo.z();
    std::vector<std::optional<LayerThickness>> thick(layers.size());
    std::vector<char> wanted(layers.size(), 0);
    for (const auto& n : tree.nodes) wanted[n.graph] = 1;
    parallel_for(layers.size(), [&](size_t gi) {
        if (!wanted[gi]) return;
        thick[gi].emplace(gi > 0 ? deposit[gi - 1] : std::vector<std::pair<Vec3, Vec3>>{}, layers[gi].interval,
                          prm.lambda, z_base);
    });

    ToolPath path;
    Aabb printed;
    auto orient = [&](int tet) { return normalized_or(fields.frames[tet].gamma, Vec3(0, 0, 1)); };
    for (int s = 0; s < k; ++s) {
        const int id = seq.order[s];
        const auto& n = tree.nodes[id];
        const auto& g = layers[n.graph];
        const auto& lt = *thick[n.graph];
        auto emit = [&](const Vec3& p, int tet, bool extrude) {
            Waypoint w;
            w.position = p;
            w.orientation = orient(tet);
            w.h = lt.at(p);
            w.w = prm.w;
            w.f_p = prm.f_p;
            w.f_m = extrude ? filament_feed(w.h, prm.w, prm.f_p, prm.mu, prm.r_m) : 0.0;
            w.extrude = extrude;
            w.layer = n.layer;
            w.subgraph = id;
            path.waypoints.push_back(w);
        };
        auto& pers = plans[id].perimeters;
        Vec3 cur = path.waypoints.empty() ? n.centroid : path.waypoints.back().position;
        // every perimeter starts at its point nearest the current position
        for (auto& per : pers) {
            auto it = std::min_element(per.points.begin(), per.points.end(), [&](const auto& a, const auto& b) {
                return (a.position - cur).squaredNorm() < (b.position - cur).squaredNorm();
            });
            std::rotate(per.points.begin(), it, per.points.end());
        }
        bool retract = s > 0 && seq.transitions.size() >= static_cast<size_t>(s) && seq.transitions[s - 1].retraction;
        if (retract && !pers.empty() && !pers.front().points.empty()) {
            ++path.retractions;
            const Waypoint from = path.waypoints.back();
            const auto& to = pers.front().points.front();
            Aabb work = printed;
            work.expand(from.position);
            work.expand(to.position);
            auto air = safe_box_airmove(from.position, from.orientation, to.position, orient(to.host_tet),
                                        SafeBox::around(work, prm.margin));
            for (size_t j = 1; j + 1 < air.polyline.size(); ++j) {
                Waypoint w = from;
                w.position = air.polyline[j];
                w.h = 0;
                w.f_m = 0;
                w.extrude = false;
                w.subgraph = -1;
                path.waypoints.push_back(w);
            }
        } else if (retract) {
            ++path.retractions;
        }
        for (const auto& per : pers) {
            for (size_t j = 0; j < per.points.size(); ++j) emit(per.points[j].position, per.points[j].host_tet, j > 0);
            emit(per.points.front().position, per.points.front().host_tet, true);
        }
        cur = path.waypoints.empty() ? n.centroid : path.waypoints.back().position;
        for (const auto& t : euler_tour(g, plans[id].trimmed.edges, cur)) {
            for (size_t j = 0; j < t.vertices.size(); ++j) {
                const auto& v = g.vertices[t.vertices[j]];
                emit(v.position, v.host_tet, j > 0);
            }
        }
        printed.expand(n.bounds);
    }
    if (detail) *detail = std::move(plans);
    return path;
}

PlanSummary summarize(const ToolPath& path, const PlanParams& prm) {
    PlanSummary s;
    s.extrusion_length = path.extrusion_length();
    s.travel_length = path.travel_length();
    s.time_s = s.extrusion_length / prm.f_p + s.travel_length / prm.travel_speed;
    s.layers = path.layer_count();
    s.retractions = path.retractions;
    s.waypoints = path.waypoints.size();
    return s;
}

void write_toolpath(const ToolPath& path, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    for (const auto& w : path.waypoints) {
        out << fmt::format(
            "{{\"x\":{:.6f},\"y\":{:.6f},\"z\":{:.6f},\"ox\":{:.17g},\"oy\":{:.17g},\"oz\":{:.17g},\"h\":{:.17g},"
            "\"w\":{:.17g},\"fp\":{:.17g},\"fm\":{:.17g},\"extrude\":{},\"layer\":{},\"subgraph\":{}}}\n",
            w.position.x(), w.position.y(), w.position.z(), w.orientation.x(), w.orientation.y(), w.orientation.z(),
            w.h, w.w, w.f_p, w.f_m, w.extrude, w.layer, w.subgraph);
    }
    if (!out) throw IoError("write failed: " + file.string());
}

ToolPath read_toolpath(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    ToolPath path;
    std::string line;
    long lineno = 0;
    int prev_sub = -2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Waypoint w;
            w.position = Vec3(j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>());
            w.orientation = Vec3(j.at("ox").get<double>(), j.at("oy").get<double>(), j.at("oz").get<double>());
            w.h = j.at("h").get<double>();
            w.w = j.at("w").get<double>();
            w.f_p = j.at("fp").get<double>();
            w.f_m = j.at("fm").get<double>();
            w.extrude = j.at("extrude").get<bool>();
            w.layer = j.at("layer").get<int>();
            w.subgraph = j.at("subgraph").get<int>();
            if (w.subgraph < 0 && prev_sub >= 0) ++path.retractions;
            prev_sub = w.subgraph;
            path.waypoints.push_back(w);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("{}:{}: {}", file.string(), lineno, e.what()));
        }
    }
    return path;
}

void write_toolpath_obj(const ToolPath& path, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    for (const auto& w : path.waypoints)
        out << fmt::format("v {:.6f} {:.6f} {:.6f}\n", w.position.x(), w.position.y(), w.position.z());
    for (size_t i = 1; i < path.waypoints.size(); ++i) {
        if (path.waypoints[i].extrude) out << "l " << i << ' ' << i + 1 << '\n';
    }
}

}  // namespace geoprint
