#pragma once

// Independent reference computations shared by the unit tests and the acceptance run.

#include "geoprint/collision.hpp"
#include "geoprint/pathplan.hpp"
#include "geoprint/slicer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

namespace geoprint::testing {

/// Multi-source Dijkstra over mesh edges: the distance oracle for the heat method.
inline std::vector<double> edge_dijkstra(const TetMesh& m, const std::vector<int>& sources) {
    std::vector<std::vector<std::pair<int, double>>> adj(m.num_vertices());
    for (int e = 0; e < m.num_edges(); ++e) {
        auto [a, b] = m.edge(e);
        double l = (m.vertex(a) - m.vertex(b)).norm();
        adj[a].emplace_back(b, l);
        adj[b].emplace_back(a, l);
    }
    std::vector<double> d(m.num_vertices(), 1e300);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int s : sources) {
        d[s] = 0;
        pq.emplace(0.0, s);
    }
    while (!pq.empty()) {
        auto [dist, v] = pq.top();
        pq.pop();
        if (dist > d[v]) continue;
        for (auto [w, l] : adj[v])
            if (dist + l < d[w]) {
                d[w] = dist + l;
                pq.emplace(d[w], w);
            }
    }
    return d;
}

/// Connected components of the subgraph formed by edges passing `keep`.
inline std::vector<std::vector<int>> edge_components(const LatticeGraph& g,
                                                     const std::function<bool(const LatticeEdge&)>& keep) {
    std::vector<std::vector<int>> adj(g.vertices.size());
    for (const auto& e : g.edges)
        if (keep(e)) {
            adj[e.a].push_back(e.b);
            adj[e.b].push_back(e.a);
        }
    std::vector<int> comp(g.vertices.size(), -1);
    std::vector<std::vector<int>> out;
    for (size_t s = 0; s < adj.size(); ++s) {
        if (comp[s] >= 0 || adj[s].empty()) continue;
        out.emplace_back();
        std::vector<int> st{static_cast<int>(s)};
        comp[s] = static_cast<int>(out.size()) - 1;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            out.back().push_back(v);
            for (int w : adj[v])
                if (comp[w] < 0) {
                    comp[w] = comp[s];
                    st.push_back(w);
                }
        }
    }
    return out;
}

/// Degree law of one layer graph: degrees in {2,3,4}, and every closed boundary loop carries an even
/// number of degree-3 vertices. Returns the violation count.
inline int degree_law_violations(const LatticeGraph& g) {
    int bad = 0;
    auto deg = g.degrees();
    for (int d : deg) bad += d < 2 || d > 4;
    for (const auto& loop : edge_components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Boundary; })) {
        int d3 = 0;
        for (int v : loop) d3 += deg[v] == 3;
        bad += d3 % 2;
    }
    return bad;
}

/// Brute-force audit of one sub-graph: parity, coverage and turning. Returns the violation count.
inline int audit_tours(const TetMesh& mesh, const LatticeGraph& g, const SubGraph& sg) {
    int bad = 0;
    auto t = trim_to_eulerian(mesh, g, sg);
    std::map<int, int> deg;
    for (int e : t.edges) {
        ++deg[g.edges[e].a];
        ++deg[g.edges[e].b];
    }
    for (auto [v, d] : deg) bad += d != 2 && d != 4;
    for (int e : t.removed) bad += g.edges[e].kind != EdgeKind::Boundary;
    Vec3 from = g.vertices[sg.vertices.front()].position;
    auto tours = euler_tour(g, t.edges, from);
    std::vector<int> walked;
    for (const auto& tour : tours) {
        bad += tour.vertices.front() != tour.vertices.back();
        bad += tour.vertices.size() != tour.edges.size() + 1;
        const size_t m = tour.edges.size();
        for (size_t i = 0; i < m; ++i) {
            const auto& e = g.edges[tour.edges[i]];
            int u = tour.vertices[i], v = tour.vertices[i + 1];
            bad += !((e.a == u && e.b == v) || (e.a == v && e.b == u));
            // turning at every degree-4 vertex, the closing one included
            const auto& next = g.edges[tour.edges[(i + 1) % m]];
            if (deg[v] == 4) bad += e.kind == next.kind;
        }
        walked.insert(walked.end(), tour.edges.begin(), tour.edges.end());
    }
    std::sort(walked.begin(), walked.end());
    bad += walked != t.edges;
    return bad;
}

/// Exhaustive oracle: every edge against every triangle, then the winding number of one vertex.
inline bool brute_force_collides(const EnvelopeVolume& env, const LatticeGraph& g, const SubGraph& s) {
    for (int e : s.edges) {
        const Vec3& p = g.vertices[g.edges[e].a].position;
        const Vec3& q = g.vertices[g.edges[e].b].position;
        for (const auto& t : env.triangles) {
            if (segment_intersects_triangle(p, q, env.vertices[t[0]], env.vertices[t[1]], env.vertices[t[2]]))
                return true;
        }
    }
    const Vec3& x = g.vertices[s.vertices.front()].position;
    double w = 0.0;
    for (const auto& t : env.triangles)
        w += triangle_winding(x, env.vertices[t[0]], env.vertices[t[1]], env.vertices[t[2]]);
    return w >= 0.5;
}

}  // namespace geoprint::testing
