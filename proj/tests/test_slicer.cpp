#include <gtest/gtest.h>

#include "geoprint/errors.hpp"
#include "geoprint/gdf.hpp"
#include "geoprint/shapes.hpp"
#include "geoprint/slicer.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace geoprint;

namespace {

using Fn = std::function<double(const Vec3&)>;

FieldSet linear_fields(const TetMesh& m, const Fn& g, const Fn& a, const Fn& b) {
    FieldSet f;
    int n = m.num_vertices();
    f.gamma.resize(n);
    f.alpha.resize(n);
    f.beta.resize(n);
    for (int v = 0; v < n; ++v) {
        f.gamma[v] = g(m.vertex(v));
        f.alpha[v] = a(m.vertex(v));
        f.beta[v] = b(m.vertex(v));
    }
    f.frames.assign(m.num_tets(), Frame{Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    return f;
}

FieldSet from_gdf(const GdfResult& r) { return {r.gamma, r.alpha, r.beta, r.frames}; }

TetMesh corner_tet() {
    return TetMesh::build({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
}

FieldSet vertex_fields(std::vector<double> g, std::vector<double> a, std::vector<double> b) {
    FieldSet f;
    f.gamma = Eigen::Map<Vector>(g.data(), g.size());
    f.alpha = Eigen::Map<Vector>(a.data(), a.size());
    f.beta = Eigen::Map<Vector>(b.data(), b.size());
    f.frames.assign(1, Frame{Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    return f;
}

Eigen::Vector4d barycentric(const TetMesh& m, int t, const Vec3& p) {
    const auto& T = m.tet(t);
    Eigen::Matrix3d A;
    for (int k = 0; k < 3; ++k) A.col(k) = m.vertex(T[k + 1]) - m.vertex(T[0]);
    Vec3 x = A.fullPivLu().solve(p - m.vertex(T[0]));
    return {1.0 - x.sum(), x[0], x[1], x[2]};
}

double interp(const TetMesh& m, int t, const ScalarField& f, const Vec3& p) {
    auto w = barycentric(m, t, p);
    const auto& T = m.tet(t);
    return w[0] * f[T[0]] + w[1] * f[T[1]] + w[2] * f[T[2]] + w[3] * f[T[3]];
}

/// Connected components of the subgraph formed by edges passing `keep`.
std::vector<std::vector<int>> components(const LatticeGraph& g, const std::function<bool(const LatticeEdge&)>& keep) {
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

/// Checks every structural property a layer graph must satisfy.
void expect_layer_invariants(const TetMesh& m, const FieldSet& f, const LatticeGraph& g) {
    auto deg = g.degrees();
    for (size_t v = 0; v < g.vertices.size(); ++v) {
        const auto& V = g.vertices[v];
        EXPECT_NEAR(interp(m, V.host_tet, f.gamma, V.position), g.iso, 1e-6) << "layer " << g.layer << " v " << v;
        EXPECT_NEAR(V.normal.norm(), 1.0, 1e-12);
        bool iso_on_boundary =
            (V.kind == VertexKind::AlphaIsoline || V.kind == VertexKind::BetaIsoline) && V.on_boundary_face;
        int want = V.kind == VertexKind::Crossing ? 4 : iso_on_boundary ? 3 : 2;
        EXPECT_EQ(deg[v], want) << "layer " << g.layer << " vertex " << v << " kind " << to_string(V.kind);
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : g.edges) {
        EXPECT_NE(e.a, e.b);
        EXPECT_TRUE(seen.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second) << "duplicate edge";
        for (int v : {e.a, e.b}) {
            auto w = barycentric(m, e.host_tet, g.vertices[v].position);
            EXPECT_GE(w.minCoeff(), -1e-9) << "edge endpoint outside host tet";
        }
    }
    // boundary loops close up and carry an even number of degree-3 vertices
    for (const auto& loop : components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Boundary; })) {
        int d3 = 0;
        for (int v : loop) d3 += deg[v] == 3;
        EXPECT_EQ(d3 % 2, 0);
        for (int v : loop) {
            int bdeg = 0;
            for (const auto& e : g.edges) bdeg += e.kind == EdgeKind::Boundary && (e.a == v || e.b == v);
            EXPECT_EQ(bdeg, 2) << "boundary loop is not closed at " << v;
        }
    }
    EXPECT_LE(g.max_crossing_discrepancy, 1e-6);
}

}  // namespace

// ---------------------------------------------------------------- plans

TEST(Plan, UniformLists) {
    FieldSet f;
    f.gamma = Vector::LinSpaced(2, 0.0, 44.29);
    f.alpha = Vector::LinSpaced(2, 0.0, 24.17);
    f.beta = Vector::LinSpaced(2, 0.0, 24.17);
    auto p = plan_isovalues(f, 1.0, 2.0, 2.0);
    ASSERT_EQ(p.gamma.size(), 44u);
    EXPECT_DOUBLE_EQ(p.gamma.front(), 1.0);
    EXPECT_DOUBLE_EQ(p.gamma.back(), 44.0);
    std::vector<double> want;
    for (int k = 2; k <= 24; k += 2) want.push_back(k);
    EXPECT_EQ(p.alpha, want);
    for (double d : p.gamma_interval) EXPECT_DOUBLE_EQ(d, 1.0);
}

TEST(Plan, IntervalBeyondRangeThrows) {
    FieldSet f;
    f.gamma = Vector::LinSpaced(2, 0.0, 5.0);
    f.alpha = f.beta = f.gamma;
    EXPECT_THROW(plan_isovalues(f, 6.0, 1.0, 1.0), ValidationError);
    EXPECT_THROW(plan_isovalues(f, 0.0, 1.0, 1.0), ValidationError);
    EXPECT_NO_THROW(plan_isovalues(f, 1.0, 6.0, 6.0));  // empty alpha/beta only warn
}

TEST(Plan, ExplicitListsValidated) {
    FieldSet f;
    f.gamma = Vector::LinSpaced(2, 0.0, 10.0);
    f.alpha = f.beta = f.gamma;
    auto p = plan_isovalues(f, {1, 2, 4, 8}, {1, 1.5}, {3});
    EXPECT_EQ(p.gamma_interval, (std::vector<double>{1, 1, 2, 4}));
    EXPECT_THROW(plan_isovalues(f, {1, 1}, {}, {}), ValidationError);
    EXPECT_THROW(plan_isovalues(f, {1, 10}, {}, {}), ValidationError);
    EXPECT_THROW(plan_isovalues(f, {0, 1}, {}, {}), ValidationError);
}

TEST(Plan, PerturbsOffVertexValues) {
    auto part = shapes::column(10, 10, 10, 2, 2, 4);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    auto p = plan_isovalues(f, 2.5, 5.0, 5.0);
    ASSERT_EQ(p.gamma.size(), 3u);
    for (size_t i = 0; i < 3; ++i) {
        double d = std::abs(p.gamma[i] - 2.5 * (i + 1));
        EXPECT_GT(d, 1e-9 * 2.5);
        EXPECT_LE(d, 1e-7 * 2.5 * 1.0000001);
    }
    EXPECT_NEAR(p.alpha[0], 5.0, 1e-6);
    EXPECT_NE(p.alpha[0], 5.0);
    EXPECT_EQ(perturb_off_values(1.3, 1.0, {0.0, 1.0, 2.0}), 1.3);
}

// ---------------------------------------------------------------- face vertices

TEST(FaceVertex, MidpointExamples) {
    auto m = corner_tet();
    auto f = vertex_fields({0, 2, 2, 7}, {0, 0, 4, 0}, {0, 0, 4, 0});
    int face = *m.find_face(0, 1, 2);
    auto v = gen_gx_vertex(m, f, face, 1.0, 1.0);
    ASSERT_TRUE(v);
    EXPECT_LT((v->position - Vec3(0.25, 0.25, 0)).norm(), 1e-15);
    EXPECT_EQ(v->kind, VertexKind::AlphaIsoline);
    EXPECT_DOUBLE_EQ(v->alpha, 1.0);
    EXPECT_DOUBLE_EQ(v->gamma, 1.0);
    auto w = gen_gy_vertex(m, f, face, 1.0, 1.0);
    ASSERT_TRUE(w);
    EXPECT_LT((w->position - Vec3(0.25, 0.25, 0)).norm(), 1e-15);
    EXPECT_EQ(w->kind, VertexKind::BetaIsoline);
    EXPECT_DOUBLE_EQ(w->beta, 1.0);
}

TEST(FaceVertex, AbsentCases) {
    auto m = corner_tet();
    auto f = vertex_fields({0, 2, 2, 7}, {0, 0, 4, 0}, {0, 0, 4, 0});
    int face = *m.find_face(0, 1, 2);
    EXPECT_FALSE(gen_gx_vertex(m, f, face, 3.0, 1.0));  // all gamma below the level
    EXPECT_FALSE(gen_gx_vertex(m, f, face, -1.0, 1.0));
    EXPECT_FALSE(gen_gx_vertex(m, f, face, 1.0, 2.5));  // alpha level outside [0, 2]
    EXPECT_FALSE(gen_gy_vertex(m, f, face, 1.0, 2.5));
}

TEST(FaceVertex, RandomFacesMatchPlanarOracle) {
    // oracle: on a triangle with linear fields the point with gamma = c and alpha = a solves a 2x2 system
    // in barycentric coordinates; existence is confirmed by a dense barycentric sign scan
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    int found = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec3> P = {Vec3::Random(), Vec3::Random(), Vec3::Random(), Vec3::Random()};
        if (std::abs((P[1] - P[0]).cross(P[2] - P[0]).dot(P[3] - P[0])) < 0.05) continue;
        auto m = TetMesh::build(P, {{0, 1, 2, 3}});
        auto f = vertex_fields({U(rng), U(rng), U(rng), U(rng)}, {U(rng), U(rng), U(rng), U(rng)},
                               {U(rng), U(rng), U(rng), U(rng)});
        double c = 0.3 * U(rng), a = 0.3 * U(rng);
        for (int face = 0; face < m.num_faces(); ++face) {
            auto F = m.face(face);
            Eigen::Matrix2d A;
            A << f.gamma[F[1]] - f.gamma[F[0]], f.gamma[F[2]] - f.gamma[F[0]], f.alpha[F[1]] - f.alpha[F[0]],
                f.alpha[F[2]] - f.alpha[F[0]];
            Eigen::Vector2d rhs(c - f.gamma[F[0]], a - f.alpha[F[0]]);
            Eigen::Vector2d uv = A.fullPivLu().solve(rhs);
            bool inside = uv[0] > 0 && uv[1] > 0 && uv.sum() < 1;
            // dense scan: does the sampled face show all four sign combinations?
            int signs = 0;
            const int n = 100;
            for (int i = 0; i <= n; ++i)
                for (int j = 0; i + j <= n; ++j) {
                    double u = double(i) / n, w = double(j) / n;
                    double g = (1 - u - w) * f.gamma[F[0]] + u * f.gamma[F[1]] + w * f.gamma[F[2]] - c;
                    double al = (1 - u - w) * f.alpha[F[0]] + u * f.alpha[F[1]] + w * f.alpha[F[2]] - a;
                    signs |= 1 << ((g > 0) * 2 + (al > 0));
                }
            auto v = gen_gx_vertex(m, f, face, c, a);
            double margin = std::min({uv[0], uv[1], 1 - uv.sum()});
            if (std::abs(margin) < 1e-3) continue;  // too close to the rim for the scan to decide
            EXPECT_EQ(v.has_value(), inside);
            if (inside) {
                EXPECT_EQ(signs, 15);
            }
            if (v && inside) {
                Vec3 want = (1 - uv.sum()) * m.vertex(F[0]) + uv[0] * m.vertex(F[1]) + uv[1] * m.vertex(F[2]);
                EXPECT_LT((v->position - want).norm(), 1e-6);
                ++found;
            }
        }
    }
    EXPECT_GT(found, 20);
}

// ---------------------------------------------------------------- crossings and boundary

TEST(Crossing, MidpointExample) {
    auto c = crossing(Vec3(0, 0, 0), Vec3(2, 0, 0), 0, 2, Vec3(1, -1, 0), Vec3(1, 1, 0), 0, 2, 1.0, 1.0);
    ASSERT_TRUE(c);
    EXPECT_DOUBLE_EQ(c->s_alpha, 0.5);
    EXPECT_DOUBLE_EQ(c->s_beta, 0.5);
    EXPECT_LT((c->from_alpha - Vec3(1, 0, 0)).norm(), 1e-15);
    EXPECT_LT((c->from_beta - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(Crossing, SignTestFails) {
    EXPECT_FALSE(crossing(Vec3(0, 0, 0), Vec3(2, 0, 0), 0, 2, Vec3(1, -1, 0), Vec3(1, 1, 0), 0, 2, 1.0, 3.0));
    EXPECT_FALSE(crossing(Vec3(0, 0, 0), Vec3(2, 0, 0), 0, 2, Vec3(1, -1, 0), Vec3(1, 1, 0), 3, 4, 1.0, 1.0));
    EXPECT_FALSE(crossing(Vec3(0, 0, 0), Vec3(2, 0, 0), 1, 1 + 1e-14, Vec3(1, -1, 0), Vec3(1, 1, 0), 0, 2, 1.0,
                          1.0 + 5e-15));
}

TEST(BoundaryVertex, Examples) {
    auto m = corner_tet();
    auto f = vertex_fields({0, 2, 5, 5}, {0, 4, 0, 0}, {0, 0, 0, 0});
    int e = *m.find_edge(0, 1);
    auto v = gen_bound_vertex(m, f, e, 1.0);
    ASSERT_TRUE(v);
    EXPECT_LT((v->position - Vec3(0.5, 0, 0)).norm(), 1e-15);
    EXPECT_DOUBLE_EQ(v->alpha, 2.0);
    EXPECT_EQ(v->kind, VertexKind::BoundaryInterp);
    EXPECT_FALSE(gen_bound_vertex(m, f, *m.find_edge(2, 3), 1.0));
}

TEST(BoundaryVertex, RandomEdgesMatchLerp) {
    auto part = shapes::y_part();
    auto r = compute_gdfs(part.mesh, select_base_threshold(part.mesh));
    auto f = from_gdf(r);
    std::mt19937 rng(3);
    int checked = 0;
    for (int k = 0; k < 4000 && checked < 300; ++k) {
        int e = std::uniform_int_distribution<int>(0, part.mesh.num_edges() - 1)(rng);
        auto [a, b] = part.mesh.edge(e);
        double c = 0.5 * (f.gamma[a] + f.gamma[b]) + 0.1 * (f.gamma[b] - f.gamma[a]);
        auto v = gen_bound_vertex(part.mesh, f, e, c);
        if (!part.mesh.edge_on_boundary(e) || f.gamma[a] == f.gamma[b]) {
            EXPECT_FALSE(v);
            continue;
        }
        ASSERT_TRUE(v);
        double t = (c - f.gamma[a]) / (f.gamma[b] - f.gamma[a]);
        Vec3 want = (1 - t) * part.mesh.vertex(a) + t * part.mesh.vertex(b);
        EXPECT_LT((v->position - want).norm(), 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(OrderAlong, ProjectionSort) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 A = Vec3::Random(), B = Vec3::Random();
        std::vector<double> ts(6);
        for (double& t : ts) t = U(rng);
        std::vector<Vec3> pts;
        for (double t : ts) pts.push_back(A + t * (B - A));
        auto order = order_along(A, B, pts);
        ASSERT_EQ(order.size(), ts.size());
        for (size_t i = 1; i < order.size(); ++i) EXPECT_LT(ts[order[i - 1]], ts[order[i]]);
    }
    EXPECT_TRUE(order_along(Vec3(0, 0, 0), Vec3(1, 0, 0), {}).empty());
}

// ---------------------------------------------------------------- layer graphs

TEST(Layer, SquareColumnGrid) {
    // 20 x 20 prism cut at mid height; isolines every 5 mm give a 3 x 3 grid of crossings
    auto part = shapes::column(20, 20, 20, 7, 7, 7);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    auto plan = plan_isovalues(f, 9.0, 5.0, 5.0);
    auto g = build_layer_graph(part.mesh, f, 1, plan.gamma[0], plan.gamma_interval[0], plan.alpha, plan.beta);
    ASSERT_FALSE(g.empty());
    std::set<std::pair<long, long>> cross;
    double perimeter = 0;
    int deg3 = 0;
    auto deg = g.degrees();
    for (size_t v = 0; v < g.vertices.size(); ++v) {
        const auto& V = g.vertices[v];
        if (V.kind == VertexKind::Crossing) cross.insert({std::lround(V.position.x()), std::lround(V.position.y())});
        deg3 += deg[v] == 3;
    }
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Boundary) perimeter += (g.vertices[e.a].position - g.vertices[e.b].position).norm();
    EXPECT_EQ(std::count_if(g.vertices.begin(), g.vertices.end(),
                            [](const LatticeVertex& v) { return v.kind == VertexKind::Crossing; }),
              9);
    std::set<std::pair<long, long>> want;
    for (long x : {5, 10, 15})
        for (long y : {5, 10, 15}) want.insert({x, y});
    EXPECT_EQ(cross, want);
    EXPECT_NEAR(perimeter, 80.0, 0.8);
    EXPECT_EQ(deg3, 12);  // three alpha and three beta isolines, each meeting the wall twice
    EXPECT_EQ(components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Boundary; }).size(), 1u);
    expect_layer_invariants(part.mesh, f, g);
}

TEST(Layer, BoundaryChordsSplitAdditively) {
    auto part = shapes::column(20, 20, 20, 7, 7, 7);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z() + 0.1 * p.x(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    auto plan = plan_isovalues(f, 9.0, 2.0, 2.0);
    auto g = build_layer_graph(part.mesh, f, 1, plan.gamma[0], plan.gamma_interval[0], plan.alpha, plan.beta);
    std::map<int, std::vector<const LatticeEdge*>> by_face;
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Boundary) by_face[e.host_face].push_back(&e);
    int split = 0;
    for (auto& [face, es] : by_face) {
        ASSERT_TRUE(part.mesh.face_on_boundary(face));
        // the chord runs between the two boundary-interp vertices of this face
        std::vector<Vec3> ends;
        double len = 0;
        std::map<int, int> count;
        for (const auto* e : es) {
            len += (g.vertices[e->a].position - g.vertices[e->b].position).norm();
            ++count[e->a];
            ++count[e->b];
        }
        for (auto [v, c] : count)
            if (c == 1) ends.push_back(g.vertices[v].position);
        ASSERT_EQ(ends.size(), 2u);
        EXPECT_NEAR(len, (ends[0] - ends[1]).norm(), 1e-9);
        split += es.size() > 1;
    }
    EXPECT_GT(split, 0);
}

TEST(Layer, AboveFieldIsEmpty) {
    auto part = shapes::column(4, 4, 4, 2, 2, 2);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    EXPECT_TRUE(build_layer_graph(part.mesh, f, 1, 5.0, 1.0, {1.0}, {1.0}).empty());
}

TEST(Layer, CylinderIsolineIsOneCycle) {
    // alpha = radius on an annulus: the level between the walls is a closed loop around the hole
    auto part = shapes::torus(10, 2, 48, 4, 4);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); },
        [](const Vec3& p) { return std::hypot(p.x(), p.y()); }, [](const Vec3& p) { return p.x() + 20; });
    auto g = build_layer_graph(part.mesh, f, 1, 1.9, 1.0, {10.3}, {});
    ASSERT_FALSE(g.empty());
    auto alpha_comps = components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Alpha; });
    ASSERT_EQ(alpha_comps.size(), 1u);
    std::vector<int> adeg(g.vertices.size(), 0);
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Alpha) ++adeg[e.a], ++adeg[e.b];
    for (int v : alpha_comps[0]) EXPECT_EQ(adeg[v], 2);
    // inner and outer walls give two boundary loops
    EXPECT_EQ(components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Boundary; }).size(), 2u);
    expect_layer_invariants(part.mesh, f, g);
}

TEST(Layer, IsolineLeavingBoundaryIsOpenPath) {
    auto part = shapes::column(10, 10, 10, 4, 4, 4);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    auto g = build_layer_graph(part.mesh, f, 1, 4.1, 4.1, {3.3}, {});
    auto comps = components(g, [](const LatticeEdge& e) { return e.kind == EdgeKind::Alpha; });
    ASSERT_EQ(comps.size(), 1u);
    std::vector<int> adeg(g.vertices.size(), 0);
    for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Alpha) ++adeg[e.a], ++adeg[e.b];
    int ends = 0;
    for (int v : comps[0]) ends += adeg[v] == 1;
    EXPECT_EQ(ends, 2);
}

TEST(Layer, YPartAllLayersSatisfyInvariants) {
    auto part = shapes::y_part();
    auto r = compute_gdfs(part.mesh, select_base_threshold(part.mesh));
    auto f = from_gdf(r);
    auto plan = plan_isovalues(f, 1.0, 2.0, 2.0);
    auto layers = slice_all(part.mesh, f, plan);
    EXPECT_EQ(layers.size(), plan.gamma.size());
    for (const auto& g : layers) expect_layer_invariants(part.mesh, f, g);
    // layer 24 is above the fork: two lobes, each with its own boundary loop
    const auto& g24 = layers[23];
    EXPECT_EQ(g24.layer, 24);
    EXPECT_EQ(components(g24, [](const LatticeEdge&) { return true; }).size(), 2u);
    int crossings = 0;
    for (const auto& v : g24.vertices) crossings += v.kind == VertexKind::Crossing;
    EXPECT_GT(crossings, 0);
}

TEST(Slice, ColumnLayerCount) {
    auto part = shapes::column(20, 20, 60, 5, 5, 15);
    auto r = compute_gdfs(part.mesh, select_base_threshold(part.mesh));
    auto f = from_gdf(r);
    double top = f.gamma.maxCoeff();
    auto plan = plan_isovalues(f, 6.0, 5.0, 5.0);
    auto layers = slice_all(part.mesh, f, plan);
    // levels 6, 12, ... strictly below the computed maximum; each cuts the whole section
    EXPECT_EQ(static_cast<double>(layers.size()), std::ceil(top / 6.0) - 1);
    for (const auto& g : layers) EXPECT_FALSE(g.empty());
    EXPECT_TRUE(slice_all(part.mesh, f, IsoPlan{}).empty());
}

// ---------------------------------------------------------------- overhang

TEST(Overhang, ColumnFixedNozzle) {
    auto part = shapes::column(10, 10, 10, 2, 2, 2);
    auto s = extract_boundary(part.mesh);
    auto th = overhang_angles(s, Vec3(0, 0, 1));
    for (int i = 0; i < s.size(); ++i) {
        if (part.lateral[s.face[i]])
            EXPECT_NEAR(th[i], 90.0, 1e-9);
        else if (s.normal[i].z() > 0)
            EXPECT_NEAR(th[i], 0.0, 1e-9);
        else
            EXPECT_NEAR(th[i], 180.0, 1e-9);
    }
}

TEST(Overhang, CurvedBeatsFixedOnY) {
    auto part = shapes::y_part();
    auto r = compute_gdfs(part.mesh, select_base_threshold(part.mesh));
    auto s = extract_boundary(part.mesh);
    auto curved = overhang_angles(s, r.frames);
    auto fixed = overhang_angles(s, Vec3(0, 0, 1));
    double dc = 0, df = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (!part.lateral[s.face[i]]) continue;
        dc = std::max(dc, std::abs(curved[i] - 90.0));
        df = std::max(df, std::abs(fixed[i] - 90.0));
    }
    EXPECT_LT(dc, df);
    EXPECT_NEAR(df, 35.0, 1.0);
}

// ---------------------------------------------------------------- files

TEST(LayerFiles, JsonRoundTrip) {
    auto part = shapes::column(20, 20, 20, 7, 7, 7);
    auto f = linear_fields(
        part.mesh, [](const Vec3& p) { return p.z(); }, [](const Vec3& p) { return p.x(); },
        [](const Vec3& p) { return p.y(); });
    auto plan = plan_isovalues(f, 9.0, 5.0, 5.0);
    auto g = build_layer_graph(part.mesh, f, 1, plan.gamma[0], plan.gamma_interval[0], plan.alpha, plan.beta);
    auto dir = std::filesystem::temp_directory_path() / "geoprint_slicer_test";
    std::filesystem::create_directories(dir);
    write_layer_json(g, dir / "layer.json");
    auto h = read_layer_json(dir / "layer.json");
    EXPECT_EQ(h.layer, g.layer);
    EXPECT_EQ(h.iso, g.iso);
    ASSERT_EQ(h.vertices.size(), g.vertices.size());
    ASSERT_EQ(h.edges.size(), g.edges.size());
    for (size_t i = 0; i < g.vertices.size(); ++i) {
        EXPECT_EQ(h.vertices[i].position, g.vertices[i].position);
        EXPECT_EQ(h.vertices[i].kind, g.vertices[i].kind);
        EXPECT_EQ(h.vertices[i].host_tet, g.vertices[i].host_tet);
        EXPECT_EQ(h.vertices[i].alpha_index, g.vertices[i].alpha_index);
        EXPECT_EQ(h.vertices[i].on_boundary_face, g.vertices[i].on_boundary_face);
    }
    for (size_t i = 0; i < g.edges.size(); ++i) {
        EXPECT_EQ(h.edges[i].a, g.edges[i].a);
        EXPECT_EQ(h.edges[i].kind, g.edges[i].kind);
        EXPECT_EQ(h.edges[i].host_face, g.edges[i].host_face);
    }
    write_layers_obj({g}, dir / "layers.obj");
    EXPECT_GT(std::filesystem::file_size(dir / "layers.obj"), 0u);
    std::ofstream(dir / "bad.json") << "{\"layer\": 1}";
    EXPECT_THROW(read_layer_json(dir / "bad.json"), ParseError);
    EXPECT_THROW(read_layer_json(dir / "missing.json"), IoError);
}
