#include <gtest/gtest.h>

#include "geoprint/errors.hpp"
#include "geoprint/sequencing.hpp"
#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

using namespace geoprint;
using geoprint::testing::Pipeline;
using geoprint::testing::pcgs_at;
using geoprint::testing::run_pipeline;

namespace {

const Pipeline& column() {
    static const Pipeline p = run_pipeline(shapes::column(10, 10, 20, 5, 5, 10).mesh, 2.0, 2.5);
    return p;
}

const Pipeline& y_part() {
    static const Pipeline p = run_pipeline(shapes::y_part().mesh, 0.6, 2.0);
    return p;
}

const Pipeline& three_branch() {
    static const Pipeline p = run_pipeline(shapes::three_branch().mesh, 0.6, 2.0);
    return p;
}

std::vector<std::vector<int>> no_pcgs(const Pipeline& p) { return std::vector<std::vector<int>>(p.tree.size()); }

bool is_permutation_of_nodes(const PrintSequence& s, int k) {
    std::vector<int> v = s.order;
    std::sort(v.begin(), v.end());
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    return v == ids;
}

/// True if segment pq passes through the open interior of box b (slab clipping).
bool crosses_interior(const Vec3& p, const Vec3& q, const Aabb& b) {
    double t0 = 0, t1 = 1;
    Vec3 d = q - p;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (p[a] <= b.lo[a] + 1e-9 || p[a] >= b.hi[a] - 1e-9) return false;
            continue;
        }
        double ta = (b.lo[a] - p[a]) / d[a], tb = (b.hi[a] - p[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t1 - t0 > 1e-9;
}

struct Trio {
    PrintSequence seq;
    SequenceReport rep;
};

Trio evaluate(PrintSequence seq, const Pipeline& p, const std::vector<std::vector<int>>& pcgs) {
    auto anchors = node_anchors(p.tree, p.layers);
    auto rep = validate_sequence(seq, p.tree, anchors, pcgs);
    return {std::move(seq), std::move(rep)};
}

}  // namespace

TEST(SafeBox, SameLayerHopStaysWithinBoxRouteBound) {
    SafeBox box{Aabb{Vec3(-20, -20, -20), Vec3(20, 20, 5)}};
    auto m = safe_box_airmove(Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(10, 0, 0), Vec3(0, 0, 1), box);
    EXPECT_GE(m.length, 10.0);
    EXPECT_LE(m.length, 10.0 + 2 * 5 + 1e-9);
    EXPECT_NEAR(m.polyline.front().z(), 0.0, 0);
    EXPECT_EQ(m.polyline.back(), Vec3(10, 0, 0));
}

TEST(SafeBox, ZeroLengthMove) {
    SafeBox box{Aabb{Vec3(-1, -1, -1), Vec3(1, 1, 1)}};
    auto m = safe_box_airmove(Vec3(0.2, 0, 0), Vec3(0, 0, 1), Vec3(0.2, 0, 0), Vec3(1, 0, 0), box);
    EXPECT_EQ(m.length, 0.0);
}

TEST(SafeBox, OppositeFacesRouteOverTheSurface) {
    Aabb work{Vec3(-10, -10, 0), Vec3(10, 10, 20)};
    SafeBox box = SafeBox::around(work, 5);
    Vec3 from(-10, 0, 10), to(10, 0, 10);
    auto m = safe_box_airmove(from, Vec3(-1, 0, 0), to, Vec3(1, 0, 0), box);
    ASSERT_GE(m.polyline.size(), 4u);
    // out 5 to the x = -15 face, 15 to any adjacent face edge, 30 across it, 15 down, in 5
    EXPECT_NEAR(m.length, 5 + 15 + 30 + 15 + 5, 1e-9);
    for (size_t i = 0; i + 1 < m.polyline.size(); ++i)
        EXPECT_FALSE(crosses_interior(m.polyline[i], m.polyline[i + 1], work)) << i;
    // every interior waypoint lies on the safe box surface
    for (size_t i = 1; i + 1 < m.polyline.size(); ++i) {
        const Vec3& q = m.polyline[i];
        bool on = false;
        for (int a = 0; a < 3; ++a)
            on |= std::abs(q[a] - box.box.lo[a]) < 1e-9 || std::abs(q[a] - box.box.hi[a]) < 1e-9;
        EXPECT_TRUE(on) << i;
    }
}

TEST(SafeBox, EndpointOutsideBoxIsRejected) {
    SafeBox box{Aabb{Vec3(-1, -1, -1), Vec3(1, 1, 1)}};
    EXPECT_THROW(safe_box_airmove(Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(3, 0, 0), Vec3(0, 0, 1), box), ValidationError);
}

TEST(Sequences, ColumnStrategiesAgreeWithoutRetractions) {
    const auto& p = column();
    const int k = p.tree.size();
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    auto pcgs = pcgs_at(p, 45);
    for (auto seq : {lpt(p.tree), dpt(p.tree), greedy_sequence(p.tree, pcgs)}) {
        EXPECT_EQ(seq.order, ids) << seq.strategy;
        auto r = evaluate(seq, p, pcgs);
        EXPECT_EQ(r.rep.retractions, 0);
        EXPECT_EQ(r.rep.air_move, 0.0);
        EXPECT_TRUE(r.rep.valid && r.rep.collision_free);
    }
}

TEST(Sequences, LptCompletesEachLayerFirst) {
    for (const Pipeline* p : {&y_part(), &three_branch()}) {
        auto seq = lpt(p->tree);
        ASSERT_TRUE(is_permutation_of_nodes(seq, p->tree.size()));
        for (size_t i = 1; i < seq.order.size(); ++i)
            EXPECT_LE(p->tree.nodes[seq.order[i - 1]].layer, p->tree.nodes[seq.order[i]].layer);
    }
    // both prong components of every split layer precede the next layer
    const auto& p = y_part();
    auto seq = lpt(p.tree);
    std::vector<int> pos(p.tree.size());
    for (size_t i = 0; i < seq.order.size(); ++i) pos[seq.order[i]] = static_cast<int>(i);
    int split_layers = 0;
    for (size_t l = 0; l + 1 < p.tree.layer_nodes.size(); ++l) {
        if (p.tree.layer_nodes[l].size() != 2) continue;
        ++split_layers;
        for (int a : p.tree.layer_nodes[l]) {
            for (int b : p.tree.layer_nodes[l + 1]) EXPECT_LT(pos[a], pos[b]);
        }
    }
    EXPECT_GT(split_layers, 10);
}

TEST(Sequences, DptJumpsOnceOnATwoBranchTree) {
    const auto& p = y_part();
    ASSERT_EQ(p.tree.bifurcations().size(), 1u);
    auto r = evaluate(dpt(p.tree), p, no_pcgs(p));
    EXPECT_EQ(r.rep.retractions, 1);
    EXPECT_TRUE(r.rep.valid);
    EXPECT_GT(r.rep.air_move, 0.0);
}

TEST(Sequences, GreedyWithoutPcgsIsDpt) {
    for (const Pipeline* p : {&y_part(), &three_branch()}) {
        auto g = greedy_sequence(p->tree, no_pcgs(*p));
        auto d = dpt(p->tree);
        EXPECT_EQ(g.order, d.order);
    }
}

TEST(Validate, ShuffledOrderFlagsFirstOffendingIndex) {
    const auto& p = column();
    auto seq = lpt(p.tree);
    std::swap(seq.order[3], seq.order[5]);
    auto r = evaluate(seq, p, no_pcgs(p));
    ASSERT_FALSE(r.rep.violations.empty());
    EXPECT_FALSE(r.rep.valid);
    EXPECT_EQ(r.rep.violations.front().position, 3);
    EXPECT_EQ(r.rep.violations.front().criterion, 1);
    EXPECT_EQ(r.rep.violations.front().node, 5);
    EXPECT_EQ(r.rep.violations.front().other, 4);
}

TEST(Validate, MissingAndDuplicateNodes) {
    const auto& p = column();
    auto seq = lpt(p.tree);
    seq.order[2] = seq.order[1];
    auto r = evaluate(seq, p, no_pcgs(p));
    EXPECT_FALSE(r.rep.valid);
    int zeros = 0;
    for (const auto& v : r.rep.violations) zeros += v.criterion == 0;
    EXPECT_EQ(zeros, 2);  // the duplicate and the missing node
}

TEST(Validate, CollisionViolationNamesThePair) {
    const auto& p = column();
    auto pcgs = no_pcgs(p);
    pcgs[5] = {2};  // pretend the envelope of node 5 reaches node 2
    auto r = evaluate(lpt(p.tree), p, pcgs);
    EXPECT_TRUE(r.rep.valid);
    EXPECT_FALSE(r.rep.collision_free);
    ASSERT_EQ(r.rep.violations.size(), 1u);
    EXPECT_EQ(r.rep.violations[0].node, 2);
    EXPECT_EQ(r.rep.violations[0].other, 5);
    EXPECT_EQ(r.rep.violations[0].criterion, 2);
}

TEST(Greedy, DeadlockReportsTheBlockingCycle) {
    const auto& p = column();
    auto pcgs = no_pcgs(p);
    pcgs[3] = {2};  // node 2 must wait for 3, which needs 2 underneath
    try {
        greedy_sequence(p.tree, pcgs);
        FAIL() << "expected a deadlock";
    } catch (const DeadlockError& e) {
        auto b = e.blocking();
        std::sort(b.begin(), b.end());
        EXPECT_EQ(b, (std::vector<int>{2, 3}));
    }
}

TEST(Greedy, AlwaysSafeOrDeadlocked) {
    const auto& p = y_part();
    for (double a : {5.0, 30.0, 60.0, 80.0}) {
        auto pcgs = pcgs_at(p, a);
        try {
            auto r = evaluate(greedy_sequence(p.tree, pcgs), p, pcgs);
            EXPECT_TRUE(r.rep.collision_free) << a;
            EXPECT_TRUE(r.rep.valid) << a;
            EXPECT_TRUE(is_permutation_of_nodes(r.seq, p.tree.size()));
        } catch (const DeadlockError&) {
            SUCCEED();
        }
    }
}

TEST(Sequences, ThreeBranchWideConeTrends) {
    const auto& p = three_branch();
    auto pcgs = pcgs_at(p, 75);
    auto L = evaluate(lpt(p.tree), p, pcgs);
    auto D = evaluate(dpt(p.tree), p, pcgs);
    auto G = evaluate(greedy_sequence(p.tree, pcgs), p, pcgs);
    std::vector<StrategyRow> rows{{"LPT", L.rep, 0, ""}, {"DPT", D.rep, 0, ""}, {"A4", G.rep, 0, ""}};
    std::cout << comparison_table(rows);

    EXPECT_FALSE(D.rep.collision_free);
    bool pair_listed = std::any_of(D.rep.violations.begin(), D.rep.violations.end(),
                                   [](const Violation& v) { return v.criterion == 2 && v.other >= 0; });
    EXPECT_TRUE(pair_listed);
    EXPECT_TRUE(G.rep.collision_free);
    EXPECT_TRUE(L.rep.collision_free);
    for (const auto* r : {&L, &D, &G}) {
        EXPECT_TRUE(r->rep.valid);
        EXPECT_TRUE(is_permutation_of_nodes(r->seq, p.tree.size()));
    }
    EXPECT_LT(D.rep.retractions, G.rep.retractions);
    EXPECT_LT(G.rep.retractions, L.rep.retractions);
    EXPECT_LT(D.rep.air_move, G.rep.air_move);
    EXPECT_LT(G.rep.air_move, L.rep.air_move);
}

TEST(Sequences, GreedyRetractionsShrinkWithTheCone) {
    const auto& p = three_branch();
    int prev = std::numeric_limits<int>::max();
    for (double a : {75.0, 45.0, 15.0}) {
        auto pcgs = pcgs_at(p, a);
        auto r = evaluate(greedy_sequence(p.tree, pcgs), p, pcgs);
        EXPECT_LE(r.rep.retractions, prev) << a;
        prev = r.rep.retractions;
    }
}

TEST(Sequences, AirMovesAvoidThePrintedBox) {
    const auto& p = three_branch();
    auto pcgs = pcgs_at(p, 75);
    auto r = evaluate(greedy_sequence(p.tree, pcgs), p, pcgs);
    Aabb printed;
    for (size_t i = 0; i + 1 < r.seq.order.size(); ++i) {
        printed.expand(p.tree.nodes[r.seq.order[i]].bounds);
        const auto& t = r.seq.transitions[i];
        if (!t.retraction) continue;
        const auto& poly = t.air_move.polyline;
        ASSERT_GE(poly.size(), 2u);
        // the retreat and approach legs start on the workpiece; the surface legs must stay clear
        for (size_t s = 1; s + 2 < poly.size(); ++s) EXPECT_FALSE(crosses_interior(poly[s], poly[s + 1], printed));
    }
}

TEST(Sequences, JsonRoundTrip) {
    const auto& p = y_part();
    auto r = evaluate(dpt(p.tree), p, no_pcgs(p));
    auto path = std::filesystem::temp_directory_path() / "geoprint_seq.json";
    write_sequence(r.seq, p.tree, path);
    auto back = read_sequence(path);
    EXPECT_EQ(back.strategy, "DPT");
    EXPECT_EQ(back.order, r.seq.order);
    ASSERT_EQ(back.transitions.size(), r.seq.transitions.size());
    for (size_t i = 0; i < back.transitions.size(); ++i) {
        EXPECT_EQ(back.transitions[i].retraction, r.seq.transitions[i].retraction);
        EXPECT_EQ(back.transitions[i].air_move.length, r.seq.transitions[i].air_move.length);
    }
    std::filesystem::remove(path);
    EXPECT_THROW(read_sequence(path), IoError);
}
