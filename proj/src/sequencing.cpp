#include "geoprint/sequencing.hpp"

#include "geoprint/errors.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace geoprint {

using json = nlohmann::json;

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

/// Nearest node to `from` among `pool` by centroid distance; ties go to the smaller id.
int nearest(const SkeletonTree& tree, const Vec3& from, const std::vector<int>& pool) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c : pool) {
        double d = (tree.nodes[c].centroid - from).squaredNorm();
        if (d < best_d || (d == best_d && c < best)) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::string node_name(const SkeletonTree& tree, int id) {
    return "G_{" + std::to_string(tree.nodes[id].layer) + "," + std::to_string(tree.nodes[id].index) + "}";
}

/// Candidate-set traversal shared by the greedy optimizer and the depth-first order.
PrintSequence candidate_walk(const SkeletonTree& tree, const std::vector<std::vector<int>>* pcgs, std::string name) {
    const int k = tree.size();
    std::vector<int> lower_left(k), blocked(k, 0);
    std::vector<char> printed(k, 0);
    for (int i = 0; i < k; ++i) lower_left[i] = static_cast<int>(tree.lower[i].size());
    if (pcgs) {
        for (int u = 0; u < k; ++u) {
            for (int c : (*pcgs)[u]) ++blocked[c];
        }
    }
    auto ready = [&](int c) { return !printed[c] && lower_left[c] == 0 && blocked[c] == 0; };

    PrintSequence seq;
    seq.strategy = std::move(name);
    int cur = -1;
    for (int step = 0; step < k; ++step) {
        int next = -1;
        if (cur < 0) {
            int min_layer = std::numeric_limits<int>::max();
            for (int c = 0; c < k; ++c) {
                if (ready(c)) min_layer = std::min(min_layer, tree.nodes[c].layer);
            }
            for (int c = 0; c < k; ++c) {
                if (ready(c) && tree.nodes[c].layer == min_layer &&
                    (next < 0 || lex_less(tree.nodes[c].centroid, tree.nodes[next].centroid)))
                    next = c;
            }
        } else {
            std::vector<int> up;
            for (int c : tree.upper[cur]) {
                if (ready(c)) up.push_back(c);
            }
            if (!up.empty()) {
                next = nearest(tree, tree.nodes[cur].centroid, up);
            } else {
                std::vector<int> pool;
                for (int c = 0; c < k; ++c) {
                    if (ready(c)) pool.push_back(c);
                }
                next = nearest(tree, tree.nodes[cur].centroid, pool);
            }
        }
        if (next < 0) {
            // every unprinted node waits on another one; follow the waits until they repeat
            auto waits_on = [&](int x) {
                for (int y : tree.lower[x]) {
                    if (!printed[y]) return y;
                }
                for (int y = 0; y < k; ++y) {
                    if (!printed[y] && pcgs && std::binary_search((*pcgs)[y].begin(), (*pcgs)[y].end(), x))
                        return y;
                }
                return -1;
            };
            int x = static_cast<int>(std::find(printed.begin(), printed.end(), 0) - printed.begin());
            std::vector<int> path;
            std::vector<int> seen_at(k, -1);
            while (x >= 0 && seen_at[x] < 0) {
                seen_at[x] = static_cast<int>(path.size());
                path.push_back(x);
                x = waits_on(x);
            }
            std::vector<int> cycle;
            if (x >= 0) cycle.assign(path.begin() + seen_at[x], path.end());
            std::string msg = "sequencing deadlock after " + std::to_string(step) + " of " + std::to_string(k) +
                              " sub-graphs; blocking cycle:";
            for (int c : cycle) msg += " " + node_name(tree, c);
            throw DeadlockError(msg, cycle);
        }
        seq.order.push_back(next);
        printed[next] = 1;
        for (int u : tree.upper[next]) --lower_left[u];
        if (pcgs) {
            for (int c : (*pcgs)[next]) --blocked[c];
        }
        cur = next;
    }
    annotate(seq, tree);
    return seq;
}

}  // namespace

std::vector<Anchor> node_anchors(const SkeletonTree& tree, const std::vector<LatticeGraph>& layers) {
    std::vector<Anchor> out;
    for (const auto& n : tree.nodes) {
        const auto& g = layers[n.graph];
        int best = n.vertices.front();
        for (int v : n.vertices) {
            if ((g.vertices[v].position - n.centroid).squaredNorm() <
                (g.vertices[best].position - n.centroid).squaredNorm())
                best = v;
        }
        out.push_back({g.vertices[best].position, normalized_or(g.vertices[best].normal, Vec3(0, 0, 1))});
    }
    return out;
}

void annotate(PrintSequence& seq, const SkeletonTree& tree) {
    seq.transitions.assign(seq.order.empty() ? 0 : seq.order.size() - 1, {});
    for (size_t i = 0; i + 1 < seq.order.size(); ++i) {
        const auto& up = tree.upper[seq.order[i]];
        seq.transitions[i].retraction = std::find(up.begin(), up.end(), seq.order[i + 1]) == up.end();
    }
}

PrintSequence lpt(const SkeletonTree& tree) {
    PrintSequence seq;
    seq.strategy = "LPT";
    int cur = -1;
    for (const auto& layer : tree.layer_nodes) {
        std::vector<int> pool = layer;
        while (!pool.empty()) {
            int next;
            if (cur < 0) {
                next = *std::min_element(pool.begin(), pool.end(), [&](int a, int b) {
                    return lex_less(tree.nodes[a].centroid, tree.nodes[b].centroid);
                });
            } else {
                next = nearest(tree, tree.nodes[cur].centroid, pool);
            }
            seq.order.push_back(next);
            pool.erase(std::find(pool.begin(), pool.end(), next));
            cur = next;
        }
    }
    annotate(seq, tree);
    return seq;
}

PrintSequence dpt(const SkeletonTree& tree) { return candidate_walk(tree, nullptr, "DPT"); }

PrintSequence greedy_sequence(const SkeletonTree& tree, const std::vector<std::vector<int>>& pcgs) {
    if (static_cast<int>(pcgs.size()) != tree.size()) throw ValidationError("PCG table does not match the tree");
    return candidate_walk(tree, &pcgs, "A4");
}

SequenceReport validate_sequence(PrintSequence& seq, const SkeletonTree& tree, const std::vector<Anchor>& anchors,
                                 const std::vector<std::vector<int>>& pcgs, const AirMoveOptions& opts) {
    const int k = tree.size();
    SequenceReport rep;
    std::vector<int> pos(k, -1);
    for (int i = 0; i < static_cast<int>(seq.order.size()); ++i) {
        int n = seq.order[i];
        if (n < 0 || n >= k || pos[n] >= 0) {
            rep.violations.push_back({i, n, 0, n >= 0 && n < k ? pos[n] : -1});
            continue;
        }
        pos[n] = i;
    }
    for (int n = 0; n < k; ++n) {
        if (pos[n] < 0) rep.violations.push_back({static_cast<int>(seq.order.size()), n, 0, -1});
    }
    for (int n = 0; n < k; ++n) {
        if (pos[n] < 0) continue;
        for (int l : tree.lower[n]) {
            if (pos[l] < 0 || pos[l] > pos[n]) rep.violations.push_back({pos[n], n, 1, l});
        }
    }
    if (static_cast<int>(pcgs.size()) == k) {
        for (int u = 0; u < k; ++u) {
            for (int c : pcgs[u]) {
                if (pos[c] >= 0 && pos[u] >= 0 && pos[c] < pos[u]) rep.violations.push_back({pos[c], c, 2, u});
            }
        }
    }
    std::sort(rep.violations.begin(), rep.violations.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.position, a.criterion, a.node, a.other) < std::tie(b.position, b.criterion, b.node, b.other);
    });
    for (const auto& v : rep.violations) {
        if (v.criterion == 2) rep.collision_free = false;
        else rep.valid = false;
    }

    annotate(seq, tree);
    Aabb printed;
    for (size_t i = 0; i + 1 < seq.order.size(); ++i) {
        int a = seq.order[i], b = seq.order[i + 1];
        if (a < 0 || a >= k || b < 0 || b >= k) continue;
        printed.expand(tree.nodes[a].bounds);
        if (!seq.transitions[i].retraction) continue;
        ++rep.retractions;
        Aabb work = printed;
        work.expand(anchors[a].point);
        work.expand(anchors[b].point);
        seq.transitions[i].air_move = safe_box_airmove(anchors[a].point, anchors[a].normal, anchors[b].point,
                                                       anchors[b].normal, SafeBox::around(work, opts.margin));
        rep.air_move += seq.transitions[i].air_move.length;
    }
    return rep;
}

std::string comparison_table(const std::vector<StrategyRow>& rows) {
    std::ostringstream out;
    out << "algorithm  retractions  air-move(mm)  collision-free  runtime(s)\n";
    for (const auto& r : rows) {
        char line[160];
        if (!r.error.empty()) {
            std::snprintf(line, sizeof line, "%-9s  %11s  %12s  %14s  %10.3f  %s\n", r.strategy.c_str(), "-", "-",
                          "-", r.runtime_s, r.error.c_str());
        } else {
            std::snprintf(line, sizeof line, "%-9s  %11d  %12.1f  %14s  %10.3f\n", r.strategy.c_str(),
                          r.report.retractions, r.report.air_move, r.report.collision_free ? "yes" : "no",
                          r.runtime_s);
        }
        out << line;
    }
    return out.str();
}

void write_sequence(const PrintSequence& seq, const SkeletonTree& tree, const std::filesystem::path& path) {
    json j;
    j["strategy"] = seq.strategy;
    json items = json::array();
    for (size_t i = 0; i < seq.order.size(); ++i) {
        int n = seq.order[i];
        json it{{"node", n}, {"layer", tree.nodes[n].layer}, {"index", tree.nodes[n].index}};
        if (i > 0 && i - 1 < seq.transitions.size()) {
            const auto& t = seq.transitions[i - 1];
            it["retraction"] = t.retraction;
            it["air_move"] = t.air_move.length;
            json poly = json::array();
            for (const auto& p : t.air_move.polyline) poly.push_back({p.x(), p.y(), p.z()});
            it["air_path"] = poly;
        }
        items.push_back(it);
    }
    j["order"] = items;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

PrintSequence read_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    PrintSequence seq;
    try {
        json j = json::parse(in);
        seq.strategy = j.at("strategy").get<std::string>();
        for (const auto& it : j.at("order")) {
            seq.order.push_back(it.at("node").get<int>());
            if (seq.order.size() == 1) continue;
            Transition t;
            t.retraction = it.value("retraction", false);
            t.air_move.length = it.value("air_move", 0.0);
            if (it.contains("air_path")) {
                for (const auto& p : it["air_path"])
                    t.air_move.polyline.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                                     p.at(2).get<double>());
            }
            seq.transitions.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return seq;
}

}  // namespace geoprint
