#pragma once

#include "geoprint/safe_box.hpp"
#include "geoprint/skeleton.hpp"

#include <filesystem>
#include <string>

namespace geoprint {

struct Transition {
    bool retraction = false;  ///< the next node is not an upper node of the previous one
    AirMove air_move;         ///< safe-box route, filled by validate_sequence for retractions
};

struct PrintSequence {
    std::string strategy;
    std::vector<int> order;               ///< tree node ids
    std::vector<Transition> transitions;  ///< transitions[k] leads from order[k] to order[k + 1]
};

struct Violation {
    int position;  ///< index into the sequence
    int node;
    int criterion;  ///< 0 missing/duplicate node, 1 lower node not printed, 2 envelope collision
    int other;      ///< the unprinted lower node, or the later node whose envelope contains `node`
};

struct SequenceReport {
    int retractions = 0;
    double air_move = 0.0;
    bool collision_free = true;  ///< no Criterion 2 violation
    bool valid = true;           ///< permutation and Criterion 1 hold
    std::vector<Violation> violations;
};

/// Point and nozzle direction used as a sub-graph's air-move anchor: the vertex nearest the centroid.
struct Anchor {
    Vec3 point;
    Vec3 normal;
};
std::vector<Anchor> node_anchors(const SkeletonTree& tree, const std::vector<LatticeGraph>& layers);

PrintSequence lpt(const SkeletonTree& tree);
PrintSequence dpt(const SkeletonTree& tree);
/// Algorithm of candidate sets: Criterion 1 (lower nodes printed) and Criterion 2 (no unprinted node
/// lists the candidate as a PCG). Throws DeadlockError naming a blocking cycle.
PrintSequence greedy_sequence(const SkeletonTree& tree, const std::vector<std::vector<int>>& pcgs);

/// Marks retractions on a raw order.
void annotate(PrintSequence& seq, const SkeletonTree& tree);

struct AirMoveOptions {
    double margin = 55.0;  ///< safe box margin (nozzle length + 5 mm)
};

/// Checks every prefix against both criteria and routes each retraction over the safe box of the
/// geometry printed so far. Fills the air moves of `seq`.
SequenceReport validate_sequence(PrintSequence& seq, const SkeletonTree& tree, const std::vector<Anchor>& anchors,
                                 const std::vector<std::vector<int>>& pcgs, const AirMoveOptions& opts = {});

struct StrategyRow {
    std::string strategy;
    SequenceReport report;
    double runtime_s = 0.0;
    std::string error;  ///< deadlock message when the strategy failed
};
std::string comparison_table(const std::vector<StrategyRow>& rows);

void write_sequence(const PrintSequence& seq, const SkeletonTree& tree, const std::filesystem::path& path);
PrintSequence read_sequence(const std::filesystem::path& path);

}  // namespace geoprint
