#pragma once

// Level-restricted and selective error measures for one realization.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "treefdr/fraction.hpp"
#include "treefdr/hypothesis_tree.hpp"
#include "treefdr/procedures.hpp"

namespace treefdr {

// Trees up to this many nodes get exact rational sFDP; larger ones use doubles.
inline constexpr std::size_t kExactMetricNodeLimit = 100000;

struct FamilyWeight {
    NodeId parent;  // the family is the children of this node
    double weight;
};

struct LevelReport {
    std::size_t level = 0;
    double fdp = 0.0;
    double sfdp = 0.0;
    double power = 0.0;
    std::vector<FamilyWeight> weights;
};

/// Weighted sum over tested level-`level` families of w_i * FDP_i, where
/// w_i is one over the product of selection-set sizes along the path.
Fraction sfdp_weighted_exact(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                             std::size_t level);

/// Same quantity by averaging null indicators of rejected level-`level`
/// hypotheses up the tree through the selection sets.
Fraction sfdp_recursive_exact(const HypothesisTree& tree, const RejectionResult& result,
                              const TruthAssignment& truth, std::size_t level);

double sfdp_weighted(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                     std::size_t level);
double sfdp_recursive(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                      std::size_t level);

/// Per-node intermediate values of the recursive form; entries for nodes
/// that are not selected (or below `level`) are zero.
std::vector<Fraction> sfdp_recursive_values(const HypothesisTree& tree, const RejectionResult& result,
                                            const TruthAssignment& truth, std::size_t level);

std::vector<std::pair<NodeId, Fraction>> family_weights(const HypothesisTree& tree, const RejectionResult& result,
                                                        std::size_t level);

/// False / total rejections among the given nodes that sit at `level`.
double level_fdp(const HypothesisTree& tree, std::span<const NodeId> rejected, const TruthAssignment& truth,
                 std::size_t level);

/// Rejected non-nulls at `level` over non-nulls at `level` (0 when none).
double level_power(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                   std::size_t level);

LevelReport level_report(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                         std::size_t level);

std::vector<LevelReport> level_reports(const HypothesisTree& tree, const RejectionResult& result,
                                       const TruthAssignment& truth);

}  // namespace treefdr
