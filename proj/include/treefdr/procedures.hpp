#pragma once

// Step-up engines and the hierarchical procedures built on them.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "treefdr/combiners.hpp"
#include "treefdr/fraction.hpp"
#include "treefdr/hypothesis_tree.hpp"

namespace treefdr {

enum class Regime { PRDS, ArbitraryDependence };

std::string_view to_string(Regime regime) noexcept;
std::optional<Regime> parse_regime(std::string_view name) noexcept;

struct TestConfig {
    std::vector<double> q_levels;  // q^(1)..q^(L)
    // Used for internal nodes without a p-value; nullopt means they must all
    // be supplied.
    std::optional<CombinerKind> combiner = CombinerKind::Simes;
    Regime regime = Regime::PRDS;
};

// Relative slack on every p <= threshold comparison, absorbing round-off
// from decimal input.
inline constexpr double kThresholdSlack = 1e-12;

struct RejectionResult {
    explicit RejectionResult(std::size_t node_count = 0);

    // Indexed by NodeId. The root counts as rejected.
    std::vector<bool> rejected;
    // tested[i]: the family of children of i was examined.
    std::vector<bool> tested;
    // Bound applied to the family of children of i, when tested by a tree engine.
    std::vector<std::optional<double>> family_bound;
    // Product over ancestor families of |S| / |F|; the bound before the
    // level target (and, for arbitrary dependence, the g divisor) is applied.
    std::vector<std::optional<Fraction>> bound_factor;
    // Rejected children of i, in family order; empty unless tested[i].
    std::vector<std::vector<NodeId>> selection;
    // Rejected leaves above the deepest level: their branch ends there.
    std::vector<NodeId> ragged_stops;

    bool is_rejected(NodeId id) const { return rejected.at(id.index()); }
    bool family_tested(NodeId parent) const { return tested.at(parent.index()); }
    // Rejected real hypotheses, ascending id.
    std::vector<NodeId> rejected_nodes() const;
};

/// BH step-up. Returns rejected indices in ascending order.
std::vector<std::size_t> bh_stepup(std::span<const double> pvals, double q);

/// BY: BH at q / g(m).
std::vector<std::size_t> by_stepup(std::span<const double> pvals, double q);

/// TreeBH with the PRDS bounds (config.regime is ignored).
RejectionResult tree_bh(const HypothesisTree& tree, const TestConfig& config);

/// TreeBH with every family bound divided by g of the product of family
/// sizes along its path (config.regime is ignored).
RejectionResult tree_bh_arbitrary(const HypothesisTree& tree, const TestConfig& config);

/// Dispatches on config.regime.
RejectionResult run_tree_procedure(const HypothesisTree& tree, const TestConfig& config);

/// Rejection result for an arbitrary set of rejected nodes, closed upward so
/// it is coherent. No bounds are recorded.
RejectionResult induce_coherent(const HypothesisTree& tree, std::span<const NodeId> rejected);

// Two-level view of a tree: level-1 nodes, each with all of its leaf
// descendants pooled as its family.
struct TwoLevelView {
    HypothesisTree tree;
    std::vector<NodeId> original;  // flat NodeId -> NodeId in the source tree
};

TwoLevelView flatten_two_level(const HypothesisTree& tree);

struct TwoLevelResult {
    TwoLevelView view;
    RejectionResult result;  // indexed by view.tree
};

/// Two-level comparator (BB): TreeBH on the flattened two-level tree.
TwoLevelResult bb_two_level(const HypothesisTree& tree, double q1, double q2, CombinerKind combiner);

/// Map BB rejections back onto the source tree (upward closure).
RejectionResult project_to_tree(const HypothesisTree& tree, const TwoLevelResult& bb);

/// BH across all leaf p-values pooled. Rejected leaves in leaves() order.
std::vector<NodeId> bh_pooled(const HypothesisTree& tree, double q);

}  // namespace treefdr
