#include "treefdr/metrics.hpp"

#include <algorithm>
#include <string>

#include "treefdr/error.hpp"

namespace treefdr {

namespace {

void check_inputs(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                  std::size_t level) {
    if (level == 0 || level > tree.levels())
        throw Error(ErrorCode::LevelOutOfRange,
                    "level " + std::to_string(level) + " outside 1.." + std::to_string(tree.levels()));
    if (result.rejected.size() != tree.node_count() || result.selection.size() != tree.node_count() ||
        result.tested.size() != tree.node_count())
        throw Error(ErrorCode::TreeMismatch, "rejection result does not match the tree");
    if (truth.size() != tree.node_count()) throw Error(ErrorCode::TreeMismatch, "truth does not match the tree");
}

std::size_t at_least_one(std::size_t n) { return std::max<std::size_t>(n, 1); }

template <class Num>
Num make_ratio(std::size_t num, std::size_t den) {
    if constexpr (std::is_same_v<Num, Fraction>) {
        return Fraction(static_cast<long long>(num), static_cast<long long>(den));
    } else {
        return static_cast<double>(num) / static_cast<double>(den);
    }
}

template <class Num>
Num family_fdp(const RejectionResult& result, const TruthAssignment& truth, NodeId parent) {
    const auto& selected = result.selection[parent.index()];
    std::size_t v = 0;
    for (NodeId s : selected) v += truth.is_null(s) ? 1 : 0;
    return make_ratio<Num>(v, at_least_one(selected.size()));
}

// Product of |S| over the families containing `node` and each of its
// non-root ancestors.
template <class Num>
Num path_selection_product(const HypothesisTree& tree, const RejectionResult& result, NodeId node) {
    Num prod = 1;
    for (NodeId a = node; a != kRoot;) {
        const NodeId p = tree.parent(a);
        prod *= static_cast<long long>(at_least_one(result.selection[p.index()].size()));
        a = p;
    }
    return prod;
}

template <class Num>
Num weighted_impl(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                  std::size_t level) {
    Num total = 0;
    for (NodeId parent : tree.nodes_at_level(level - 1)) {
        if (!result.tested[parent.index()] || tree.children(parent).empty()) continue;
        total += family_fdp<Num>(result, truth, parent) / path_selection_product<Num>(tree, result, parent);
    }
    return total;
}

template <class Num>
std::vector<Num> recursive_impl(const HypothesisTree& tree, const RejectionResult& result,
                                const TruthAssignment& truth, std::size_t level) {
    std::vector<Num> value(tree.node_count(), Num(0));
    for (NodeId id : tree.nodes_at_level(level)) {
        if (result.rejected[id.index()] && truth.is_null(id)) value[id.index()] = 1;
    }
    for (std::size_t k = level; k-- > 0;) {
        for (NodeId id : tree.nodes_at_level(k)) {
            if (!result.rejected[id.index()]) continue;
            const auto& selected = result.selection[id.index()];
            Num sum = 0;
            for (NodeId s : selected) sum += value[s.index()];
            value[id.index()] = sum / static_cast<long long>(at_least_one(selected.size()));
        }
    }
    return value;
}

bool use_exact(const HypothesisTree& tree) { return tree.node_count() <= kExactMetricNodeLimit; }

}  // namespace

Fraction sfdp_weighted_exact(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                             std::size_t level) {
    check_inputs(tree, result, truth, level);
    return weighted_impl<Fraction>(tree, result, truth, level);
}

Fraction sfdp_recursive_exact(const HypothesisTree& tree, const RejectionResult& result,
                              const TruthAssignment& truth, std::size_t level) {
    check_inputs(tree, result, truth, level);
    return recursive_impl<Fraction>(tree, result, truth, level)[kRoot.index()];
}

std::vector<Fraction> sfdp_recursive_values(const HypothesisTree& tree, const RejectionResult& result,
                                            const TruthAssignment& truth, std::size_t level) {
    check_inputs(tree, result, truth, level);
    return recursive_impl<Fraction>(tree, result, truth, level);
}

double sfdp_weighted(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                     std::size_t level) {
    check_inputs(tree, result, truth, level);
    if (use_exact(tree)) return to_double(weighted_impl<Fraction>(tree, result, truth, level));
    return weighted_impl<double>(tree, result, truth, level);
}

double sfdp_recursive(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                      std::size_t level) {
    check_inputs(tree, result, truth, level);
    if (use_exact(tree)) return to_double(recursive_impl<Fraction>(tree, result, truth, level)[kRoot.index()]);
    return recursive_impl<double>(tree, result, truth, level)[kRoot.index()];
}

std::vector<std::pair<NodeId, Fraction>> family_weights(const HypothesisTree& tree, const RejectionResult& result,
                                                        std::size_t level) {
    if (level == 0 || level > tree.levels()) throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
    std::vector<std::pair<NodeId, Fraction>> out;
    for (NodeId parent : tree.nodes_at_level(level - 1)) {
        if (!result.tested.at(parent.index()) || tree.children(parent).empty()) continue;
        out.emplace_back(parent, Fraction(1) / path_selection_product<Fraction>(tree, result, parent));
    }
    return out;
}

double level_fdp(const HypothesisTree& tree, std::span<const NodeId> rejected, const TruthAssignment& truth,
                 std::size_t level) {
    if (level == 0 || level > tree.levels()) throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
    if (truth.size() != tree.node_count()) throw Error(ErrorCode::TreeMismatch, "truth does not match the tree");
    std::size_t r = 0, v = 0;
    for (NodeId id : rejected) {
        if (!tree.is_valid(id)) throw Error(ErrorCode::InvalidNodeId, std::to_string(id.value));
        if (id == kRoot || tree.level(id) != level) continue;
        ++r;
        v += truth.is_null(id) ? 1 : 0;
    }
    return static_cast<double>(v) / static_cast<double>(at_least_one(r));
}

double level_power(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                   std::size_t level) {
    check_inputs(tree, result, truth, level);
    std::size_t hits = 0, non_null = 0;
    for (NodeId id : tree.nodes_at_level(level)) {
        if (truth.is_null(id)) continue;
        ++non_null;
        hits += result.rejected[id.index()] ? 1 : 0;
    }
    return non_null == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(non_null);
}

LevelReport level_report(const HypothesisTree& tree, const RejectionResult& result, const TruthAssignment& truth,
                         std::size_t level) {
    check_inputs(tree, result, truth, level);
    LevelReport rep;
    rep.level = level;
    const auto rejected = result.rejected_nodes();
    rep.fdp = level_fdp(tree, rejected, truth, level);
    rep.sfdp = sfdp_weighted(tree, result, truth, level);
    rep.power = level_power(tree, result, truth, level);
    for (auto& [parent, w] : family_weights(tree, result, level)) rep.weights.push_back({parent, to_double(w)});
    return rep;
}

std::vector<LevelReport> level_reports(const HypothesisTree& tree, const RejectionResult& result,
                                       const TruthAssignment& truth) {
    std::vector<LevelReport> out;
    for (std::size_t level = 1; level <= tree.levels(); ++level) out.push_back(level_report(tree, result, truth, level));
    return out;
}

}  // namespace treefdr
