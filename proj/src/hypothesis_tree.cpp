#include "treefdr/hypothesis_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treefdr/error.hpp"

namespace treefdr {

namespace {

std::string join(const LabelPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '/';
        out += path[i];
    }
    return out;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }  // false for NaN

void check_valid(const HypothesisTree& tree, NodeId id) {
    if (!tree.is_valid(id))
        throw Error(ErrorCode::InvalidNodeId, "node " + std::to_string(id.value) + " not in tree of " +
                                                  std::to_string(tree.node_count()) + " nodes");
}

}  // namespace

NodeId HypothesisTree::parent(NodeId id) const {
    check_valid(*this, id);
    if (id == kRoot) throw Error(ErrorCode::RootHasNoAncestors, "root has no parent");
    return shape_->parent[id.index()];
}

LabelPath HypothesisTree::path(NodeId id) const {
    check_valid(*this, id);
    LabelPath out;
    for (NodeId cur = id; cur != kRoot; cur = shape_->parent[cur.index()]) out.push_back(label(cur));
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<NodeId> HypothesisTree::find(const LabelPath& path) const {
    NodeId cur = kRoot;
    for (const auto& label : path) {
        auto it = shape_->lookup.find(std::pair{cur.value, label});
        if (it == shape_->lookup.end()) return std::nullopt;
        cur = it->second;
    }
    return cur;
}

std::size_t HypothesisTree::leaf_index(NodeId leaf) const {
    check_valid(*this, leaf);
    if (!is_leaf(leaf)) throw Error(ErrorCode::InvalidNodeId, "node " + std::to_string(leaf.value) + " is not a leaf");
    return shape_->leaf_position[leaf.index()];
}

std::optional<double> HypothesisTree::pvalue(NodeId id) const {
    check_valid(*this, id);
    if (source_[id.index()] == PvalueSource::None) return std::nullopt;
    return pvalue_[id.index()];
}

HypothesisTree HypothesisTree::with_leaf_pvalues(std::span<const double> leaf_pvalues) const {
    if (leaf_pvalues.size() != shape_->leaves.size())
        throw Error(ErrorCode::ValidationError, "expected " + std::to_string(shape_->leaves.size()) +
                                                    " leaf p-values, got " + std::to_string(leaf_pvalues.size()));
    HypothesisTree out = *this;
    out.warnings_.clear();
    for (std::size_t i = 0; i < out.source_.size(); ++i) {
        if (out.source_[i] == PvalueSource::Derived) out.source_[i] = PvalueSource::None;
    }
    for (std::size_t k = 0; k < leaf_pvalues.size(); ++k) {
        const double p = leaf_pvalues[k];
        if (!is_probability(p))
            throw Error(ErrorCode::PvalueOutOfRange, join(path(shape_->leaves[k])) + " has p-value " + std::to_string(p));
        out.pvalue_[shape_->leaves[k].index()] = p;
    }
    return out;
}

HypothesisTree HypothesisTree::with_derived_pvalues(std::span<const std::optional<double>> derived,
                                                    std::vector<std::string> extra_warnings) const {
    if (derived.size() != node_count())
        throw Error(ErrorCode::ValidationError, "derived p-value vector has wrong length");
    HypothesisTree out = *this;
    for (std::size_t i = 1; i < derived.size(); ++i) {
        if (!derived[i] || out.source_[i] != PvalueSource::None) continue;
        if (!is_probability(*derived[i]))
            throw Error(ErrorCode::PvalueOutOfRange, join(path(NodeId{static_cast<std::uint32_t>(i)})));
        out.pvalue_[i] = *derived[i];
        out.source_[i] = PvalueSource::Derived;
    }
    for (auto& w : extra_warnings) out.warnings_.push_back(std::move(w));
    return out;
}

std::uint32_t TreeBuilder::child(std::uint32_t parent, const std::string& label) {
    auto it = lookup_.find(std::pair{parent, label});
    if (it != lookup_.end()) return it->second.value;
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(label);
    parent_.push_back(parent);
    children_.emplace_back();
    leaf_pvalue_.emplace_back();
    children_[parent].push_back(NodeId{id});
    lookup_.emplace(std::pair{parent, label}, NodeId{id});
    return id;
}

void TreeBuilder::add_leaf(const LabelPath& path, double pvalue, std::optional<std::size_t> line) {
    if (path.empty()) throw Error(ErrorCode::ValidationError, "empty label path", line);
    if (!is_probability(pvalue)) {
        std::ostringstream os;
        os << join(path) << " has p-value " << pvalue << " outside [0,1]";
        throw Error(ErrorCode::PvalueOutOfRange, os.str(), line);
    }
    // Check before mutating so a failed call leaves the builder unchanged.
    std::uint32_t cur = 0;
    std::size_t depth = 0;
    for (; depth < path.size(); ++depth) {
        auto it = lookup_.find(std::pair{cur, path[depth]});
        if (it == lookup_.end()) break;
        cur = it->second.value;
        if (depth + 1 < path.size() && leaf_pvalue_[cur])
            throw Error(ErrorCode::InconsistentDepth,
                        join(LabelPath(path.begin(), path.begin() + depth + 1)) + " is already a leaf", line);
    }
    if (depth == path.size()) {
        if (leaf_pvalue_[cur]) throw Error(ErrorCode::DuplicateLeafPath, join(path), line);
        throw Error(ErrorCode::InconsistentDepth, join(path) + " is already an internal node", line);
    }
    for (; depth < path.size(); ++depth) cur = child(cur, path[depth]);
    leaf_pvalue_[cur] = pvalue;
}

void TreeBuilder::set_internal_pvalue(const LabelPath& path, double pvalue, std::optional<std::size_t> line) {
    if (path.empty()) throw Error(ErrorCode::ValidationError, "empty label path", line);
    if (!is_probability(pvalue)) {
        std::ostringstream os;
        os << join(path) << " has p-value " << pvalue << " outside [0,1]";
        throw Error(ErrorCode::PvalueOutOfRange, os.str(), line);
    }
    for (const auto& p : internal_) {
        if (p.path == path) throw Error(ErrorCode::ValidationError, "duplicate internal p-value for " + join(path), line);
    }
    internal_.push_back({path, pvalue, line});
}

HypothesisTree TreeBuilder::build() const {
    if (labels_.size() == 1) throw Error(ErrorCode::EmptyInput, "no leaves");

    auto shape = std::make_shared<HypothesisTree::Shape>();
    const std::size_t n = labels_.size();
    shape->labels = labels_;
    shape->children = children_;
    shape->lookup = lookup_;
    shape->parent.resize(n);
    shape->level.assign(n, 0);
    shape->leaf_position.assign(n, 0);

    // Parents always precede their children in id order.
    std::uint32_t max_level = 0;
    for (std::size_t i = 1; i < n; ++i) {
        shape->parent[i] = NodeId{parent_[i]};
        shape->level[i] = shape->level[parent_[i]] + 1;
        max_level = std::max(max_level, shape->level[i]);
    }
    shape->by_level.resize(max_level + 1);
    // Breadth-first so that within a level, nodes follow parent order.
    std::vector<NodeId> queue{kRoot};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId id = queue[head];
        shape->by_level[shape->level[id.index()]].push_back(id);
        for (NodeId c : children_[id.index()]) queue.push_back(c);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (children_[i].empty()) {
            shape->leaf_position[i] = shape->leaves.size();
            shape->leaves.push_back(NodeId{static_cast<std::uint32_t>(i)});
        }
    }

    HypothesisTree tree;
    tree.shape_ = std::move(shape);
    tree.pvalue_.assign(n, 1.0);
    tree.source_.assign(n, PvalueSource::None);
    for (std::size_t i = 1; i < n; ++i) {
        if (leaf_pvalue_[i]) {
            tree.pvalue_[i] = *leaf_pvalue_[i];
            tree.source_[i] = PvalueSource::Leaf;
        }
    }
    for (const auto& p : internal_) {
        auto id = tree.find(p.path);
        if (!id) throw Error(ErrorCode::ValidationError, "internal p-value for unknown node " + join(p.path), p.line);
        if (tree.is_leaf(*id))
            throw Error(ErrorCode::ValidationError, join(p.path) + " is a leaf, not an internal node", p.line);
        tree.pvalue_[id->index()] = p.pvalue;
        tree.source_[id->index()] = PvalueSource::User;
    }
    return tree;
}

HypothesisTree build_tree(std::span<const LeafSpec> leaves) { return build_tree(leaves, {}); }

HypothesisTree build_tree(std::span<const LeafSpec> leaves, std::span<const LeafSpec> internal_pvalues) {
    if (leaves.empty()) throw Error(ErrorCode::EmptyInput, "no leaf paths");
    TreeBuilder builder;
    for (const auto& leaf : leaves) builder.add_leaf(leaf.path, leaf.pvalue);
    for (const auto& internal : internal_pvalues) builder.set_internal_pvalue(internal.path, internal.pvalue);
    return builder.build();
}

std::span<const NodeId> family_of(const HypothesisTree& tree, NodeId parent) {
    check_valid(tree, parent);
    return tree.children(parent);
}

std::vector<NodeId> ancestors_of(const HypothesisTree& tree, NodeId node) {
    check_valid(tree, node);
    if (node == kRoot) throw Error(ErrorCode::RootHasNoAncestors, "root has no ancestors");
    std::vector<NodeId> out;
    out.reserve(tree.level(node));
    NodeId cur = node;
    do {
        cur = tree.parent(cur);
        out.push_back(cur);
    } while (cur != kRoot);
    return out;
}

std::vector<LeafSpec> leaf_specs(const HypothesisTree& tree) {
    std::vector<LeafSpec> out;
    out.reserve(tree.leaves().size());
    for (NodeId leaf : tree.leaves()) out.push_back({tree.path(leaf), tree.pvalue(leaf).value_or(1.0)});
    return out;
}

TruthAssignment TruthAssignment::from_leaves(const HypothesisTree& tree, const std::vector<bool>& leaf_non_null) {
    if (leaf_non_null.size() != tree.leaves().size())
        throw Error(ErrorCode::InconsistentTruth, "expected " + std::to_string(tree.leaves().size()) +
                                                      " leaf labels, got " + std::to_string(leaf_non_null.size()));
    std::vector<bool> v(tree.node_count(), false);
    for (std::size_t k = 0; k < leaf_non_null.size(); ++k) {
        if (!leaf_non_null[k]) continue;
        for (NodeId cur = tree.leaves()[k];; cur = tree.parent(cur)) {
            if (v[cur.index()]) break;
            v[cur.index()] = true;
            if (cur == kRoot) break;
        }
    }
    return TruthAssignment(std::move(v));
}

TruthAssignment TruthAssignment::from_nodes(const HypothesisTree& tree, std::vector<bool> node_non_null) {
    if (node_non_null.size() != tree.node_count())
        throw Error(ErrorCode::InconsistentTruth, "expected " + std::to_string(tree.node_count()) + " labels, got " +
                                                      std::to_string(node_non_null.size()));
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        auto kids = tree.children(id);
        if (kids.empty()) continue;
        const bool any = std::any_of(kids.begin(), kids.end(), [&](NodeId c) { return node_non_null[c.index()]; });
        if (any != node_non_null[i]) {
            const std::string name = id == kRoot ? std::string("root") : join(tree.path(id));
            throw Error(ErrorCode::InconsistentTruth,
                        name + " labelled " + (node_non_null[i] ? "non-null" : "null") +
                            " but its children say otherwise");
        }
    }
    return TruthAssignment(std::move(node_non_null));
}

std::size_t TruthAssignment::non_null_count(const HypothesisTree& tree, std::size_t level) const {
    if (level == 0 || level > tree.levels())
        throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level));
    std::size_t n = 0;
    for (NodeId id : tree.nodes_at_level(level)) n += non_null_[id.index()] ? 1 : 0;
    return n;
}

}  // namespace treefdr
