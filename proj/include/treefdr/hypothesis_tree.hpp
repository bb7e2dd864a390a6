#pragma once

// Tree-of-families data model. Node 0 is the synthetic root; real hypotheses
// live at levels 1..L and every non-root node belongs to exactly one family
// (the children of its parent).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace treefdr {

struct NodeId {
    std::uint32_t value = 0;

    constexpr std::size_t index() const noexcept { return value; }
    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kRoot{0};

using LabelPath = std::vector<std::string>;

struct LeafSpec {
    LabelPath path;
    double pvalue = 1.0;
};

enum class PvalueSource : std::uint8_t { None, Leaf, User, Derived };

class HypothesisTree {
public:
    std::size_t node_count() const noexcept { return shape_->labels.size(); }
    std::size_t levels() const noexcept { return shape_->by_level.size() - 1; }
    bool is_valid(NodeId id) const noexcept { return id.index() < node_count(); }

    std::size_t level(NodeId id) const { return shape_->level.at(id.index()); }
    NodeId parent(NodeId id) const;
    std::span<const NodeId> children(NodeId id) const { return shape_->children.at(id.index()); }
    bool is_leaf(NodeId id) const { return id != kRoot && children(id).empty(); }
    const std::string& label(NodeId id) const { return shape_->labels.at(id.index()); }
    LabelPath path(NodeId id) const;
    std::optional<NodeId> find(const LabelPath& path) const;

    // Leaves in construction order; the order used by with_leaf_pvalues.
    std::span<const NodeId> leaves() const noexcept { return shape_->leaves; }
    std::span<const NodeId> nodes_at_level(std::size_t level) const { return shape_->by_level.at(level); }
    // Position of a leaf within leaves().
    std::size_t leaf_index(NodeId leaf) const;

    std::optional<double> pvalue(NodeId id) const;
    PvalueSource pvalue_source(NodeId id) const { return source_.at(id.index()); }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Same shape, new leaf p-values. Combiner-derived internal p-values are
    // dropped; user-supplied ones are kept.
    HypothesisTree with_leaf_pvalues(std::span<const double> leaf_pvalues) const;
    // Same shape and p-values with derived values filled in for internal nodes.
    // Entries for nodes that already carry a p-value are ignored.
    HypothesisTree with_derived_pvalues(std::span<const std::optional<double>> derived,
                                        std::vector<std::string> extra_warnings) const;

    bool same_shape(const HypothesisTree& other) const noexcept { return shape_ == other.shape_; }

private:
    friend class TreeBuilder;

    struct Shape {
        std::vector<std::string> labels;
        std::vector<NodeId> parent;
        std::vector<std::uint32_t> level;
        std::vector<std::vector<NodeId>> children;
        std::vector<NodeId> leaves;
        std::vector<std::size_t> leaf_position;
        std::vector<std::vector<NodeId>> by_level;
        std::map<std::pair<std::uint32_t, std::string>, NodeId, std::less<>> lookup;
    };

    HypothesisTree() = default;

    std::shared_ptr<const Shape> shape_;
    std::vector<double> pvalue_;
    std::vector<PvalueSource> source_;
    std::vector<std::string> warnings_;
};

// Incremental construction from label paths. `line` is attached to any error
// raised for that entry so file readers can report positions.
class TreeBuilder {
public:
    void add_leaf(const LabelPath& path, double pvalue, std::optional<std::size_t> line = std::nullopt);
    void set_internal_pvalue(const LabelPath& path, double pvalue,
                             std::optional<std::size_t> line = std::nullopt);
    HypothesisTree build() const;

private:
    struct Pending {
        LabelPath path;
        double pvalue;
        std::optional<std::size_t> line;
    };
    std::uint32_t child(std::uint32_t parent, const std::string& label);

    std::vector<std::string> labels_{""};
    std::vector<std::uint32_t> parent_{0};
    std::vector<std::vector<NodeId>> children_{{}};
    std::vector<std::optional<double>> leaf_pvalue_{std::nullopt};
    std::map<std::pair<std::uint32_t, std::string>, NodeId, std::less<>> lookup_;
    std::vector<Pending> internal_;
};

HypothesisTree build_tree(std::span<const LeafSpec> leaves);
HypothesisTree build_tree(std::span<const LeafSpec> leaves, std::span<const LeafSpec> internal_pvalues);

std::span<const NodeId> family_of(const HypothesisTree& tree, NodeId parent);
// [P^1(i), P^2(i), ..., root]
std::vector<NodeId> ancestors_of(const HypothesisTree& tree, NodeId node);
// Leaf paths with their p-values, in leaves() order.
std::vector<LeafSpec> leaf_specs(const HypothesisTree& tree);

// Null / non-null label for every node, consistent with the tree: a node is
// non-null exactly when one of its leaf descendants is.
class TruthAssignment {
public:
    static TruthAssignment from_leaves(const HypothesisTree& tree, const std::vector<bool>& leaf_non_null);
    static TruthAssignment from_nodes(const HypothesisTree& tree, std::vector<bool> node_non_null);

    bool is_non_null(NodeId id) const { return non_null_.at(id.index()); }
    bool is_null(NodeId id) const { return !is_non_null(id); }
    std::size_t size() const noexcept { return non_null_.size(); }
    std::size_t non_null_count(const HypothesisTree& tree, std::size_t level) const;

private:
    explicit TruthAssignment(std::vector<bool> v) : non_null_(std::move(v)) {}
    std::vector<bool> non_null_;
};

}  // namespace treefdr
