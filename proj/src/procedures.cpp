#include "treefdr/procedures.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "treefdr/error.hpp"

namespace treefdr {

namespace {

void check_bound(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidBound, "bound " + std::to_string(q) + " not in (0,1]");
}

void check_pvalues(std::span<const double> pvals) {
    if (pvals.empty()) throw Error(ErrorCode::EmptyFamily, "step-up needs at least one p-value");
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::PvalueOutOfRange, std::to_string(p));
    }
}

std::vector<std::size_t> stepup_unchecked(std::span<const double> pvals, double q) {
    const std::size_t m = pvals.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });

    std::size_t k = 0;
    for (std::size_t j = m; j >= 1; --j) {
        const double threshold = static_cast<double>(j) * q / static_cast<double>(m);
        if (pvals[order[j - 1]] <= threshold * (1.0 + kThresholdSlack)) {
            k = j;
            break;
        }
    }
    std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
    return out;
}

// g(m) for a family-size product that may exceed the direct-sum range.
double harmonic_of_product(double m) {
    if (m < 9.0e15) return harmonic_g(static_cast<std::uint64_t>(m));
    const double inv2 = 1.0 / (m * m);
    return std::log(m) + std::numbers::egamma + 0.5 / m - inv2 / 12.0;
}

HypothesisTree with_all_pvalues(const HypothesisTree& tree, const std::optional<CombinerKind>& combiner) {
    for (std::size_t i = 1; i < tree.node_count(); ++i) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        if (tree.pvalue(id)) continue;
        if (tree.is_leaf(id)) throw Error(ErrorCode::MissingLeafPvalue, "leaf " + std::to_string(i));
        if (!combiner) {
            std::string path;
            for (const auto& l : tree.path(id)) path += (path.empty() ? "" : "/") + l;
            throw Error(ErrorCode::MissingInternalPvalue, path);
        }
        return populate_internal_pvalues(tree, *combiner);
    }
    return tree;
}

bool consonance_expected(const HypothesisTree& tree, const TestConfig& config) {
    if (config.combiner != CombinerKind::Simes) return false;
    if (!std::is_sorted(config.q_levels.begin(), config.q_levels.end())) return false;
    for (std::size_t i = 1; i < tree.node_count(); ++i) {
        if (tree.pvalue_source(NodeId{static_cast<std::uint32_t>(i)}) == PvalueSource::User) return false;
    }
    return true;
}

RejectionResult run_engine(const HypothesisTree& input, const TestConfig& config, bool arbitrary) {
    const std::size_t L = input.levels();
    if (config.q_levels.size() != L)
        throw Error(ErrorCode::ConfigLengthMismatch, std::to_string(config.q_levels.size()) +
                                                         " bounds for a tree with " + std::to_string(L) + " levels");
    for (double q : config.q_levels) check_bound(q);

    const HypothesisTree tree = with_all_pvalues(input, config.combiner);
    [[maybe_unused]] const bool consonant = !arbitrary && consonance_expected(tree, config);

    RejectionResult r(tree.node_count());
    r.rejected[kRoot.index()] = true;

    // Product of family sizes from level 1 down to and including each tested family.
    std::vector<double> size_product(tree.node_count(), 0.0);

    std::vector<NodeId> queue{kRoot};
    r.bound_factor[kRoot.index()] = Fraction(1);
    size_product[kRoot.index()] = static_cast<double>(tree.children(kRoot).size());

    std::vector<double> pv;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId parent = queue[head];
        const auto family = tree.children(parent);
        const std::size_t level = tree.level(parent) + 1;

        double bound = to_double(*r.bound_factor[parent.index()]) * config.q_levels[level - 1];
        if (arbitrary) bound /= harmonic_of_product(size_product[parent.index()]);
        r.tested[parent.index()] = true;
        r.family_bound[parent.index()] = bound;

        pv.clear();
        for (NodeId c : family) pv.push_back(*tree.pvalue(c));
        const auto hits = stepup_unchecked(pv, bound);
        assert(!consonant || level == 1 || !hits.empty());

        auto& selected = r.selection[parent.index()];
        for (std::size_t h : hits) selected.push_back(family[h]);
        const Fraction share(static_cast<long long>(selected.size()), static_cast<long long>(family.size()));
        for (NodeId c : selected) {
            r.rejected[c.index()] = true;
            if (tree.is_leaf(c)) {
                if (level < L) r.ragged_stops.push_back(c);
                continue;
            }
            r.bound_factor[c.index()] = *r.bound_factor[parent.index()] * share;
            size_product[c.index()] = size_product[parent.index()] * static_cast<double>(tree.children(c).size());
            queue.push_back(c);
        }
    }
    return r;
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
    return regime == Regime::PRDS ? "prds" : "arbitrary";
}

std::optional<Regime> parse_regime(std::string_view name) noexcept {
    if (name == "prds") return Regime::PRDS;
    if (name == "arbitrary") return Regime::ArbitraryDependence;
    return std::nullopt;
}

RejectionResult::RejectionResult(std::size_t node_count)
    : rejected(node_count, false),
      tested(node_count, false),
      family_bound(node_count),
      bound_factor(node_count),
      selection(node_count) {}

std::vector<NodeId> RejectionResult::rejected_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 1; i < rejected.size(); ++i) {
        if (rejected[i]) out.push_back(NodeId{static_cast<std::uint32_t>(i)});
    }
    return out;
}

std::vector<std::size_t> bh_stepup(std::span<const double> pvals, double q) {
    check_bound(q);
    check_pvalues(pvals);
    return stepup_unchecked(pvals, q);
}

std::vector<std::size_t> by_stepup(std::span<const double> pvals, double q) {
    check_bound(q);
    check_pvalues(pvals);
    return stepup_unchecked(pvals, q / harmonic_g(pvals.size()));
}

RejectionResult tree_bh(const HypothesisTree& tree, const TestConfig& config) {
    return run_engine(tree, config, false);
}

RejectionResult tree_bh_arbitrary(const HypothesisTree& tree, const TestConfig& config) {
    return run_engine(tree, config, true);
}

RejectionResult run_tree_procedure(const HypothesisTree& tree, const TestConfig& config) {
    return run_engine(tree, config, config.regime == Regime::ArbitraryDependence);
}

RejectionResult induce_coherent(const HypothesisTree& tree, std::span<const NodeId> rejected) {
    RejectionResult r(tree.node_count());
    r.rejected[kRoot.index()] = true;
    for (NodeId id : rejected) {
        if (!tree.is_valid(id)) throw Error(ErrorCode::InvalidNodeId, std::to_string(id.value));
        for (NodeId cur = id; !r.rejected[cur.index()]; cur = tree.parent(cur)) r.rejected[cur.index()] = true;
    }
    const std::size_t L = tree.levels();
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
        const NodeId id{static_cast<std::uint32_t>(i)};
        if (!r.rejected[i]) continue;
        if (tree.is_leaf(id)) {
            if (tree.level(id) < L) r.ragged_stops.push_back(id);
            continue;
        }
        r.tested[i] = true;
        for (NodeId c : tree.children(id)) {
            if (r.rejected[c.index()]) r.selection[i].push_back(c);
        }
    }
    return r;
}

TwoLevelView flatten_two_level(const HypothesisTree& tree) {
    TreeBuilder builder;
    std::vector<std::pair<LabelPath, NodeId>> order;
    for (NodeId top : tree.children(kRoot)) {
        if (tree.is_leaf(top)) {
            builder.add_leaf({tree.label(top)}, tree.pvalue(top).value_or(1.0));
            order.push_back({{tree.label(top)}, top});
            continue;
        }
        if (tree.pvalue_source(top) == PvalueSource::User) builder.set_internal_pvalue({tree.label(top)}, *tree.pvalue(top));
        order.push_back({{tree.label(top)}, top});
        // Depth-first so pooled leaves keep the source tree's left-to-right order.
        std::vector<NodeId> stack(tree.children(top).rbegin(), tree.children(top).rend());
        while (!stack.empty()) {
            const NodeId cur = stack.back();
            stack.pop_back();
            if (!tree.is_leaf(cur)) {
                auto kids = tree.children(cur);
                stack.insert(stack.end(), kids.rbegin(), kids.rend());
                continue;
            }
            auto full = tree.path(cur);
            std::string rest;
            for (std::size_t k = 1; k < full.size(); ++k) rest += (k > 1 ? "/" : "") + full[k];
            LabelPath flat{tree.label(top), rest};
            builder.add_leaf(flat, tree.pvalue(cur).value_or(1.0));
            order.push_back({flat, cur});
        }
    }
    TwoLevelView view{builder.build(), {}};
    view.original.assign(view.tree.node_count(), kRoot);
    for (const auto& [path, source] : order) view.original[view.tree.find(path)->index()] = source;
    return view;
}

TwoLevelResult bb_two_level(const HypothesisTree& tree, double q1, double q2, CombinerKind combiner) {
    TwoLevelView view = flatten_two_level(tree);
    TestConfig config;
    config.combiner = combiner;
    config.q_levels = view.tree.levels() == 1 ? std::vector<double>{q1} : std::vector<double>{q1, q2};
    if (view.tree.levels() == 1) check_bound(q2);
    RejectionResult result = tree_bh(view.tree, config);
    return {std::move(view), std::move(result)};
}

RejectionResult project_to_tree(const HypothesisTree& tree, const TwoLevelResult& bb) {
    std::vector<NodeId> hits;
    for (NodeId id : bb.result.rejected_nodes()) hits.push_back(bb.view.original[id.index()]);
    return induce_coherent(tree, hits);
}

std::vector<NodeId> bh_pooled(const HypothesisTree& tree, double q) {
    const auto leaves = tree.leaves();
    std::vector<double> pv;
    pv.reserve(leaves.size());
    for (NodeId leaf : leaves) {
        auto p = tree.pvalue(leaf);
        if (!p) throw Error(ErrorCode::MissingLeafPvalue, "leaf " + std::to_string(leaf.value));
        pv.push_back(*p);
    }
    std::vector<NodeId> out;
    for (std::size_t k : bh_stepup(pv, q)) out.push_back(leaves[k]);
    return out;
}

}  // namespace treefdr
