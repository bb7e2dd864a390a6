#include "fixtures.hpp"

#include <fstream>
#include <stdexcept>

#include "treefdr/tree_io.hpp"

namespace fixtures {

using namespace treefdr;

std::string path(const std::string& name) { return std::string(TREEFDR_FIXTURE_DIR) + "/" + name; }

HypothesisTree example_tree() { return read_tree_file(path("example_tree.tsv"), path("example_internal.tsv")); }

TruthAssignment example_truth(const HypothesisTree& tree) {
    std::ifstream in(path("example_truth.tsv"));
    return read_truth(in, tree);
}

NodeId by_label(const HypothesisTree& tree, const std::string& label) {
    for (std::uint32_t i = 1; i < tree.node_count(); ++i) {
        if (tree.label(NodeId{i}) == label) return NodeId{i};
    }
    throw std::runtime_error("no node labelled " + label);
}

std::vector<std::vector<bool>> example51_truth() {
    std::ifstream in(path("example51_truth.txt"));
    std::vector<std::vector<bool>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<bool> row;
        for (char c : line) row.push_back(c == '1');
        rows.push_back(std::move(row));
    }
    return rows;
}

HypothesisTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& opts) {
    std::uniform_int_distribution<std::size_t> levels_dist(1, opts.max_levels);
    std::uniform_int_distribution<std::size_t> family_dist(1, opts.max_family);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t levels = levels_dist(rng);

    std::vector<LabelPath> frontier{{}};
    std::vector<LabelPath> leaves;
    std::size_t nodes = 0;
    for (std::size_t depth = 0; depth < levels && !frontier.empty(); ++depth) {
        std::vector<LabelPath> next;
        for (const auto& parent : frontier) {
            const bool stop = depth > 0 && opts.ragged && unif(rng) < 0.15;
            std::size_t k = family_dist(rng);
            if (nodes >= opts.max_nodes || stop) k = 0;
            if (depth == 0 && k == 0) k = 1;
            k = std::min(k, opts.max_nodes > nodes ? opts.max_nodes - nodes : std::size_t{0});
            if (k == 0) {
                leaves.push_back(parent);
                continue;
            }
            for (std::size_t c = 0; c < k; ++c) {
                LabelPath child = parent;
                child.push_back("n" + std::to_string(nodes++));
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    for (auto& f : frontier) leaves.push_back(std::move(f));

    std::vector<LeafSpec> specs;
    for (auto& leaf : leaves) {
        if (leaf.empty()) continue;
        const double u = unif(rng);
        const double p = unif(rng) < opts.signal_fraction ? u * 1e-3 : u;
        specs.push_back({std::move(leaf), p});
    }
    return build_tree(specs);
}

TruthAssignment random_truth(std::mt19937_64& rng, const HypothesisTree& tree, double p_non_null) {
    std::bernoulli_distribution coin(p_non_null);
    std::vector<bool> flags(tree.leaves().size());
    for (std::size_t k = 0; k < flags.size(); ++k) flags[k] = coin(rng);
    return TruthAssignment::from_leaves(tree, flags);
}

RejectionResult random_rejections(std::mt19937_64& rng, const HypothesisTree& tree, double p_reject) {
    std::bernoulli_distribution coin(p_reject);
    std::vector<NodeId> rejected;
    std::vector<NodeId> stack{kRoot};
    while (!stack.empty()) {
        const NodeId cur = stack.back();
        stack.pop_back();
        for (NodeId c : tree.children(cur)) {
            if (!coin(rng)) continue;
            rejected.push_back(c);
            stack.push_back(c);
        }
    }
    return induce_coherent(tree, rejected);
}

}  // namespace fixtures
