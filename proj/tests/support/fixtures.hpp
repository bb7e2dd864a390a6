#pragma once

#include <random>
#include <string>
#include <vector>

#include "treefdr/hypothesis_tree.hpp"
#include "treefdr/procedures.hpp"

namespace fixtures {

std::string path(const std::string& name);

// The three-level example tree with user-supplied internal p-values.
treefdr::HypothesisTree example_tree();
treefdr::TruthAssignment example_truth(const treefdr::HypothesisTree& tree);
// Node whose own label is `label` (labels are unique in the example tree).
treefdr::NodeId by_label(const treefdr::HypothesisTree& tree, const std::string& label);

// Rows of the checked-in example 5.1 truth matrix.
std::vector<std::vector<bool>> example51_truth();

struct RandomTreeOptions {
    std::size_t max_nodes = 200;
    std::size_t max_levels = 4;
    std::size_t max_family = 5;
    bool ragged = true;
    double signal_fraction = 0.4;  // share of leaves given very small p-values
};

// Random tree with at most max_nodes real hypotheses and random leaf p-values.
treefdr::HypothesisTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& opts = {});

// Random leaf truth, closed upward.
treefdr::TruthAssignment random_truth(std::mt19937_64& rng, const treefdr::HypothesisTree& tree, double p_non_null);

// Random coherent rejection pattern: each child of a rejected node is
// rejected with probability p_reject.
treefdr::RejectionResult random_rejections(std::mt19937_64& rng, const treefdr::HypothesisTree& tree,
                                           double p_reject);

}  // namespace fixtures
