#pragma once

// Text formats: tree input, internal p-values, leaf truth labels, rejection
// reports and level-metric exports. All are tab-delimited; blank lines and
// lines starting with '#' are skipped. Labels may not contain '/', which is
// the path separator in reports.

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "treefdr/hypothesis_tree.hpp"
#include "treefdr/metrics.hpp"
#include "treefdr/procedures.hpp"

namespace treefdr {

// label_1 <TAB> ... <TAB> label_k <TAB> pvalue
std::vector<std::pair<LabelPath, double>> read_path_values(std::istream& in);

HypothesisTree read_tree(std::istream& leaves);
HypothesisTree read_tree(std::istream& leaves, std::istream& internal_pvalues);
HypothesisTree read_tree_file(const std::string& path);
HypothesisTree read_tree_file(const std::string& path, const std::string& internal_path);

// label_1 <TAB> ... <TAB> label_k <TAB> {0,1,null,non-null}, one line per leaf.
TruthAssignment read_truth(std::istream& in, const HypothesisTree& tree);

std::string join_path(const LabelPath& path);
LabelPath split_path(const std::string& joined);

// path, level, pvalue, tested, rejected, family_bound (of the family the node
// belongs to). Numbers use the shortest round-trip form; NA when absent.
void write_rejection_report(std::ostream& out, const HypothesisTree& tree, const RejectionResult& result);

struct ParsedReport {
    HypothesisTree tree;
    RejectionResult result;
};
ParsedReport read_rejection_report(std::istream& in);

void write_level_table(std::ostream& out, std::span<const LevelReport> reports);
nlohmann::json level_reports_to_json(const HypothesisTree& tree, std::span<const LevelReport> reports);

std::string format_shortest(double x);

}  // namespace treefdr
