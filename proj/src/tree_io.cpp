#include "treefdr/tree_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "treefdr/error.hpp"

namespace treefdr {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> fields;
};

std::vector<Line> read_lines(std::istream& in) {
    std::vector<Line> out;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        const auto first = text.find_first_not_of(" \t");
        if (first == std::string::npos || text[first] == '#') continue;
        Line line{number, {}};
        std::size_t start = 0;
        for (;;) {
            const auto tab = text.find('\t', start);
            line.fields.push_back(text.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        out.push_back(std::move(line));
    }
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed");
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "not a number: '" + s + "'", line);
    return v;
}

LabelPath labels_of(const Line& line, std::size_t count) {
    LabelPath path(line.fields.begin(), line.fields.begin() + static_cast<std::ptrdiff_t>(count));
    for (const auto& l : path) {
        if (l.empty()) throw Error(ErrorCode::ParseError, "empty label", line.number);
        if (l.find('/') != std::string::npos)
            throw Error(ErrorCode::ParseError, "label '" + l + "' contains '/'", line.number);
    }
    return path;
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return in;
}

HypothesisTree build_from(std::istream& leaves, std::istream* internal) {
    TreeBuilder builder;
    bool any = false;
    for (const auto& line : read_lines(leaves)) {
        if (line.fields.size() < 2)
            throw Error(ErrorCode::ParseError, "expected labels followed by a p-value", line.number);
        const double p = parse_double(line.fields.back(), line.number);
        builder.add_leaf(labels_of(line, line.fields.size() - 1), p, line.number);
        any = true;
    }
    if (!any) throw Error(ErrorCode::EmptyInput, "tree file has no leaves");
    if (internal) {
        for (const auto& line : read_lines(*internal)) {
            if (line.fields.size() < 2)
                throw Error(ErrorCode::ParseError, "expected a path followed by a p-value", line.number);
            const double p = parse_double(line.fields.back(), line.number);
            builder.set_internal_pvalue(labels_of(line, line.fields.size() - 1), p, line.number);
        }
    }
    return builder.build();
}

}  // namespace

std::string format_shortest(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<std::pair<LabelPath, double>> read_path_values(std::istream& in) {
    std::vector<std::pair<LabelPath, double>> out;
    for (const auto& line : read_lines(in)) {
        if (line.fields.size() < 2)
            throw Error(ErrorCode::ParseError, "expected labels followed by a value", line.number);
        out.emplace_back(labels_of(line, line.fields.size() - 1), parse_double(line.fields.back(), line.number));
    }
    return out;
}

HypothesisTree read_tree(std::istream& leaves) { return build_from(leaves, nullptr); }

HypothesisTree read_tree(std::istream& leaves, std::istream& internal_pvalues) {
    return build_from(leaves, &internal_pvalues);
}

HypothesisTree read_tree_file(const std::string& path) {
    auto in = open(path);
    return read_tree(in);
}

HypothesisTree read_tree_file(const std::string& path, const std::string& internal_path) {
    auto in = open(path);
    auto internal = open(internal_path);
    return read_tree(in, internal);
}

TruthAssignment read_truth(std::istream& in, const HypothesisTree& tree) {
    std::vector<int> label(tree.leaves().size(), -1);
    for (const auto& line : read_lines(in)) {
        if (line.fields.size() < 2)
            throw Error(ErrorCode::ParseError, "expected a leaf path followed by a label", line.number);
        const auto path = labels_of(line, line.fields.size() - 1);
        const auto& v = line.fields.back();
        int flag = -1;
        if (v == "1" || v == "non-null") flag = 1;
        if (v == "0" || v == "null") flag = 0;
        if (flag < 0) throw Error(ErrorCode::ParseError, "truth label must be 0, 1, null or non-null", line.number);
        auto id = tree.find(path);
        if (!id) throw Error(ErrorCode::TreeMismatch, join_path(path) + " is not in the tree", line.number);
        if (!tree.is_leaf(*id)) throw Error(ErrorCode::TreeMismatch, join_path(path) + " is not a leaf", line.number);
        auto& slot = label[tree.leaf_index(*id)];
        if (slot >= 0) throw Error(ErrorCode::ParseError, "duplicate truth for " + join_path(path), line.number);
        slot = flag;
    }
    std::vector<bool> flags;
    for (std::size_t k = 0; k < label.size(); ++k) {
        if (label[k] < 0)
            throw Error(ErrorCode::TreeMismatch, "no truth label for " + join_path(tree.path(tree.leaves()[k])));
        flags.push_back(label[k] == 1);
    }
    return TruthAssignment::from_leaves(tree, flags);
}

std::string join_path(const LabelPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '/';
        out += path[i];
    }
    return out;
}

LabelPath split_path(const std::string& joined) {
    LabelPath out;
    std::size_t start = 0;
    for (;;) {
        const auto slash = joined.find('/', start);
        out.push_back(joined.substr(start, slash - start));
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return out;
}

void write_rejection_report(std::ostream& out, const HypothesisTree& tree, const RejectionResult& result) {
    if (result.rejected.size() != tree.node_count())
        throw Error(ErrorCode::TreeMismatch, "rejection result does not match the tree");
    out << "path\tlevel\tpvalue\ttested\trejected\tfamily_bound\n";
    for (std::size_t level = 1; level <= tree.levels(); ++level) {
        for (NodeId id : tree.nodes_at_level(level)) {
            const NodeId parent = tree.parent(id);
            const auto p = tree.pvalue(id);
            const auto& bound = result.family_bound[parent.index()];
            out << join_path(tree.path(id)) << '\t' << level << '\t' << (p ? format_shortest(*p) : "NA") << '\t'
                << (result.tested[parent.index()] ? 1 : 0) << '\t' << (result.rejected[id.index()] ? 1 : 0) << '\t'
                << (bound ? format_shortest(*bound) : "NA") << '\n';
        }
    }
}

ParsedReport read_rejection_report(std::istream& in) {
    auto lines = read_lines(in);
    if (lines.empty()) throw Error(ErrorCode::EmptyInput, "empty rejection report");
    const std::vector<std::string> header{"path", "level", "pvalue", "tested", "rejected", "family_bound"};
    if (lines.front().fields != header)
        throw Error(ErrorCode::ParseError, "unexpected rejection report header", lines.front().number);

    struct Row {
        LabelPath path;
        std::size_t line;
        double p;
        bool rejected;
    };
    std::vector<Row> rows;
    std::set<LabelPath> prefixes;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& f = lines[k].fields;
        const auto n = lines[k].number;
        if (f.size() != header.size()) throw Error(ErrorCode::ParseError, "expected 6 columns", n);
        auto path = split_path(f[0]);
        if (std::to_string(path.size()) != f[1]) throw Error(ErrorCode::ParseError, "level does not match path", n);
        if (f[4] != "0" && f[4] != "1") throw Error(ErrorCode::ParseError, "rejected must be 0 or 1", n);
        const double p = f[2] == "NA" ? 1.0 : parse_double(f[2], n);
        for (std::size_t d = 1; d < path.size(); ++d) prefixes.insert(LabelPath(path.begin(), path.begin() + d));
        rows.push_back({std::move(path), n, p, f[4] == "1"});
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "rejection report has no rows");

    TreeBuilder builder;
    for (const auto& r : rows) {
        if (!prefixes.count(r.path)) builder.add_leaf(r.path, r.p, r.line);
    }
    HypothesisTree tree = builder.build();
    std::vector<NodeId> rejected;
    for (const auto& r : rows) {
        auto id = tree.find(r.path);
        if (!id) throw Error(ErrorCode::TreeMismatch, "row does not belong to the tree", r.line);
        if (r.rejected) rejected.push_back(*id);
    }
    std::map<LabelPath, bool> is_rejected;
    for (const auto& r : rows) is_rejected[r.path] = r.rejected;
    for (const auto& r : rows) {
        if (r.rejected && r.path.size() > 1) {
            const auto it = is_rejected.find(LabelPath(r.path.begin(), r.path.end() - 1));
            if (it == is_rejected.end() || !it->second)
                throw Error(ErrorCode::ValidationError, "rejected node under a non-rejected parent", r.line);
        }
    }
    if (rows.size() != tree.node_count() - 1)
        throw Error(ErrorCode::TreeMismatch, "report does not list every node of its tree");
    RejectionResult result = induce_coherent(tree, rejected);
    return {std::move(tree), std::move(result)};
}

void write_level_table(std::ostream& out, std::span<const LevelReport> reports) {
    out << "level\tfdp\tsfdp\tpower\n";
    const auto old = out.precision(6);
    for (const auto& r : reports) out << r.level << '\t' << r.fdp << '\t' << r.sfdp << '\t' << r.power << '\n';
    out.precision(old);
}

nlohmann::json level_reports_to_json(const HypothesisTree& tree, std::span<const LevelReport> reports) {
    auto levels = nlohmann::json::array();
    for (const auto& r : reports) {
        auto weights = nlohmann::json::array();
        for (const auto& w : r.weights)
            weights.push_back({{"family", w.parent == kRoot ? std::string("") : join_path(tree.path(w.parent))},
                               {"weight", w.weight}});
        levels.push_back({{"level", r.level},
                          {"fdp", r.fdp},
                          {"sfdp", r.sfdp},
                          {"power", r.power},
                          {"weights", weights}});
    }
    return {{"levels", levels}};
}

}  // namespace treefdr
