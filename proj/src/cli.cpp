#include "treefdr/cli.hpp"

#include <fstream>
#include <sstream>

#include "treefdr/error.hpp"
#include "treefdr/metrics.hpp"
#include "treefdr/tree_io.hpp"

namespace treefdr::cli {

namespace {

std::vector<double> expand_q(const std::vector<double>& q, std::size_t levels) {
    if (q.empty()) throw Error(ErrorCode::InvalidBound, "--q is required");
    for (double v : q) {
        if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidBound, "q value " + format_shortest(v) + " not in (0,1]");
    }
    if (q.size() == 1) return std::vector<double>(levels, q.front());
    return q;
}

std::ofstream create(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    return f;
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.methods.size() > 1) throw Error(ErrorCode::ValidationError, "test takes at most one --method");
    const HypothesisTree tree =
        opts.internal_path ? read_tree_file(opts.tree_path, *opts.internal_path) : read_tree_file(opts.tree_path);
    TestConfig config{expand_q(opts.q, tree.levels()), opts.combiner, opts.regime};
    if (config.q_levels.size() != tree.levels())
        throw Error(ErrorCode::ConfigLengthMismatch, std::to_string(config.q_levels.size()) + " q values for " +
                                                         std::to_string(tree.levels()) + " levels");

    HypothesisTree tested = tree;
    RejectionResult result;
    const Method method = opts.methods.empty()
                              ? (opts.regime == Regime::PRDS ? Method::TreeBH : Method::TreeBHArbitrary)
                              : opts.methods.front();
    switch (method) {
        case Method::TreeBH:
            tested = populate_internal_pvalues(tree, opts.combiner);
            result = tree_bh(tested, config);
            break;
        case Method::TreeBHArbitrary:
            tested = populate_internal_pvalues(tree, opts.combiner);
            result = tree_bh_arbitrary(tested, config);
            break;
        case Method::BB:
        case Method::BhPooled:
            result = apply_method(method, tree, config.q_levels, opts.combiner);
            break;
    }
    for (const auto& w : tested.warnings()) err << "warning: " << w << '\n';
    for (NodeId id : result.ragged_stops) err << "note: branch ends at leaf " << join_path(tree.path(id)) << '\n';

    if (opts.out) {
        auto f = create(*opts.out);
        write_rejection_report(f, tested, result);
    } else {
        write_rejection_report(out, tested, result);
    }
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    SimulationSpec spec;
    if (auto builtin = builtin_spec(opts.spec)) {
        spec = *builtin;
    } else {
        std::ifstream in(opts.spec);
        if (!in) throw Error(ErrorCode::SpecError, "'" + opts.spec + "' is neither a builtin spec nor a readable file");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::SpecError, e.what());
        }
        spec = spec_from_json(doc);
    }
    if (opts.mu) spec.mu = *opts.mu;
    if (opts.reps) {
        if (*opts.reps < 1) throw Error(ErrorCode::SpecError, "--reps must be >= 1");
        spec.reps = static_cast<std::size_t>(*opts.reps);
    }
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.threads) spec.threads = *opts.threads;
    if (!opts.methods.empty()) spec.methods = opts.methods;
    if (!opts.q.empty()) spec.q_levels = expand_q(opts.q, 3);
    if (opts.combiner) spec.combiner = *opts.combiner;
    validate(spec);

    if (opts.emit_spec) {
        auto f = create(*opts.emit_spec);
        f << spec_to_json(spec).dump(2) << '\n';
        return kExitOk;
    }

    const SimulationReport report = run_simulation(spec);
    const std::string table = report_to_table(report);
    out << table;
    err << spec.name << ": " << report.reps << " replicates, mu=" << format_shortest(report.mu) << ", seed "
        << report.seed << ", " << report.runtime_seconds << " s\n";
    if (opts.out) {
        auto tsv = create(*opts.out + ".tsv");
        tsv << table;
        auto json = create(*opts.out + ".json");
        json << report_to_json(report).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream&) {
    std::ifstream report_in(opts.report_path);
    if (!report_in) throw Error(ErrorCode::IoError, "cannot open " + opts.report_path);
    const ParsedReport parsed = read_rejection_report(report_in);
    std::ifstream truth_in(opts.truth_path);
    if (!truth_in) throw Error(ErrorCode::IoError, "cannot open " + opts.truth_path);
    const TruthAssignment truth = read_truth(truth_in, parsed.tree);

    std::vector<std::size_t> levels = opts.levels;
    if (levels.empty()) {
        for (std::size_t l = 1; l <= parsed.tree.levels(); ++l) levels.push_back(l);
    }
    std::vector<LevelReport> reports;
    for (std::size_t l : levels) reports.push_back(level_report(parsed.tree, parsed.result, truth, l));

    std::ostringstream table;
    write_level_table(table, reports);
    out << table.str();
    if (opts.out) create(*opts.out) << table.str();
    if (opts.json_out) create(*opts.json_out) << level_reports_to_json(parsed.tree, reports).dump(2) << '\n';
    return kExitOk;
}

}  // namespace treefdr::cli
