// treefdr: hierarchical FDR testing on trees of hypotheses.
//
//   treefdr test TREE [--internal FILE] --q 0.1,0.1,0.1 [--combiner simes] [--regime prds]
//   treefdr simulate example5.1|example5.2|SPEC.json [--mu 3] [--reps 1000] [--seed 7] [--out PREFIX]
//   treefdr metrics REPORT TRUTH [--level 3] [--out FILE] [--json FILE]

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "treefdr/cli.hpp"

namespace {

const std::map<std::string, treefdr::CombinerKind> kCombiners{
    {"simes", treefdr::CombinerKind::Simes},
    {"fisher", treefdr::CombinerKind::Fisher},
    {"bonferroni", treefdr::CombinerKind::Bonferroni},
    {"simes-adjusted", treefdr::CombinerKind::SimesAdjusted}};

const std::map<std::string, treefdr::Regime> kRegimes{{"prds", treefdr::Regime::PRDS},
                                                       {"arbitrary", treefdr::Regime::ArbitraryDependence}};

const std::map<std::string, treefdr::Method> kMethods{{"treebh", treefdr::Method::TreeBH},
                                                       {"treebh-arb", treefdr::Method::TreeBHArbitrary},
                                                       {"bb", treefdr::Method::BB},
                                                       {"bh-pooled", treefdr::Method::BhPooled}};

}  // namespace

int main(int argc, char** argv) {
    using namespace treefdr;

    CLI::App app{"Hierarchical false discovery rate control on trees of hypotheses"};
    app.require_subcommand(1);

    cli::TestOptions test;
    std::optional<CombinerKind> test_combiner;
    std::optional<Regime> test_regime;
    auto* test_cmd = app.add_subcommand("test", "Run TreeBH (or a comparator) on a p-value tree");
    test_cmd->add_option("tree", test.tree_path, "Leaf file: labels... <TAB> pvalue")->required();
    test_cmd->add_option("--internal", test.internal_path, "Internal p-value file: path <TAB> pvalue");
    test_cmd->add_option("--q", test.q, "Per-level bounds, comma separated")->delimiter(',')->required();
    test_cmd->add_option("--combiner", test_combiner, "simes|fisher|bonferroni|simes-adjusted")
        ->transform(CLI::CheckedTransformer(kCombiners, CLI::ignore_case));
    test_cmd->add_option("--regime", test_regime, "prds|arbitrary")
        ->transform(CLI::CheckedTransformer(kRegimes, CLI::ignore_case));
    test_cmd->add_option("--method", test.methods, "treebh|treebh-arb|bb|bh-pooled")
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    test_cmd->add_option("--out", test.out, "Write the report here instead of stdout");

    cli::SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo comparison of the procedures");
    sim_cmd->add_option("spec", sim.spec, "example5.1, example5.2, or a JSON spec file")->required();
    sim_cmd->add_option("--mu", sim.mu, "Signal strength")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--reps", sim.reps, "Replicates")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (default: all cores)");
    sim_cmd->add_option("--method", sim.methods, "treebh|treebh-arb|bb|bh-pooled (repeatable)")
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    sim_cmd->add_option("--q", sim.q, "Per-level bounds, comma separated")->delimiter(',');
    sim_cmd->add_option("--combiner", sim.combiner, "simes|fisher|bonferroni|simes-adjusted")
        ->transform(CLI::CheckedTransformer(kCombiners, CLI::ignore_case));
    sim_cmd->add_option("--out", sim.out, "Write PREFIX.tsv and PREFIX.json");
    sim_cmd->add_option("--emit-spec", sim.emit_spec, "Write the resolved spec as JSON and exit");

    cli::MetricsOptions met;
    auto* met_cmd = app.add_subcommand("metrics", "Per-level FDP, sFDP and power of a rejection report");
    met_cmd->add_option("report", met.report_path, "Report written by `treefdr test`")->required();
    met_cmd->add_option("truth", met.truth_path, "Leaf truth file: labels... <TAB> 0|1")->required();
    met_cmd->add_option("--level", met.levels, "Levels to report (repeatable; default all)")
        ->check(CLI::PositiveNumber);
    met_cmd->add_option("--out", met.out, "Also write the table here");
    met_cmd->add_option("--json", met.json_out, "Write per-level metrics and family weights as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitInput;
    }
    if (test_combiner) test.combiner = *test_combiner;
    if (test_regime) test.regime = *test_regime;

    return cli::guarded(
        [&] {
            if (*test_cmd) return cli::cmd_test(test, std::cout, std::cerr);
            if (*sim_cmd) return cli::cmd_simulate(sim, std::cout, std::cerr);
            return cli::cmd_metrics(met, std::cout, std::cerr);
        },
        std::cerr);
}
