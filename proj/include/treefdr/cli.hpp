#pragma once

// Subcommand bodies for the treefdr tool. Each returns the process exit
// code: 0 success, 2 input or validation error, 1 internal error.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "treefdr/combiners.hpp"
#include "treefdr/procedures.hpp"
#include "treefdr/simulation.hpp"

namespace treefdr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

struct TestOptions {
    std::string tree_path;
    std::optional<std::string> internal_path;
    std::vector<double> q;  // one value is repeated for every level
    CombinerKind combiner = CombinerKind::Simes;
    Regime regime = Regime::PRDS;
    std::vector<Method> methods;  // at most one; empty means TreeBH in `regime`
    std::optional<std::string> out;
};

struct SimulateOptions {
    std::string spec;  // builtin name or JSON spec path
    std::optional<double> mu;
    std::optional<long long> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::vector<Method> methods;
    std::vector<double> q;
    std::optional<CombinerKind> combiner;
    std::optional<std::string> out;  // writes <out>.tsv and <out>.json
    std::optional<std::string> emit_spec;
};

struct MetricsOptions {
    std::string report_path;
    std::string truth_path;
    std::vector<std::size_t> levels;  // empty: all
    std::optional<std::string> out;
    std::optional<std::string> json_out;
};

int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err);

// Runs `body`, mapping library errors to exit code 2 and anything else to 1.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace treefdr::cli
