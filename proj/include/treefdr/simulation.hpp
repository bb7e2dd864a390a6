#pragma once

// Monte-Carlo harness: draws leaf p-values under a mean-shift normal model on
// a three-level matrix layout, runs the procedures, and aggregates
// per-level error rates and power.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "treefdr/combiners.hpp"
#include "treefdr/hypothesis_tree.hpp"
#include "treefdr/metrics.hpp"

namespace treefdr {

enum class Method { BhPooled, BB, TreeBH, TreeBHArbitrary };

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct Dependence {
    enum class Kind { Independent, BlockEquicorrelated };
    Kind kind = Kind::Independent;
    double rho = 0.0;
    // Consecutive leaves (in leaf order) sharing one latent factor.
    std::size_t block_size = 1;
};

// Rows are level-1 hypotheses; each row holds one level-2 hypothesis per
// column group, and each group holds group_sizes[j] leaves. Leaves are laid
// out row-major, matching the column order of the truth matrix.
struct MatrixLayout {
    std::size_t rows = 0;
    std::vector<std::size_t> group_sizes;

    std::size_t columns() const noexcept;
};

struct SimulationSpec {
    std::string name;
    MatrixLayout layout;
    std::vector<std::vector<bool>> truth;  // rows x columns, true = non-null
    double mu = 0.0;
    std::size_t reps = 1;
    std::uint64_t seed = 1;
    std::vector<Method> methods;
    std::vector<double> q_levels;
    CombinerKind combiner = CombinerKind::Simes;
    Dependence dependence;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct MetricSummary {
    double mean = 0.0;
    double se = 0.0;
};

struct LevelSummary {
    std::size_t level = 0;
    MetricSummary fdr;
    MetricSummary sfdr;
    MetricSummary power;
};

struct MethodSummary {
    Method method = Method::TreeBH;
    std::vector<LevelSummary> levels;
};

struct SimulationReport {
    std::string name;
    double mu = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;
    double runtime_seconds = 0.0;

    const LevelSummary& at(Method method, std::size_t level) const;
};

using Rng = std::mt19937_64;

/// Stream for one replicate, keyed by (seed, replicate index) only.
Rng replicate_rng(std::uint64_t seed, std::uint64_t replicate);

/// 1 - Phi(x).
double normal_survival(double x);

HypothesisTree layout_tree(const MatrixLayout& layout);
TruthAssignment layout_truth(const HypothesisTree& tree, const std::vector<std::vector<bool>>& truth);

/// Leaf p-values in tree.leaves() order: X ~ N(0,1) for null leaves,
/// N(mu,1) for non-null ones, p = 1 - Phi(X).
std::vector<double> generate_pvalues(const HypothesisTree& tree, const TruthAssignment& truth, double mu, Rng& rng);
std::vector<double> generate_pvalues(const HypothesisTree& tree, const TruthAssignment& truth, double mu,
                                     const Dependence& dependence, Rng& rng);

/// Z-scores before the mean shift; exposed for checking the dependence model.
std::vector<double> draw_noise(std::size_t count, const Dependence& dependence, Rng& rng);

void validate(const SimulationSpec& spec);

SimulationSpec example_5_1_spec();
SimulationSpec example_5_2_spec();
std::optional<SimulationSpec> builtin_spec(std::string_view name);

/// Rejections of one method on a tree that carries leaf p-values, expressed
/// on that tree.
RejectionResult apply_method(Method method, const HypothesisTree& tree, const std::vector<double>& q_levels,
                             CombinerKind combiner);

/// Per-method level reports for one replicate, in spec.methods order.
std::vector<std::vector<LevelReport>> run_replicate(const SimulationSpec& spec, const HypothesisTree& tree,
                                                    const TruthAssignment& truth, std::uint64_t replicate);

SimulationReport run_simulation(const SimulationSpec& spec);

nlohmann::json spec_to_json(const SimulationSpec& spec);
SimulationSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json report_to_json(const SimulationReport& report);
/// method, level, metric, mean, se; six significant digits.
std::string report_to_table(const SimulationReport& report);

}  // namespace treefdr
