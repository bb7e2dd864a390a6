#include "treefdr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <mutex>
#include <thread>

#include "treefdr/error.hpp"
#include "treefdr/procedures.hpp"

namespace treefdr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kMetricsPerLevel = 3;  // fdp, sfdp, power

MetricSummary summarize(const std::vector<double>& xs) {
    MetricSummary s;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    // Population variance: keeps se <= 0.5 / sqrt(n) for [0,1] ratios.
    s.se = std::sqrt(ss / n) / std::sqrt(n);
    return s;
}

std::string fmt6(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::BhPooled: return "bh-pooled";
        case Method::BB: return "bb";
        case Method::TreeBH: return "treebh";
        case Method::TreeBHArbitrary: return "treebh-arb";
    }
    return "treebh";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "bh-pooled") return Method::BhPooled;
    if (name == "bb") return Method::BB;
    if (name == "treebh") return Method::TreeBH;
    if (name == "treebh-arb") return Method::TreeBHArbitrary;
    return std::nullopt;
}

std::size_t MatrixLayout::columns() const noexcept {
    std::size_t c = 0;
    for (auto g : group_sizes) c += g;
    return c;
}

const LevelSummary& SimulationReport::at(Method method, std::size_t level) const {
    for (const auto& m : methods) {
        if (m.method != method) continue;
        for (const auto& l : m.levels) {
            if (l.level == level) return l;
        }
    }
    throw Error(ErrorCode::ValidationError,
                "report has no " + std::string(to_string(method)) + " level " + std::to_string(level));
}

Rng replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

double normal_survival(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

HypothesisTree layout_tree(const MatrixLayout& layout) {
    if (layout.rows == 0 || layout.group_sizes.empty())
        throw Error(ErrorCode::SpecError, "layout needs at least one row and one column group");
    TreeBuilder builder;
    for (std::size_t i = 0; i < layout.rows; ++i) {
        const std::string row = "r" + std::to_string(i + 1);
        for (std::size_t j = 0; j < layout.group_sizes.size(); ++j) {
            if (layout.group_sizes[j] == 0) throw Error(ErrorCode::SpecError, "empty column group");
            const std::string group = "g" + std::to_string(j + 1);
            for (std::size_t t = 0; t < layout.group_sizes[j]; ++t)
                builder.add_leaf({row, group, "c" + std::to_string(t + 1)}, 1.0);
        }
    }
    return builder.build();
}

TruthAssignment layout_truth(const HypothesisTree& tree, const std::vector<std::vector<bool>>& truth) {
    std::vector<bool> flat;
    for (const auto& row : truth) flat.insert(flat.end(), row.begin(), row.end());
    if (flat.size() != tree.leaves().size())
        throw Error(ErrorCode::SpecError, "truth matrix has " + std::to_string(flat.size()) + " cells for " +
                                              std::to_string(tree.leaves().size()) + " leaves");
    return TruthAssignment::from_leaves(tree, flat);
}

std::vector<double> draw_noise(std::size_t count, const Dependence& dependence, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(count);
    if (dependence.kind == Dependence::Kind::Independent) {
        for (auto& v : z) v = normal(rng);
        return z;
    }
    // Shared factor per block: Z = sqrt(rho) W + sqrt(1 - rho) e.
    const double a = std::sqrt(dependence.rho);
    const double b = std::sqrt(1.0 - dependence.rho);
    const std::size_t block = std::max<std::size_t>(dependence.block_size, 1);
    double shared = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        if (k % block == 0) shared = normal(rng);
        z[k] = a * shared + b * normal(rng);
    }
    return z;
}

std::vector<double> generate_pvalues(const HypothesisTree& tree, const TruthAssignment& truth, double mu, Rng& rng) {
    return generate_pvalues(tree, truth, mu, Dependence{}, rng);
}

std::vector<double> generate_pvalues(const HypothesisTree& tree, const TruthAssignment& truth, double mu,
                                     const Dependence& dependence, Rng& rng) {
    const auto leaves = tree.leaves();
    auto z = draw_noise(leaves.size(), dependence, rng);
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const double x = truth.is_non_null(leaves[k]) ? z[k] + mu : z[k];
        z[k] = normal_survival(x);
    }
    return z;
}

void validate(const SimulationSpec& spec) {
    if (spec.reps < 1) throw Error(ErrorCode::SpecError, "reps must be >= 1");
    if (!(spec.mu >= 0.0) || !std::isfinite(spec.mu)) throw Error(ErrorCode::SpecError, "mu must be finite and >= 0");
    if (spec.methods.empty()) throw Error(ErrorCode::SpecError, "no methods selected");
    if (spec.layout.rows == 0 || spec.layout.group_sizes.empty())
        throw Error(ErrorCode::SpecError, "layout needs rows and column groups");
    for (auto g : spec.layout.group_sizes) {
        if (g == 0) throw Error(ErrorCode::SpecError, "empty column group");
    }
    if (spec.q_levels.size() != 3) throw Error(ErrorCode::SpecError, "matrix layouts have 3 levels; need 3 q values");
    for (double q : spec.q_levels) {
        if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::SpecError, "q values must be in (0,1]");
    }
    if (spec.truth.size() != spec.layout.rows) throw Error(ErrorCode::SpecError, "truth row count mismatch");
    for (const auto& row : spec.truth) {
        if (row.size() != spec.layout.columns()) throw Error(ErrorCode::SpecError, "truth column count mismatch");
    }
    if (spec.dependence.kind == Dependence::Kind::BlockEquicorrelated) {
        if (!(spec.dependence.rho >= 0.0 && spec.dependence.rho < 1.0))
            throw Error(ErrorCode::SpecError, "rho must be in [0,1)");
        if (spec.dependence.block_size < 1) throw Error(ErrorCode::SpecError, "block_size must be >= 1");
    }
}

SimulationSpec example_5_1_spec() {
    SimulationSpec spec;
    spec.name = "example5.1";
    spec.layout = {6, {2, 2, 2, 2, 2, 90}};
    const std::size_t cols = spec.layout.columns();
    spec.truth.assign(6, std::vector<bool>(cols, false));
    // Row 1: first leaf of groups 1-5, all of group 6.
    for (std::size_t j = 0; j < 5; ++j) spec.truth[0][2 * j] = true;
    for (std::size_t c = 10; c < cols; ++c) spec.truth[0][c] = true;
    // Row 2: first leaf of group 6 only.
    spec.truth[1][10] = true;
    // Rows 3-5: groups 1-5 entirely.
    for (std::size_t i = 2; i < 5; ++i) {
        for (std::size_t c = 0; c < 10; ++c) spec.truth[i][c] = true;
    }
    spec.mu = 3.0;
    spec.reps = 1000;
    spec.seed = 1;
    spec.methods = {Method::TreeBH, Method::TreeBHArbitrary, Method::BB, Method::BhPooled};
    spec.q_levels = {0.1, 0.1, 0.1};
    return spec;
}

SimulationSpec example_5_2_spec() {
    SimulationSpec spec;
    spec.name = "example5.2";
    // Ten column groups of ten; each 15x15 block spans two groups.
    spec.layout = {100, std::vector<std::size_t>(10, 10)};
    spec.truth.assign(100, std::vector<bool>(100, false));
    for (std::size_t i = 0; i < 15; ++i) {
        for (std::size_t c = 0; c < 15; ++c) {
            spec.truth[i][c] = true;
            spec.truth[15 + i][15 + c] = true;
        }
    }
    // 15 diagonal cells spread over rows/columns 31-100.
    for (std::size_t k = 0; k < 15; ++k) {
        const std::size_t d = 30 + (k * 70 + 7) / 15;
        spec.truth[d][d] = true;
    }
    spec.mu = 3.0;
    spec.reps = 100;
    spec.seed = 1;
    spec.methods = {Method::TreeBH, Method::TreeBHArbitrary, Method::BB, Method::BhPooled};
    spec.q_levels = {0.2, 0.2, 0.2};
    return spec;
}

std::optional<SimulationSpec> builtin_spec(std::string_view name) {
    if (name == "example5.1") return example_5_1_spec();
    if (name == "example5.2") return example_5_2_spec();
    return std::nullopt;
}

RejectionResult apply_method(Method method, const HypothesisTree& tree, const std::vector<double>& q_levels,
                             CombinerKind combiner) {
    TestConfig config{q_levels, combiner, Regime::PRDS};
    switch (method) {
        case Method::TreeBH: return tree_bh(tree, config);
        case Method::TreeBHArbitrary: return tree_bh_arbitrary(tree, config);
        case Method::BB: return project_to_tree(tree, bb_two_level(tree, q_levels.front(), q_levels.back(), combiner));
        case Method::BhPooled: return induce_coherent(tree, bh_pooled(tree, q_levels.back()));
    }
    throw Error(ErrorCode::ValidationError, "unknown method");
}

std::vector<std::vector<LevelReport>> run_replicate(const SimulationSpec& spec, const HypothesisTree& tree,
                                                    const TruthAssignment& truth, std::uint64_t replicate) {
    Rng rng = replicate_rng(spec.seed, replicate);
    const auto pvals = generate_pvalues(tree, truth, spec.mu, spec.dependence, rng);
    const HypothesisTree drawn = tree.with_leaf_pvalues(pvals);
    std::vector<std::vector<LevelReport>> out;
    out.reserve(spec.methods.size());
    for (Method m : spec.methods) {
        const auto result = apply_method(m, drawn, spec.q_levels, spec.combiner);
        out.push_back(level_reports(drawn, result, truth));
    }
    return out;
}

SimulationReport run_simulation(const SimulationSpec& spec) {
    validate(spec);
    const auto start = std::chrono::steady_clock::now();
    const HypothesisTree tree = layout_tree(spec.layout);
    const TruthAssignment truth = layout_truth(tree, spec.truth);
    const std::size_t levels = tree.levels();
    const std::size_t methods = spec.methods.size();
    const std::size_t stride = methods * levels * kMetricsPerLevel;

    // values[rep * stride + (m * levels + l) * 3 + metric]
    std::vector<double> values(spec.reps * stride, 0.0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::size_t error_rep = 0;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= spec.reps || failed.load()) return;
            try {
                const auto reports = run_replicate(spec, tree, truth, rep);
                double* row = values.data() + rep * stride;
                for (std::size_t m = 0; m < methods; ++m) {
                    for (std::size_t l = 0; l < levels; ++l) {
                        const auto& r = reports[m][l];
                        double* cell = row + (m * levels + l) * kMetricsPerLevel;
                        cell[0] = r.fdp;
                        cell[1] = r.sfdp;
                        cell[2] = r.power;
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error || rep < error_rep) {
                    error = std::current_exception();
                    error_rep = rep;
                }
                failed = true;
                return;
            }
        }
    };

    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, spec.reps);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ValidationError, "replicate " + std::to_string(error_rep) + " failed: " + e.what());
        }
    }

    SimulationReport report;
    report.name = spec.name;
    report.mu = spec.mu;
    report.reps = spec.reps;
    report.seed = spec.seed;
    std::vector<double> column(spec.reps);
    for (std::size_t m = 0; m < methods; ++m) {
        MethodSummary ms;
        ms.method = spec.methods[m];
        for (std::size_t l = 0; l < levels; ++l) {
            LevelSummary ls;
            ls.level = l + 1;
            MetricSummary* targets[kMetricsPerLevel] = {&ls.fdr, &ls.sfdr, &ls.power};
            for (std::size_t k = 0; k < kMetricsPerLevel; ++k) {
                for (std::size_t rep = 0; rep < spec.reps; ++rep)
                    column[rep] = values[rep * stride + (m * levels + l) * kMetricsPerLevel + k];
                *targets[k] = summarize(column);
            }
            ms.levels.push_back(ls);
        }
        report.methods.push_back(std::move(ms));
    }
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::json spec_to_json(const SimulationSpec& spec) {
    nlohmann::json doc;
    doc["name"] = spec.name;
    doc["layout"] = {{"rows", spec.layout.rows}, {"group_sizes", spec.layout.group_sizes}};
    auto truth = nlohmann::json::array();
    for (const auto& row : spec.truth) {
        std::string s;
        for (bool b : row) s += b ? '1' : '0';
        truth.push_back(s);
    }
    doc["truth"] = truth;
    doc["mu"] = spec.mu;
    doc["reps"] = spec.reps;
    doc["seed"] = spec.seed;
    auto methods = nlohmann::json::array();
    for (Method m : spec.methods) methods.push_back(std::string(to_string(m)));
    doc["methods"] = methods;
    doc["q_levels"] = spec.q_levels;
    doc["combiner"] = std::string(to_string(spec.combiner));
    if (spec.dependence.kind == Dependence::Kind::Independent) {
        doc["dependence"] = {{"kind", "independent"}};
    } else {
        doc["dependence"] = {
            {"kind", "block"}, {"rho", spec.dependence.rho}, {"block_size", spec.dependence.block_size}};
    }
    return doc;
}

SimulationSpec spec_from_json(const nlohmann::json& doc) {
    SimulationSpec spec;
    try {
        if (!doc.is_object()) throw Error(ErrorCode::SpecError, "spec must be a JSON object");
        spec.name = doc.value("name", std::string("custom"));
        const auto& layout = doc.at("layout");
        spec.layout.rows = layout.at("rows").get<std::size_t>();
        spec.layout.group_sizes = layout.at("group_sizes").get<std::vector<std::size_t>>();
        for (const auto& row : doc.at("truth")) {
            std::vector<bool> r;
            for (char ch : row.get<std::string>()) {
                if (ch != '0' && ch != '1') throw Error(ErrorCode::SpecError, "truth rows use only '0' and '1'");
                r.push_back(ch == '1');
            }
            spec.truth.push_back(std::move(r));
        }
        spec.mu = doc.at("mu").get<double>();
        const auto reps = doc.at("reps").get<long long>();
        if (reps < 1) throw Error(ErrorCode::SpecError, "reps must be >= 1");
        spec.reps = static_cast<std::size_t>(reps);
        spec.seed = doc.value("seed", std::uint64_t{1});
        for (const auto& m : doc.at("methods")) {
            auto method = parse_method(m.get<std::string>());
            if (!method) throw Error(ErrorCode::SpecError, "unknown method " + m.get<std::string>());
            spec.methods.push_back(*method);
        }
        spec.q_levels = doc.at("q_levels").get<std::vector<double>>();
        if (doc.contains("combiner")) {
            auto c = parse_combiner(doc.at("combiner").get<std::string>());
            if (!c) throw Error(ErrorCode::SpecError, "unknown combiner");
            spec.combiner = *c;
        }
        if (doc.contains("dependence")) {
            const auto& dep = doc.at("dependence");
            const auto kind = dep.at("kind").get<std::string>();
            if (kind == "block") {
                spec.dependence.kind = Dependence::Kind::BlockEquicorrelated;
                spec.dependence.rho = dep.at("rho").get<double>();
                spec.dependence.block_size = dep.at("block_size").get<std::size_t>();
            } else if (kind != "independent") {
                throw Error(ErrorCode::SpecError, "unknown dependence kind " + kind);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SpecError, e.what());
    }
    validate(spec);
    return spec;
}

nlohmann::json report_to_json(const SimulationReport& report) {
    nlohmann::json doc;
    doc["name"] = report.name;
    doc["mu"] = report.mu;
    doc["reps"] = report.reps;
    doc["seed"] = report.seed;
    auto rows = nlohmann::json::array();
    for (const auto& m : report.methods) {
        for (const auto& l : m.levels) {
            rows.push_back({{"method", std::string(to_string(m.method))},
                            {"level", l.level},
                            {"fdr", {{"mean", l.fdr.mean}, {"se", l.fdr.se}}},
                            {"sfdr", {{"mean", l.sfdr.mean}, {"se", l.sfdr.se}}},
                            {"power", {{"mean", l.power.mean}, {"se", l.power.se}}}});
        }
    }
    doc["results"] = rows;
    return doc;
}

std::string report_to_table(const SimulationReport& report) {
    std::ostringstream os;
    os << "method\tlevel\tmetric\tmean\tse\n";
    for (const auto& m : report.methods) {
        for (const auto& l : m.levels) {
            const std::pair<const char*, const MetricSummary*> metrics[] = {
                {"fdr", &l.fdr}, {"sfdr", &l.sfdr}, {"power", &l.power}};
            for (const auto& [name, s] : metrics)
                os << to_string(m.method) << '\t' << l.level << '\t' << name << '\t' << fmt6(s->mean) << '\t'
                   << fmt6(s->se) << '\n';
        }
    }
    return os.str();
}

}  // namespace treefdr
