// One line per acceptance criterion: PASS/FAIL, a short detail, runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "treefdr/combiners.hpp"
#include "treefdr/metrics.hpp"
#include "treefdr/procedures.hpp"
#include "treefdr/simulation.hpp"

using namespace treefdr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

std::string frac(const Fraction& f) {
    std::ostringstream os;
    os << f;
    return os.str();
}

// Criterion 1
Outcome selective_fdp_example() {
    const auto tree = fixtures::example_tree();
    const auto truth = fixtures::example_truth(tree);
    const auto result = tree_bh(tree, TestConfig{{0.1, 0.1, 0.1}});
    const auto t0 = Clock::now();
    const Fraction w = sfdp_weighted_exact(tree, result, truth, 3);
    const Fraction r = sfdp_recursive_exact(tree, result, truth, 3);
    const auto values = sfdp_recursive_values(tree, result, truth, 3);
    const double elapsed = ms_since(t0);
    const Fraction h4 = values[fixtures::by_label(tree, "H4").index()];
    const Fraction h1 = values[fixtures::by_label(tree, "H1").index()];
    const bool ok = w == Fraction(1, 12) && r == Fraction(1, 12) && h4 == Fraction(1, 3) && h1 == Fraction(1, 6) &&
                    elapsed < 1.0;
    return {ok, "weighted=" + frac(w) + " recursive=" + frac(r) + " H4=" + frac(h4) + " H1=" + frac(h1) +
                    " metric time " + fmt(elapsed, 3) + " ms"};
}

// Criterion 2
Outcome threshold_chain() {
    const auto tree = fixtures::example_tree();
    const TestConfig config{{0.1, 0.1, 0.1}};
    const auto result = tree_bh(tree, config);
    const NodeId h3 = fixtures::by_label(tree, "H3");
    const NodeId h8 = fixtures::by_label(tree, "H8");
    if (!result.family_tested(h3) || !result.family_tested(h8)) return {false, "chain not tested"};
    const Fraction f3 = *result.bound_factor[h3.index()];
    const Fraction f8 = *result.bound_factor[h8.index()];
    const bool bounds = std::abs(*result.family_bound[h3.index()] - to_double(f3) * config.q_levels[1]) < 1e-15 &&
                        std::abs(*result.family_bound[h8.index()] - to_double(f8) * config.q_levels[2]) < 1e-15;
    const bool ok = f3 == Fraction(2, 3) && f8 == Fraction(2, 3) && result.selection[0].size() == 2 &&
                    result.selection[h3.index()].size() == 2 && bounds;
    return {ok, "q_3/q2=" + frac(f3) + " q_8/q3=" + frac(f8)};
}

// Criterion 3
Outcome definition_equivalence() {
    std::mt19937_64 rng(20240501);
    std::size_t mismatches = 0, compared = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto tree = fixtures::random_tree(rng);
        const auto truth = fixtures::random_truth(rng, tree, 0.4);
        const auto result = t % 2 == 0 ? fixtures::random_rejections(rng, tree, 0.6)
                                       : tree_bh(tree, TestConfig{std::vector<double>(tree.levels(), 0.2)});
        for (std::size_t l = 1; l <= tree.levels(); ++l) {
            ++compared;
            if (sfdp_weighted_exact(tree, result, truth, l) != sfdp_recursive_exact(tree, result, truth, l))
                ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(compared) + " comparisons, " + std::to_string(mismatches) + " mismatches"};
}

// Criterion 4
Outcome single_level_reductions() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> uq(0.01, 0.3);
    std::size_t bh_bad = 0, by_bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t m = 1 + rng() % 50;
        const double signal = u(rng);
        std::vector<LeafSpec> leaves;
        std::vector<double> p;
        for (std::size_t i = 0; i < m; ++i) {
            const double x = u(rng) < signal ? u(rng) * 0.02 : u(rng);
            p.push_back(x);
            leaves.push_back({{"h" + std::to_string(i)}, x});
        }
        const auto tree = build_tree(leaves);
        const double q = uq(rng);
        TestConfig config{{q}};
        auto indices = [&](const RejectionResult& r) {
            std::vector<std::size_t> out;
            for (NodeId n : r.rejected_nodes()) out.push_back(tree.leaf_index(n));
            std::sort(out.begin(), out.end());
            return out;
        };
        bh_bad += indices(tree_bh(tree, config)) != oracle::bh(p, q);
        by_bad += indices(tree_bh_arbitrary(tree, config)) != oracle::by(p, q);
    }
    return {bh_bad == 0 && by_bad == 0,
            "BH mismatches " + std::to_string(bh_bad) + ", BY mismatches " + std::to_string(by_bad)};
}

// Criterion 5
Outcome consonance() {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> uq(0.02, 0.3);
    std::size_t violations = 0, families = 0;
    for (int t = 0; t < 5000; ++t) {
        const auto tree = fixtures::random_tree(rng);
        const auto result = tree_bh(tree, TestConfig{std::vector<double>(tree.levels(), uq(rng))});
        for (std::uint32_t i = 1; i < tree.node_count(); ++i) {
            if (!result.tested[i]) continue;
            ++families;
            violations += result.selection[i].empty();
        }
    }
    return {violations == 0, std::to_string(families) + " tested families below level 1, " +
                                 std::to_string(violations) + " without a rejection"};
}

bool within(const MetricSummary& m, double q) { return m.mean <= q + 3.0 * m.se; }
bool exceeds(const MetricSummary& m, double q) { return m.mean > q + 3.0 * m.se; }
std::string show(const char* name, const MetricSummary& m) {
    return std::string(name) + "=" + fmt(m.mean) + "±" + fmt(m.se, 2);
}

// Criterion 6
Outcome example_51_control(double& seconds) {
    const auto t0 = Clock::now();
    bool treebh_ok = true, bh_violates = false;
    std::string detail;
    for (double mu : {2.0, 3.0, 4.0}) {
        auto spec = example_5_1_spec();
        spec.mu = mu;
        spec.reps = 1000;
        spec.seed = 51;
        spec.methods = {Method::TreeBH, Method::BhPooled};
        const auto rep = run_simulation(spec);
        const auto& f1 = rep.at(Method::TreeBH, 1).fdr;
        const auto& s2 = rep.at(Method::TreeBH, 2).sfdr;
        const auto& s3 = rep.at(Method::TreeBH, 3).sfdr;
        const auto& bh1 = rep.at(Method::BhPooled, 1).fdr;
        treebh_ok = treebh_ok && within(f1, 0.1) && within(s2, 0.1) && within(s3, 0.1);
        bh_violates = bh_violates || exceeds(bh1, 0.1);
        detail += " mu=" + fmt(mu, 2) + "[" + show("FDR1", f1) + " " + show("sFDR2", s2) + " " + show("sFDR3", s3) +
                  " " + show("BH-FDR1", bh1) + "]";
    }
    seconds = ms_since(t0) / 1000.0;
    return {treebh_ok && bh_violates && seconds < 120.0, "TreeBH controls: " + std::string(treebh_ok ? "yes" : "no") +
                                                             ", pooled BH violates: " + (bh_violates ? "yes" : "no") +
                                                             ";" + detail};
}

// Criterion 7
Outcome example_52_control(double& seconds) {
    const auto t0 = Clock::now();
    auto spec = example_5_2_spec();
    spec.mu = 3.0;
    spec.reps = 100;
    spec.seed = 52;
    spec.methods = {Method::TreeBH, Method::BhPooled, Method::BB};
    const auto rep = run_simulation(spec);
    const double q = 0.2;
    const auto& t1 = rep.at(Method::TreeBH, 1).fdr;
    const auto& t2 = rep.at(Method::TreeBH, 2).fdr;
    const auto& ts2 = rep.at(Method::TreeBH, 2).sfdr;
    const auto& ts3 = rep.at(Method::TreeBH, 3).sfdr;
    const auto& bh1 = rep.at(Method::BhPooled, 1).fdr;
    const auto& bb2 = rep.at(Method::BB, 2).sfdr;
    const auto& bb3 = rep.at(Method::BB, 3).sfdr;
    const bool treebh_ok = within(t1, q) && within(t2, q) && within(ts2, q) && within(ts3, q);
    const bool bh_bad = exceeds(bh1, q);
    const bool bb_bad = exceeds(bb2, q) || exceeds(bb3, q);
    seconds = ms_since(t0) / 1000.0;
    return {treebh_ok && bh_bad && bb_bad && seconds < 600.0,
            "TreeBH[" + show("FDR1", t1) + " " + show("FDR2", t2) + " " + show("sFDR2", ts2) + " " +
                show("sFDR3", ts3) + "] " + show("BH-FDR1", bh1) + " BB[" + show("sFDR2", bb2) + " " +
                show("sFDR3", bb3) + "]"};
}

// Criterion 8
Outcome null_calibration() {
    auto spec = example_5_1_spec();
    for (auto& row : spec.truth) row.assign(row.size(), false);
    spec.mu = 0.0;
    spec.reps = 2000;
    spec.seed = 8;
    spec.methods = {Method::BhPooled, Method::BB, Method::TreeBH, Method::TreeBHArbitrary};
    const auto rep = run_simulation(spec);
    bool ok = true;
    std::string detail;
    for (const auto& m : rep.methods) {
        const auto& f = m.levels.at(0).fdr;
        ok = ok && within(f, spec.q_levels.front());
        detail += " " + std::string(to_string(m.method)) + "=" + fmt(f.mean) + "±" + fmt(f.se, 2);
    }
    return {ok, "FDR1 at q=0.1:" + detail};
}

// Criterion 9
Outcome conservativeness() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> uq(0.02, 0.4);
    std::size_t violations = 0, strict = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto tree = fixtures::random_tree(rng);
        TestConfig config;
        for (std::size_t l = 0; l < tree.levels(); ++l) config.q_levels.push_back(uq(rng));
        const auto prds = tree_bh(tree, config);
        const auto arb = tree_bh_arbitrary(tree, config);
        bool subset = true;
        for (std::size_t i = 0; i < prds.rejected.size(); ++i) subset = subset && (!arb.rejected[i] || prds.rejected[i]);
        violations += !subset;
        strict += arb.rejected_nodes().size() < prds.rejected_nodes().size();
    }
    return {violations == 0, std::to_string(violations) + " violations; arbitrary strictly smaller in " +
                                 std::to_string(strict) + " of 1000"};
}

// Criterion 10
Outcome combiner_validity() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 100000;
    const double crit = oracle::ks_critical(n, 0.001);
    bool ks_ok = true;
    std::string detail;
    for (std::size_t k : {2, 5, 20}) {
        std::vector<double> out(n), p(k);
        for (auto& o : out) {
            for (auto& x : p) x = u(rng);
            o = simes(p);
        }
        const double d = oracle::ks_uniform_statistic(out);
        ks_ok = ks_ok && d < crit;
        detail += "KS(k=" + std::to_string(k) + ")=" + fmt(d, 3) + " ";
    }
    bool identity = true;
    for (int t = 0; t < 10000; ++t) {
        const double x = u(rng);
        identity = identity && fisher(std::vector<double>{x}) == x;
    }
    identity = identity && fisher(std::vector<double>{1.0}) == 1.0;
    const double got = fisher(std::vector<double>{0.1, 0.1});
    const double want = boost::math::gamma_q(2.0, -std::log(0.1) - std::log(0.1));
    const bool fisher_ok = std::abs(got - want) <= 1e-10;
    detail += "(crit " + fmt(crit, 3) + "); Fisher k=1 identity " + (identity ? "exact" : "broken") +
              "; Fisher[0.1,0.1]=" + fmt(got, 12) + " oracle " + fmt(want, 12);
    return {ks_ok && identity && fisher_ok, detail};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int number, const char* name, const std::function<Outcome()>& fn,
                      double limit_ms = std::numeric_limits<double>::infinity()) {
        const auto t0 = Clock::now();
        Outcome o = fn();
        const double elapsed = ms_since(t0);
        if (elapsed >= limit_ms) {
            o.pass = false;
            o.detail += "; over the " + fmt(limit_ms / 1000.0, 3) + " s budget";
        }
        failures += !o.pass;
        std::printf("%s  %2d  %-36s %s  [%.1f ms]\n", o.pass ? "PASS" : "FAIL", number, name, o.detail.c_str(),
                    elapsed);
        std::fflush(stdout);
    };
    double s6 = 0, s7 = 0;
    report(1, "selective FDP on the example tree", selective_fdp_example);
    report(2, "bound chain on the example tree", threshold_chain);
    report(3, "weighted and recursive sFDP agree", definition_equivalence, 30000.0);
    report(4, "single-level reductions to BH/BY", single_level_reductions, 10000.0);
    report(5, "consonance with Simes", consonance);
    report(6, "example5.1 control and BH violation", [&] { return example_51_control(s6); });
    report(7, "example5.2 control and violations", [&] { return example_52_control(s7); });
    report(8, "null calibration", null_calibration);
    report(9, "arbitrary-dependence nesting", conservativeness);
    report(10, "combiner validity", combiner_validity);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
