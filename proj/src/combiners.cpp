#include "treefdr/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "treefdr/error.hpp"

namespace treefdr {

namespace {

void check_inputs(std::span<const double> pvals) {
    if (pvals.empty()) throw Error(ErrorCode::EmptyFamily, "combiner needs at least one p-value");
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::PvalueOutOfRange, std::to_string(p));
    }
}

std::vector<double> sorted(std::span<const double> pvals) {
    std::vector<double> v(pvals.begin(), pvals.end());
    std::stable_sort(v.begin(), v.end());
    return v;
}

double simes_unchecked(std::span<const double> pvals) {
    const auto v = sorted(pvals);
    const double k = static_cast<double>(v.size());
    double best = 1.0;
    for (std::size_t j = 0; j < v.size(); ++j) best = std::min(best, v[j] * k / static_cast<double>(j + 1));
    return best;
}

constexpr std::uint64_t kHarmonicDirectLimit = 1u << 20;

}  // namespace

std::string_view to_string(CombinerKind kind) noexcept {
    switch (kind) {
        case CombinerKind::Simes: return "simes";
        case CombinerKind::Fisher: return "fisher";
        case CombinerKind::Bonferroni: return "bonferroni";
        case CombinerKind::SimesAdjusted: return "simes-adjusted";
    }
    return "simes";
}

std::optional<CombinerKind> parse_combiner(std::string_view name) noexcept {
    if (name == "simes") return CombinerKind::Simes;
    if (name == "fisher") return CombinerKind::Fisher;
    if (name == "bonferroni") return CombinerKind::Bonferroni;
    if (name == "simes-adjusted") return CombinerKind::SimesAdjusted;
    return std::nullopt;
}

double simes(std::span<const double> pvals) {
    check_inputs(pvals);
    return simes_unchecked(pvals);
}

double bonferroni(std::span<const double> pvals) {
    check_inputs(pvals);
    const double lo = *std::min_element(pvals.begin(), pvals.end());
    return std::min(1.0, lo * static_cast<double>(pvals.size()));
}

double harmonic_g(std::uint64_t m) {
    if (m == 0) throw Error(ErrorCode::NonPositiveM, "g(m) needs m >= 1");
    if (m <= kHarmonicDirectLimit) {
        // Smallest terms first.
        double s = 0.0;
        for (std::uint64_t i = m; i >= 1; --i) s += 1.0 / static_cast<double>(i);
        return s;
    }
    const double x = static_cast<double>(m);
    const double inv2 = 1.0 / (x * x);
    return std::log(x) + std::numbers::egamma + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

double simes_adjusted(std::span<const double> pvals) {
    check_inputs(pvals);
    return std::min(1.0, simes_unchecked(pvals) * harmonic_g(pvals.size()));
}

double gamma_q_integer(std::uint64_t n, double x) {
    if (n == 0) throw Error(ErrorCode::NonPositiveM, "shape must be >= 1");
    if (!(x > 0.0)) return 1.0;
    // Q(n, x) = e^{-x} sum_{i<n} x^i / i!, summed in log space.
    const double log_x = std::log(x);
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> log_terms(n);
    double log_fact = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0) log_fact += std::log(static_cast<double>(i));
        log_terms[i] = static_cast<double>(i) * log_x - log_fact;
        max_term = std::max(max_term, log_terms[i]);
    }
    double s = 0.0;
    for (double t : log_terms) s += std::exp(t - max_term);
    return std::min(1.0, std::exp(max_term - x + std::log(s)));
}

double fisher(std::span<const double> pvals) {
    check_inputs(pvals);
    if (pvals.size() == 1) return pvals[0];
    std::vector<double> sorted(pvals.begin(), pvals.end());
    std::sort(sorted.begin(), sorted.end());
    double sum_log = 0.0;
    for (double p : sorted) sum_log += std::log(std::max(p, std::numeric_limits<double>::denorm_min()));
    // chi-square(2k) survival at -2 sum(log p) is Q(k, -sum(log p)).
    return gamma_q_integer(pvals.size(), -sum_log);
}

double combine(CombinerKind kind, std::span<const double> pvals) {
    switch (kind) {
        case CombinerKind::Simes: return simes(pvals);
        case CombinerKind::Fisher: return fisher(pvals);
        case CombinerKind::Bonferroni: return bonferroni(pvals);
        case CombinerKind::SimesAdjusted: return simes_adjusted(pvals);
    }
    return simes(pvals);
}

HypothesisTree populate_internal_pvalues(const HypothesisTree& tree, CombinerKind kind) {
    const std::size_t n = tree.node_count();
    std::vector<std::optional<double>> value(n);
    std::vector<std::optional<double>> derived(n);
    std::vector<std::string> warnings;

    for (NodeId leaf : tree.leaves()) {
        auto p = tree.pvalue(leaf);
        if (!p) throw Error(ErrorCode::MissingLeafPvalue, "leaf " + std::to_string(leaf.value));
        value[leaf.index()] = p;
    }
    std::vector<double> buf;
    for (std::size_t level = tree.levels(); level-- > 1;) {
        for (NodeId id : tree.nodes_at_level(level)) {
            if (tree.is_leaf(id)) continue;
            if (auto p = tree.pvalue(id); p && tree.pvalue_source(id) == PvalueSource::User) {
                value[id.index()] = p;
                std::string path;
                for (const auto& l : tree.path(id)) path += (path.empty() ? "" : "/") + l;
                warnings.push_back("user-supplied p-value kept for " + path + " instead of " +
                                   std::string(to_string(kind)) + " combination");
                continue;
            } else if (p) {
                value[id.index()] = p;
                continue;
            }
            buf.clear();
            for (NodeId c : tree.children(id)) buf.push_back(*value[c.index()]);
            value[id.index()] = combine(kind, buf);
            derived[id.index()] = value[id.index()];
        }
    }
    return tree.with_derived_pvalues(derived, std::move(warnings));
}

}  // namespace treefdr
