#pragma once

// Parent p-values from the p-values of the family a parent indexes.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "treefdr/hypothesis_tree.hpp"

namespace treefdr {

enum class CombinerKind { Simes, Fisher, Bonferroni, SimesAdjusted };

std::string_view to_string(CombinerKind kind) noexcept;
std::optional<CombinerKind> parse_combiner(std::string_view name) noexcept;

/// min_j p_(j) * k / j over the sorted family, capped at 1.
double simes(std::span<const double> pvals);

/// k * min_j p_j, capped at 1.
double bonferroni(std::span<const double> pvals);

/// Partial harmonic sum 1 + 1/2 + ... + 1/m. Summed directly up to a
/// cutoff, then by the asymptotic expansion (which agrees to double
/// precision there).
double harmonic_g(std::uint64_t m);

/// Simes times g(k), capped at 1; valid under arbitrary dependence.
double simes_adjusted(std::span<const double> pvals);

/// Upper tail of chi-square with 2k degrees of freedom at -2 * sum(log p).
/// Zero inputs are clamped to the smallest positive double.
double fisher(std::span<const double> pvals);

/// Upper regularized incomplete gamma Q(n, x) for integer n >= 1.
double gamma_q_integer(std::uint64_t n, double x);

double combine(CombinerKind kind, std::span<const double> pvals);

/// Fill every internal node that lacks a p-value by combining its children,
/// bottom-up. User-supplied internal p-values are kept (a warning is added).
HypothesisTree populate_internal_pvalues(const HypothesisTree& tree, CombinerKind kind);

}  // namespace treefdr
