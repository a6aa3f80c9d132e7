#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hhh/lattice.hpp"
#include "hhh/rational.hpp"
#include "hhh/report.hpp"
#include "hhh/stream.hpp"

namespace hhh {

/// Exact unconditioned counts f(p) for every prefix with f(p) > 0, computed
/// directly from the fully specified multiset. Memory-unconstrained; only
/// the sublattice spanned by observed elements is materialized.
struct ExactCounts {
    std::unordered_map<Prefix, uint64_t, PrefixHash> counts;
    /// Distinct observed elements with aggregated weights, canonical order.
    std::vector<std::pair<Prefix, uint64_t>> elements;
    uint64_t total = 0;

    uint64_t count_of(const Prefix& p) const {
        auto it = counts.find(p);
        return it == counts.end() ? 0 : it->second;
    }
    /// All prefixes with positive unconditioned count, canonical order.
    std::vector<Prefix> support() const;
};

ExactCounts exact_counts(std::span<const TraceRecord> stream, const HierarchySpec& spec);

struct ExactHhhEntry {
    Prefix prefix;
    uint64_t unconditioned = 0;  // f(p)
    uint64_t conditioned = 0;    // F_p at discovery time
};

/// The unique exact HHH set, built level by level from the bottom: a prefix
/// joins when its count not yet covered by previously discovered descendant
/// HHHs reaches phi*N. Entries sorted level descending, then prefix text.
struct ExactHhhSet {
    std::vector<ExactHhhEntry> entries;
    uint64_t total = 0;

    bool contains(const Prefix& p) const;
};

ExactHhhSet exact_hhh(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                      const Rational& phi);

/// Exact conditioned count of p with respect to an arbitrary candidate set:
/// mass of elements below p that are not below any member of `set` strictly
/// below p.
uint64_t conditioned_count_wrt(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                               const Prefix& p, std::span<const Prefix> set);

struct CheckViolation {
    std::string kind;  // "accuracy" or "coverage"
    std::string prefix;
    std::string detail;
};

struct CheckVerdict {
    bool pass = true;
    uint64_t prefixes_checked = 0;
    std::vector<CheckViolation> violations;
};

/// Validates a report against the definition of the approximate problem:
/// Accuracy (every entry's bracket contains the exact count, width at most
/// epsilon*N) and Coverage (every prefix outside the output set has exact
/// conditioned count with respect to it below phi*N). Only prefixes with
/// positive unconditioned count need checking; all others are trivially
/// covered.
CheckVerdict check_report(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                          const Rational& phi, const Rational& epsilon,
                          const HhhReport& report);

std::string to_json(const CheckVerdict& verdict);

/// Renders the exact set in report form (f_min = f_max = f(p), F' = F_p,
/// epsilon = 0) so it can go through the same serialization and checking
/// paths as a streaming report.
HhhReport report_from_exact(const ExactHhhSet& set, const HierarchySpec& spec,
                            const Rational& phi);

}  // namespace hhh
