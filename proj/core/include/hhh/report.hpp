#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hhh/lattice.hpp"
#include "hhh/rational.hpp"

namespace hhh {

/// One output prefix: unconditioned bracket [f_min, f_max] plus the
/// conservative conditioned-count estimate F' that crossed the threshold.
struct HhhOutputEntry {
    Prefix prefix;
    uint64_t f_min = 0;
    uint64_t f_max = 0;
    uint64_t f_prime = 0;
};

/// Every prefix the output procedure evaluated, with its F' and the emit
/// decision, in evaluation order. Kept in memory only (not serialized);
/// drives the exact-identity and conservativeness checks.
struct HhhAuditEntry {
    Prefix prefix;
    uint64_t f_min = 0;
    uint64_t f_max = 0;
    int64_t f_prime = 0;
    bool emitted = false;
};

struct HhhReport {
    HierarchySpec spec;
    Rational epsilon;
    Rational phi;
    uint64_t total = 0;  // N
    /// Sorted: level descending, then prefix text ascending.
    std::vector<HhhOutputEntry> entries;
    std::vector<HhhAuditEntry> audit;
    std::vector<std::string> warnings;

    HhhReport(HierarchySpec s, Rational eps, Rational ph, uint64_t n)
        : spec(std::move(s)), epsilon(eps), phi(ph), total(n) {}
};

/// CSV: comment header lines with run metadata, then one row per entry.
std::string to_csv(const HhhReport& report);

/// JSON with a stable field order; byte-identical for identical runs.
std::string to_json(const HhhReport& report);

/// Parses a report back from its JSON form (audit and warnings are not
/// round-tripped; they are diagnostics, not results).
HhhReport report_from_json(const std::string& text);

/// Applies the canonical entry order (level descending, prefix text
/// ascending) in place.
void sort_entries(HhhReport& report);

}  // namespace hhh
