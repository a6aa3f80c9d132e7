#include "hhh/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hhh {

std::vector<Prefix> ExactCounts::support() const {
    std::vector<Prefix> out;
    out.reserve(counts.size());
    for (const auto& [p, f] : counts) out.push_back(p);
    std::sort(out.begin(), out.end(), prefix_less);
    return out;
}

ExactCounts exact_counts(std::span<const TraceRecord> stream, const HierarchySpec& spec) {
    ExactCounts out;
    std::unordered_map<Prefix, uint64_t, PrefixHash> elems;
    for (const TraceRecord& r : stream) {
        if (r.count == 0) throw std::invalid_argument("stream counts must be positive");
        elems[record_element(spec, r)] += r.count;
        out.total += r.count;
    }
    out.elements.assign(elems.begin(), elems.end());
    std::sort(out.elements.begin(), out.elements.end(),
              [](const auto& a, const auto& b) { return prefix_less(a.first, b.first); });
    for (const auto& [e, f] : out.elements) {
        for (uint64_t i = 0; i < spec.node_count(); ++i) {
            out.counts[generalize_to(spec, e, spec.label_at(i))] += f;
        }
    }
    return out;
}

bool ExactHhhSet::contains(const Prefix& p) const {
    for (const ExactHhhEntry& e : entries) {
        if (e.prefix == p) return true;
    }
    return false;
}

namespace {

/// Covered-by lists: for each observed element, the discovered HHHs it lies
/// below. Element e contributes to F_p iff no recorded h with h strictly
/// below p covers e.
struct CoverIndex {
    const HierarchySpec& spec;
    std::vector<std::vector<Prefix>> covers;  // parallel to elements

    bool covered(std::size_t elem, const Prefix& p) const {
        for (const Prefix& h : covers[elem]) {
            if (!(h == p) && is_descendant(spec, h, p)) return true;
        }
        return false;
    }
};

}  // namespace

ExactHhhSet exact_hhh(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                      const Rational& phi) {
    if (phi.is_zero()) throw std::invalid_argument("phi must be positive");
    ExactCounts counts = exact_counts(stream, spec);
    ExactHhhSet out;
    out.total = counts.total;
    const uint64_t threshold = phi.ceil_mul(counts.total);

    CoverIndex cover{spec, std::vector<std::vector<Prefix>>(counts.elements.size())};

    for (uint32_t level = spec.deepest_level() + 1; level-- > 0;) {
        // conditioned counts for this level, against deeper-level HHHs only
        std::vector<std::pair<Prefix, uint64_t>> found;
        for (uint64_t node : spec.nodes_by_level()[level]) {
            Label label = spec.label_at(node);
            std::unordered_map<Prefix, uint64_t, PrefixHash> cond;
            for (std::size_t i = 0; i < counts.elements.size(); ++i) {
                const auto& [e, f] = counts.elements[i];
                Prefix p = generalize_to(spec, e, label);
                if (!cover.covered(i, p)) cond[p] += f;
            }
            for (const auto& [p, F] : cond) {
                if (F >= threshold) found.push_back({p, F});
            }
        }
        std::sort(found.begin(), found.end(),
                  [](const auto& a, const auto& b) { return prefix_less(a.first, b.first); });
        for (const auto& [p, F] : found) {
            out.entries.push_back(ExactHhhEntry{p, counts.count_of(p), F});
            for (std::size_t i = 0; i < counts.elements.size(); ++i) {
                if (is_descendant(spec, counts.elements[i].first, p)) {
                    cover.covers[i].push_back(p);
                }
            }
        }
    }
    return out;
}

uint64_t conditioned_count_wrt(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                               const Prefix& p, std::span<const Prefix> set) {
    ExactCounts counts = exact_counts(stream, spec);
    uint64_t F = 0;
    for (const auto& [e, f] : counts.elements) {
        if (!is_descendant(spec, e, p)) continue;
        bool excluded = false;
        for (const Prefix& q : set) {
            if (!(q == p) && is_descendant(spec, q, p) && is_descendant(spec, e, q)) {
                excluded = true;
                break;
            }
        }
        if (!excluded) F += f;
    }
    return F;
}

CheckVerdict check_report(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                          const Rational& phi, const Rational& epsilon,
                          const HhhReport& report) {
    CheckVerdict verdict;
    ExactCounts counts = exact_counts(stream, spec);
    const uint64_t threshold = phi.ceil_mul(counts.total);

    // Accuracy: bracket and width per output entry
    for (const HhhOutputEntry& e : report.entries) {
        uint64_t truth = counts.count_of(e.prefix);
        std::string text = to_string(spec, e.prefix);
        if (!(e.f_min <= truth && truth <= e.f_max)) {
            verdict.violations.push_back(
                {"accuracy", text,
                 "interval [" + std::to_string(e.f_min) + "," + std::to_string(e.f_max) +
                     "] misses exact count " + std::to_string(truth)});
        }
        if (!epsilon.le_mul(e.f_max - e.f_min, counts.total)) {
            verdict.violations.push_back(
                {"accuracy", text,
                 "interval width " + std::to_string(e.f_max - e.f_min) + " exceeds epsilon*N"});
        }
    }

    // Coverage: conditioned counts of all uncovered support prefixes, one
    // sweep per lattice node over the covered-by lists
    std::vector<std::vector<Prefix>> covers(counts.elements.size());
    for (std::size_t i = 0; i < counts.elements.size(); ++i) {
        for (const HhhOutputEntry& q : report.entries) {
            if (is_descendant(spec, counts.elements[i].first, q.prefix)) {
                covers[i].push_back(q.prefix);
            }
        }
    }
    std::unordered_map<Prefix, bool, PrefixHash> in_set;
    for (const HhhOutputEntry& e : report.entries) in_set[e.prefix] = true;

    for (uint64_t node = 0; node < spec.node_count(); ++node) {
        Label label = spec.label_at(node);
        std::unordered_map<Prefix, uint64_t, PrefixHash> cond;
        for (std::size_t i = 0; i < counts.elements.size(); ++i) {
            const auto& [e, f] = counts.elements[i];
            Prefix p = generalize_to(spec, e, label);
            bool excluded = false;
            for (const Prefix& h : covers[i]) {
                if (!(h == p) && is_descendant(spec, h, p)) {
                    excluded = true;
                    break;
                }
            }
            if (!excluded) cond[p] += f;
        }
        verdict.prefixes_checked += cond.size();
        std::vector<std::pair<Prefix, uint64_t>> rows(cond.begin(), cond.end());
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return prefix_less(a.first, b.first); });
        for (const auto& [p, F] : rows) {
            if (in_set.count(p)) continue;
            if (F >= threshold) {
                verdict.violations.push_back(
                    {"coverage", to_string(spec, p),
                     "conditioned count " + std::to_string(F) + " >= phi*N threshold " +
                         std::to_string(threshold)});
            }
        }
    }

    verdict.pass = verdict.violations.empty();
    return verdict;
}

std::string to_json(const CheckVerdict& verdict) {
    nlohmann::ordered_json j;
    j["pass"] = verdict.pass;
    j["prefixes_checked"] = verdict.prefixes_checked;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const CheckViolation& v : verdict.violations) {
        nlohmann::ordered_json row;
        row["kind"] = v.kind;
        row["prefix"] = v.prefix;
        row["detail"] = v.detail;
        rows.push_back(row);
    }
    j["violations"] = rows;
    return j.dump(2) + "\n";
}

HhhReport report_from_exact(const ExactHhhSet& set, const HierarchySpec& spec,
                            const Rational& phi) {
    HhhReport report(spec, Rational(0, 1), phi, set.total);
    for (const ExactHhhEntry& e : set.entries) {
        report.entries.push_back(
            HhhOutputEntry{e.prefix, e.unconditioned, e.unconditioned, e.conditioned});
    }
    sort_entries(report);
    return report;
}

}  // namespace hhh
