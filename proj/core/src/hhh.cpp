#include "hhh/hhh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace hhh {

HhhState::HhhState(HierarchySpec spec, Rational epsilon, UpdateMode mode)
    : spec_(std::move(spec)),
      epsilon_(epsilon),
      mode_(mode),
      node_capacity_(0) {
    if (epsilon.is_zero() || !(epsilon < Rational(1, 1))) {
        throw std::invalid_argument("epsilon must be in (0, 1)");
    }
    node_capacity_ = counters_for_epsilon(epsilon);
    labels_.reserve(spec_.node_count());
    summaries_.reserve(spec_.node_count());
    for (uint64_t i = 0; i < spec_.node_count(); ++i) {
        labels_.push_back(spec_.label_at(i));
        summaries_.emplace_back(mode_, node_capacity_);
    }
}

void HhhState::insert(const Prefix& element, uint64_t count) {
    if (count == 0) throw std::invalid_argument("insert count must be >= 1");
    if (mode_ == UpdateMode::unitary && count != 1) {
        throw std::logic_error("unitary state only accepts count == 1");
    }
    if (element.label != spec_.full_label()) {
        throw std::invalid_argument("insert requires a fully specified element");
    }
    for (uint64_t i = 0; i < summaries_.size(); ++i) {
        summaries_[i].update(generalize_to(spec_, element, labels_[i]), count);
    }
    total_ += count;
}

uint64_t HhhState::allocated_counters() const {
    return spec_.node_count() * static_cast<uint64_t>(node_capacity_);
}

HhhState HhhState::assemble(HierarchySpec spec, Rational epsilon, UpdateMode mode,
                            std::vector<SpaceSaving> summaries, uint64_t total) {
    HhhState state(std::move(spec), epsilon, mode);
    if (summaries.size() != state.spec_.node_count()) {
        throw std::invalid_argument("summary count does not match lattice size");
    }
    state.summaries_ = std::move(summaries);
    state.total_ = total;
    return state;
}

namespace {

/// Candidates at one level in canonical order: tracked prefixes of every
/// node summary at that level, merged with extra keys (1D discount carriers).
std::vector<Prefix> level_candidates(const HhhState& state, uint32_t level,
                                     const std::vector<Prefix>& extra) {
    std::vector<Prefix> out;
    for (uint64_t node : state.spec().nodes_by_level()[level]) {
        for (const CounterSnapshot& c : state.summary(node).counters()) {
            out.push_back(c.item);
        }
    }
    out.insert(out.end(), extra.begin(), extra.end());
    std::sort(out.begin(), out.end(), prefix_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void warn_phi(const HhhState& state, const Rational& phi, HhhReport& report) {
    Rational two_eps = state.epsilon() + state.epsilon();
    if (phi <= two_eps) {
        report.warnings.push_back(
            "phi <= 2*epsilon: output-size and conditioned-error bounds do not apply");
    }
}

}  // namespace

HhhReport output_1d(const HhhState& state, const Rational& phi) {
    if (state.spec().dimensions() != 1) {
        throw std::invalid_argument("output_1d requires a one-dimensional hierarchy");
    }
    if (phi.is_zero() || !(phi < Rational(1, 1))) {
        throw std::invalid_argument("phi must be in (0, 1)");
    }
    HhhReport report(state.spec(), state.epsilon(), phi, state.total());
    warn_phi(state, phi, report);
    const uint64_t threshold = phi.ceil_mul(state.total());

    // s maps a prefix to the mass already attributed below it; keys may be
    // untracked prefixes, which cannot be emitted but still forward s.
    std::unordered_map<Prefix, uint64_t, PrefixHash> discount;
    std::vector<Prefix> carriers;  // discount keys for the level above
    for (uint32_t level = state.spec().deepest_level() + 1; level-- > 0;) {
        std::vector<Prefix> todo = level_candidates(state, level, carriers);
        carriers.clear();
        uint64_t node = state.spec().nodes_by_level()[level][0];
        const SpaceSaving& summary = state.summary(node);
        for (const Prefix& p : todo) {
            uint64_t s = 0;
            if (auto it = discount.find(p); it != discount.end()) s = it->second;
            uint64_t forward = s;
            if (summary.tracks(p)) {
                Estimate est = summary.estimate(p);
                int64_t f_prime = static_cast<int64_t>(est.f_max) - static_cast<int64_t>(s);
                bool emit = f_prime >= 0 && static_cast<uint64_t>(f_prime) >= threshold;
                report.audit.push_back(HhhAuditEntry{p, est.f_min, est.f_max, f_prime, emit});
                if (emit) {
                    report.entries.push_back(
                        HhhOutputEntry{p, est.f_min, est.f_max, static_cast<uint64_t>(f_prime)});
                    forward = est.f_min;
                }
            }
            if (level > 0 && forward > 0) {
                Prefix par = *parent(state.spec(), p, 0);
                auto [it, fresh] = discount.emplace(par, forward);
                if (!fresh) it->second += forward;
                if (fresh) carriers.push_back(par);
            }
        }
    }
    sort_entries(report);
    return report;
}

namespace {

/// Shared 2D / general-dimension output walk. `pairwise_only` drops the
/// third-element exclusion on the glb correction term, which is the
/// conservative rule valid in any dimension.
HhhReport output_multidim(const HhhState& state, const Rational& phi, bool pairwise_only) {
    if (phi.is_zero() || !(phi < Rational(1, 1))) {
        throw std::invalid_argument("phi must be in (0, 1)");
    }
    HhhReport report(state.spec(), state.epsilon(), phi, state.total());
    warn_phi(state, phi, report);
    const HierarchySpec& spec = state.spec();
    const uint64_t threshold = phi.ceil_mul(state.total());

    std::vector<HhhOutputEntry> emitted;  // P, in emission order (deep levels first)
    std::vector<const HhhOutputEntry*> desc;
    std::vector<const HhhOutputEntry*> hp;
    for (uint32_t level = spec.deepest_level() + 1; level-- > 0;) {
        for (const Prefix& p : level_candidates(state, level, {})) {
            const SpaceSaving& summary = state.summary(p.label);
            Estimate est = summary.estimate(p);

            // H_p: maximal elements of P strictly below p
            desc.clear();
            for (const HhhOutputEntry& h : emitted) {
                if (!(h.prefix == p) && is_descendant(spec, h.prefix, p)) {
                    desc.push_back(&h);
                }
            }
            hp.clear();
            for (const HhhOutputEntry* h : desc) {
                bool maximal = true;
                for (const HhhOutputEntry* other : desc) {
                    if (other != h && is_descendant(spec, h->prefix, other->prefix)) {
                        maximal = false;
                        break;
                    }
                }
                if (maximal) hp.push_back(h);
            }

            int64_t f_prime = static_cast<int64_t>(est.f_max);
            for (const HhhOutputEntry* h : hp) f_prime -= static_cast<int64_t>(h->f_min);

            // inclusion-exclusion correction over pairwise glbs
            for (std::size_t i = 0; i < hp.size(); ++i) {
                for (std::size_t j = i + 1; j < hp.size(); ++j) {
                    std::optional<Prefix> q = glb(spec, hp[i]->prefix, hp[j]->prefix);
                    if (!q) continue;  // trivial item, count 0
                    if (!pairwise_only) {
                        bool below_third = false;
                        for (std::size_t k = 0; k < hp.size() && !below_third; ++k) {
                            if (k != i && k != j && is_descendant(spec, *q, hp[k]->prefix)) {
                                below_third = true;
                            }
                        }
                        if (below_third) continue;
                    }
                    f_prime += static_cast<int64_t>(state.summary(q->label).estimate(*q).f_max);
                }
            }

            bool emit = f_prime >= 0 && static_cast<uint64_t>(f_prime) >= threshold;
            report.audit.push_back(HhhAuditEntry{p, est.f_min, est.f_max, f_prime, emit});
            if (emit) {
                emitted.push_back(
                    HhhOutputEntry{p, est.f_min, est.f_max, static_cast<uint64_t>(f_prime)});
            }
        }
    }
    report.entries = std::move(emitted);
    sort_entries(report);
    return report;
}

}  // namespace

HhhReport output_2d(const HhhState& state, const Rational& phi) {
    if (state.spec().dimensions() != 2) {
        throw std::invalid_argument("output_2d requires a two-dimensional hierarchy");
    }
    return output_multidim(state, phi, /*pairwise_only=*/false);
}

HhhReport output_nd(const HhhState& state, const Rational& phi) {
    if (state.spec().dimensions() < 2) {
        throw std::invalid_argument("output_nd requires d >= 2 (use output_1d)");
    }
    return output_multidim(state, phi, /*pairwise_only=*/true);
}

Rational bound_output_size_1d(const Rational& phi, const Rational& epsilon) {
    Rational two_eps = epsilon + epsilon;
    if (!(two_eps < phi)) {
        throw std::domain_error("bound requires epsilon < phi/2");
    }
    Rational gap = phi - two_eps;
    return Rational(gap.den(), gap.num());
}

Rational bound_cond_error_1d(const Rational& phi, const Rational& epsilon) {
    Rational two_eps = epsilon + epsilon;
    if (!(two_eps < phi)) {
        throw std::domain_error("bound requires epsilon < phi/2");
    }
    Rational gap = phi - two_eps;
    return epsilon * Rational(gap.den(), gap.num());
}

double bound_output_size_2d(const Rational& phi, const Rational& epsilon, uint64_t antichain) {
    double A = static_cast<double>(antichain);
    double eps = epsilon.to_double();
    double t = phi.to_double() - (1.0 + A) * eps;
    double disc = t * t - A * A * eps;
    if (disc < 0) {
        throw std::domain_error("epsilon too large for the 2D output-size bound");
    }
    return (2.0 / (A * eps)) * (t - std::sqrt(disc));
}

}  // namespace hhh
