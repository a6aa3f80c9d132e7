#pragma once

#include <cstdint>
#include <vector>

#include "hhh/lattice.hpp"
#include "hhh/rational.hpp"
#include "hhh/report.hpp"
#include "hhh/space_saving.hpp"

namespace hhh {

/// Streaming state for hierarchical heavy hitters: one SpaceSaving instance
/// per lattice node, each with ceil(1/epsilon) counters, all sized at
/// construction. Every insert fans out to all H nodes, so each node summary
/// sees the same running total N.
///
/// Summaries are independent single-writer structures; the fan-out may be
/// parallelized across nodes by callers. Output runs on a quiesced state.
class HhhState {
public:
    HhhState(HierarchySpec spec, Rational epsilon, UpdateMode mode = UpdateMode::weighted);

    /// Inserts `count` occurrences of a fully specified element into all H
    /// node summaries. Unitary-mode states only accept count == 1 (use a
    /// weighted state for aggregated traces).
    void insert(const Prefix& element, uint64_t count = 1);

    const HierarchySpec& spec() const { return spec_; }
    const Rational& epsilon() const { return epsilon_; }
    UpdateMode mode() const { return mode_; }
    uint64_t total() const { return total_; }
    uint32_t node_capacity() const { return node_capacity_; }

    /// Total counters across all node summaries: H * ceil(1/epsilon), fixed
    /// at construction.
    uint64_t allocated_counters() const;

    const SpaceSaving& summary(uint64_t node_index) const { return summaries_[node_index]; }
    const SpaceSaving& summary(const Label& label) const {
        return summaries_[spec_.node_index(label)];
    }

    /// Rebuilds a state around externally constructed node summaries
    /// (distributed merge, deserialization).
    static HhhState assemble(HierarchySpec spec, Rational epsilon, UpdateMode mode,
                             std::vector<SpaceSaving> summaries, uint64_t total);

private:
    HierarchySpec spec_;
    Rational epsilon_;
    UpdateMode mode_;
    uint32_t node_capacity_;
    uint64_t total_ = 0;
    std::vector<Label> labels_;  // node index -> label
    std::vector<SpaceSaving> summaries_;
};

/// One-dimensional output: walks tracked prefixes from the deepest level to
/// the root, discounting each prefix's F' = f_max - s by the mass already
/// attributed to emitted descendants, and emits prefixes with F' >= phi*N.
/// Discounts accumulated at untracked prefixes still flow to their parents.
HhhReport output_1d(const HhhState& state, const Rational& phi);

/// Two-dimensional output: per tracked prefix p,
/// F' = f_max(p) - sum f_min(h) over the maximal emitted descendants H_p
/// + sum f_max(q) over pairwise greatest lower bounds of H_p that are not
/// below a third element of H_p. Emits iff F' >= phi*N.
HhhReport output_2d(const HhhState& state, const Rational& phi);

/// General-dimension output (d >= 2): like the 2D procedure but the
/// correction term sums f_max(glb(h, h')) over all distinct pairs with a
/// nontrivial glb, without the third-element exclusion. Looser but still
/// conservative by inclusion-exclusion.
HhhReport output_nd(const HhhState& state, const Rational& phi);

/// Upper bound on the 1D output size: 1/(phi - 2*epsilon).
/// Requires epsilon < phi/2.
Rational bound_output_size_1d(const Rational& phi, const Rational& epsilon);

/// Upper bound on the 1D conditioned-count error as a multiple of N:
/// epsilon/(phi - 2*epsilon). Requires epsilon < phi/2.
Rational bound_cond_error_1d(const Rational& phi, const Rational& epsilon);

/// Closed-form bound on the 2D output size for antichain size A:
/// (2/(A*eps)) * (phi - (1+A)*eps - sqrt((phi - (1+A)*eps)^2 - A^2*eps)).
/// Throws if the discriminant is negative (epsilon too large for the bound).
double bound_output_size_2d(const Rational& phi, const Rational& epsilon, uint64_t antichain);

}  // namespace hhh
