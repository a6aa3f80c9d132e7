#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hhh/hhh.hpp"
#include "hhh/stream.hpp"

namespace hhh {

/// Per-event operation costs for the TCAM device model. Every per-packet
/// search of an instance costs `search`; a hit costs a READ of the matched
/// entry plus a WRITE of the incremented count; a miss with a free slot
/// costs one WRITE; a miss on a full instance costs a READ of that
/// instance's minimum entry, a WRITE replacing it, and `min_maintenance_read`
/// READs to refresh the externally stored minimum.
struct TcamCostModel {
    uint32_t search = 1;
    uint32_t hit_read = 1;
    uint32_t hit_write = 1;
    uint32_t insert_write = 1;
    uint32_t evict_read = 1;
    uint32_t evict_write = 1;
    uint32_t min_maintenance_read = 1;
    /// Whether the root node occupies a TCAM instance (default) or lives in
    /// a plain register with zero TCAM cost. Reports carry both aggregates;
    /// this picks the headline one.
    bool include_root = true;

    static TcamCostModel from_json(const std::string& text);
    std::string to_json() const;
};

struct TcamInstanceStats {
    uint64_t searches = 0;
    uint64_t reads = 0;
    uint64_t writes = 0;
    uint64_t hits = 0;
    uint64_t misses = 0;
    uint64_t evictions = 0;
};

struct TcamOpTotals {
    uint64_t reads = 0;
    uint64_t writes = 0;
    uint64_t searches = 0;
    uint64_t packets = 0;
    double ops_per_packet() const {
        return packets == 0
                   ? 0.0
                   : static_cast<double>(reads + writes + searches) / static_cast<double>(packets);
    }
};

/// Operation accounting for one simulated run. Instances are identified by
/// level tags: ceil(log2 H) extra fully specified key bits, tag 0 assigned
/// to the deepest level (matching per-packet search order).
struct TcamOpCounts {
    uint64_t packets = 0;
    uint32_t tag_bits = 0;
    uint32_t root_tag = 0;
    std::vector<TcamInstanceStats> per_instance;  // indexed by tag
    std::vector<Label> instance_labels;
    /// Worst (search + update) cost charged to a single instance by a single
    /// packet anywhere in the run.
    uint64_t max_instance_packet_ops = 0;

    TcamOpTotals totals(bool with_root) const;
};

/// Simulates the one-TCAM implementation: per packet, one level-tagged
/// SEARCH per maintained instance followed by the update operations above.
/// The per-instance counter behavior is exactly the software unitary path,
/// so the final state is bit-equal to a software run of the same stream.
/// Streams must be unitary (all record counts 1).
struct TcamRunResult {
    TcamOpCounts ops;
    HhhState state;
};
TcamRunResult tcam_run(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                       const Rational& epsilon, const TcamCostModel& cost = {});

/// Variant with a single Space Saving instance of capacity H*ceil(1/eps)
/// keyed by (prefix, level tag) pairs; one stored minimum for the whole
/// device. Satisfies per-prefix Accuracy; Coverage is not claimed.
struct TcamSingleRunResult {
    TcamOpCounts ops;
    SpaceSaving summary;
};
TcamSingleRunResult tcam_single_instance_run(std::span<const TraceRecord> stream,
                                             const HierarchySpec& spec, const Rational& epsilon,
                                             const TcamCostModel& cost = {});

/// Ternary key for one stored entry: per-dimension value bits with '*' for
/// wildcarded steps, then '|' and the fully specified tag bits.
std::string ternary_key(const HierarchySpec& spec, const Prefix& p, uint32_t tag,
                        uint32_t tag_bits);

std::string to_json(const TcamOpCounts& ops, const TcamCostModel& cost);

}  // namespace hhh
