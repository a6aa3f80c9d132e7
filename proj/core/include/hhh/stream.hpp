#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hhh/hhh.hpp"
#include "hhh/lattice.hpp"

namespace hhh {

/// One trace line: a fully specified element (one value per dimension) with
/// a positive weight, default 1.
struct TraceRecord {
    std::array<uint32_t, kMaxDims> values{};
    uint64_t count = 1;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class TraceFormat { csv, csv2d };

/// CSV traces: one record per line, d value columns then an optional count
/// column. Bytewise dimensions are dotted quads, everything else decimal
/// integers. csv2d additionally requires a two-dimensional hierarchy.
/// Parse errors carry 1-based line numbers. Blank lines and lines starting
/// with '#' are skipped.
std::vector<TraceRecord> parse_trace(std::istream& in, const HierarchySpec& spec,
                                     TraceFormat format);
std::vector<TraceRecord> parse_trace_file(const std::string& path, const HierarchySpec& spec,
                                          TraceFormat format);

std::string format_trace(std::span<const TraceRecord> records, const HierarchySpec& spec);

/// Synthetic stream generators. Fully deterministic for a given seed.
struct GeneratorConfig {
    enum class Kind { zipf, uniform, few_heavy };
    Kind kind = Kind::zipf;
    uint64_t universe = 1 << 16;  // per-dimension value universe (<= 2^20)
    uint64_t records = 100000;    // unit-count records
    double alpha = 1.2;           // zipf exponent
    uint32_t heavy_items = 4;     // few_heavy: number of hot elements
    uint64_t seed = 1;
};

/// Draws `records` fully specified elements, one independent draw per
/// dimension. Zipf ranks are scattered over the universe by a fixed odd
/// multiplier so heavy items spread across the hierarchy.
std::vector<TraceRecord> generate_stream(const GeneratorConfig& config,
                                         const HierarchySpec& spec);

Prefix record_element(const HierarchySpec& spec, const TraceRecord& record);

/// Feeds a whole stream through the insert path.
void insert_stream(HhhState& state, std::span<const TraceRecord> records);

/// Counter-occupancy statistics for one state: per-node number of tracked
/// counters whose f_max exceeds epsilon*N. On skewed streams this stays far
/// below the capacity ceil(1/epsilon).
struct OccupancyStats {
    uint64_t capacity_per_node = 0;
    uint64_t max_heavy_counters = 0;  // max over nodes
    std::vector<uint64_t> heavy_counters_per_node;
};
OccupancyStats occupancy_stats(const HhhState& state);

}  // namespace hhh
