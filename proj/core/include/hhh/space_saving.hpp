#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "hhh/lattice.hpp"
#include "hhh/rational.hpp"

namespace hhh {

enum class UpdateMode : uint8_t { weighted = 0, unitary = 1 };

/// Frequency bracket for one item: f_min <= true frequency <= f_max, and
/// f_max - f_min is the maximum overestimation.
struct Estimate {
    uint64_t f_min = 0;
    uint64_t f_max = 0;
};

struct CounterSnapshot {
    Prefix item;
    uint64_t count = 0;
    uint64_t error = 0;
};

/// Counter capacity that guarantees error at most epsilon*N: ceil(1/epsilon).
uint32_t counters_for_epsilon(const Rational& epsilon);

/// Fixed-capacity counter summary. On overflow the minimum counter is
/// reassigned to the incoming item with count = old minimum + increment and
/// error = old minimum. Ties among equal-minimum counters evict the least
/// recently updated one, so runs are reproducible.
///
/// Two interchangeable engines behind one interface, chosen at construction:
/// weighted mode uses an indexed min-heap (O(log m) per update, arbitrary
/// increments), unitary mode uses the count-ordered bucket list (O(1) per
/// update, increments of exactly 1). Both produce identical states on
/// all-ones streams.
///
/// Single writer; concurrent reads during writes are not supported.
class SpaceSaving {
public:
    SpaceSaving(UpdateMode mode, uint32_t capacity);

    /// Adds `count` occurrences of `item`. Unitary summaries only accept
    /// count == 1. count == 0 is rejected.
    void update(const Prefix& item, uint64_t count);

    /// O(1) single-occurrence update; rejected on weighted summaries.
    void update_unitary(const Prefix& item);

    /// Tracked item: (count - error, count). Untracked: (0, minimum counter
    /// value), which is 0 while the summary is not full. For summaries built
    /// by updates alone the upper component is sound: an untracked item
    /// cannot have occurred more often than the current minimum counter.
    /// Merged summaries can undershoot for untracked items, but only within
    /// the merge error bound.
    Estimate estimate(const Prefix& item) const;

    bool tracks(const Prefix& item) const { return index_.find(item) != index_.end(); }

    UpdateMode mode() const { return mode_; }
    uint32_t capacity() const { return capacity_; }
    std::size_t size() const { return slots_.size(); }
    bool full() const { return slots_.size() == capacity_; }
    uint64_t total() const { return total_; }

    /// Minimum counter value, 0 while not full (matches the untracked
    /// estimate semantics).
    uint64_t min_count() const;

    /// Counters in slot order (stable across updates of tracked items).
    std::vector<CounterSnapshot> counters() const;
    /// Counters in canonical item order; use for state comparison.
    std::vector<CounterSnapshot> sorted_counters() const;

    /// Wire format, little-endian fixed width: u8 mode | u32 capacity |
    /// u64 total | u32 counter count | per counter (canonical item order):
    /// d x u8 label entries, d x u32 values, u64 count, u64 error.
    void serialize(std::vector<uint8_t>& out, std::size_t dims) const;
    static SpaceSaving deserialize(std::span<const uint8_t> in, std::size_t dims,
                                   std::size_t* consumed = nullptr);

    /// Combines independently built summaries over substreams into one
    /// summary of the concatenation. Per item: lower = sum of f_min, upper =
    /// sum of f_max (estimates, so untracked inputs contribute their minimum
    /// counter to upper). Keeps the m_out items with the largest lower
    /// bounds, ties broken by item key; stored count = upper, error =
    /// upper - lower. Inputs must share the mode.
    static SpaceSaving merge(const std::vector<const SpaceSaving*>& inputs, uint32_t m_out);

    /// Rebuilds a summary from counter triples (deserialization and merge).
    /// Counters must be distinct, at most capacity, with error <= count.
    static SpaceSaving from_counters(UpdateMode mode, uint32_t capacity, uint64_t total,
                                     std::vector<CounterSnapshot> counters);

private:
    static constexpr uint32_t kNone = UINT32_MAX;

    struct Slot {
        Prefix item;
        uint64_t count = 0;
        uint64_t error = 0;
        uint64_t touched = 0;                  // weighted: recency stamp
        uint32_t bucket = kNone;               // unitary: owning bucket
        uint32_t prev = kNone, next = kNone;   // unitary: chain within bucket
    };
    struct Bucket {
        uint64_t count = 0;
        uint32_t head = kNone, tail = kNone;   // LRU order: head is oldest
        uint32_t prev = kNone, next = kNone;   // ascending count order
    };

    // shared
    void insert_fresh(const Prefix& item, uint64_t count);
    void check_invariants() const;

    // weighted engine
    bool heap_less(uint32_t a, uint32_t b) const;
    void heap_sift_up(std::size_t i);
    void heap_sift_down(std::size_t i);

    // unitary engine
    uint32_t bucket_alloc(uint64_t count);
    void bucket_insert_after(uint32_t b, uint32_t after);
    void bucket_append_slot(uint32_t b, uint32_t s);
    void bucket_detach_slot(uint32_t s);
    void bucket_release_if_empty(uint32_t b);
    void slot_to_count(uint32_t s, uint64_t new_count);

    UpdateMode mode_;
    uint32_t capacity_;
    uint64_t total_ = 0;
    uint64_t sum_counts_ = 0;
    int64_t base_excess_ = 0;  // sum_counts - total at construction time
    uint64_t clock_ = 0;

    std::vector<Slot> slots_;
    std::unordered_map<Prefix, uint32_t, PrefixHash> index_;

    std::vector<uint32_t> heap_;  // weighted: slot indices, min at front
    std::vector<uint32_t> pos_;   // weighted: slot -> heap position

    std::vector<Bucket> buckets_;       // unitary
    std::vector<uint32_t> free_buckets_;
    uint32_t bucket_head_ = kNone;
};

}  // namespace hhh
