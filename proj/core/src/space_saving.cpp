#include "hhh/space_saving.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <stdexcept>

namespace hhh {

uint32_t counters_for_epsilon(const Rational& epsilon) {
    if (epsilon.is_zero()) throw std::invalid_argument("epsilon must be positive");
    uint64_t m = (epsilon.den() + epsilon.num() - 1) / epsilon.num();
    if (m == 0 || m > UINT32_MAX) throw std::invalid_argument("epsilon out of range");
    return static_cast<uint32_t>(m);
}

SpaceSaving::SpaceSaving(UpdateMode mode, uint32_t capacity)
    : mode_(mode), capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("summary capacity must be >= 1");
    slots_.reserve(capacity_);
    index_.reserve(2 * static_cast<std::size_t>(capacity_));
    if (mode_ == UpdateMode::weighted) {
        heap_.reserve(capacity_);
        pos_.assign(capacity_, kNone);
    } else {
        // one spare bucket: moving a slot allocates its destination before
        // the emptied source bucket is released
        buckets_.resize(capacity_ + 1);
        free_buckets_.reserve(capacity_ + 1);
        for (uint32_t b = capacity_ + 1; b-- > 0;) free_buckets_.push_back(b);
    }
}

// ---------------------------------------------------------------- weighted

bool SpaceSaving::heap_less(uint32_t a, uint32_t b) const {
    const Slot& sa = slots_[a];
    const Slot& sb = slots_[b];
    if (sa.count != sb.count) return sa.count < sb.count;
    return sa.touched < sb.touched;
}

void SpaceSaving::heap_sift_up(std::size_t i) {
    while (i > 0) {
        std::size_t up = (i - 1) / 2;
        if (!heap_less(heap_[i], heap_[up])) break;
        std::swap(heap_[i], heap_[up]);
        pos_[heap_[i]] = static_cast<uint32_t>(i);
        pos_[heap_[up]] = static_cast<uint32_t>(up);
        i = up;
    }
}

void SpaceSaving::heap_sift_down(std::size_t i) {
    for (;;) {
        std::size_t l = 2 * i + 1, r = 2 * i + 2, best = i;
        if (l < heap_.size() && heap_less(heap_[l], heap_[best])) best = l;
        if (r < heap_.size() && heap_less(heap_[r], heap_[best])) best = r;
        if (best == i) break;
        std::swap(heap_[i], heap_[best]);
        pos_[heap_[i]] = static_cast<uint32_t>(i);
        pos_[heap_[best]] = static_cast<uint32_t>(best);
        i = best;
    }
}

// ----------------------------------------------------------------- unitary

uint32_t SpaceSaving::bucket_alloc(uint64_t count) {
    uint32_t b = free_buckets_.back();
    free_buckets_.pop_back();
    buckets_[b] = Bucket{count, kNone, kNone, kNone, kNone};
    return b;
}

void SpaceSaving::bucket_insert_after(uint32_t b, uint32_t after) {
    if (after == kNone) {  // new list head
        buckets_[b].next = bucket_head_;
        if (bucket_head_ != kNone) buckets_[bucket_head_].prev = b;
        bucket_head_ = b;
    } else {
        buckets_[b].prev = after;
        buckets_[b].next = buckets_[after].next;
        if (buckets_[after].next != kNone) buckets_[buckets_[after].next].prev = b;
        buckets_[after].next = b;
    }
}

void SpaceSaving::bucket_append_slot(uint32_t b, uint32_t s) {
    Slot& sl = slots_[s];
    sl.bucket = b;
    sl.prev = buckets_[b].tail;
    sl.next = kNone;
    if (buckets_[b].tail != kNone) slots_[buckets_[b].tail].next = s;
    buckets_[b].tail = s;
    if (buckets_[b].head == kNone) buckets_[b].head = s;
}

void SpaceSaving::bucket_detach_slot(uint32_t s) {
    Slot& sl = slots_[s];
    Bucket& b = buckets_[sl.bucket];
    if (sl.prev != kNone) slots_[sl.prev].next = sl.next;
    if (sl.next != kNone) slots_[sl.next].prev = sl.prev;
    if (b.head == s) b.head = sl.next;
    if (b.tail == s) b.tail = sl.prev;
    sl.prev = sl.next = kNone;
}

void SpaceSaving::bucket_release_if_empty(uint32_t b) {
    if (buckets_[b].head != kNone) return;
    if (buckets_[b].prev != kNone) buckets_[buckets_[b].prev].next = buckets_[b].next;
    if (buckets_[b].next != kNone) buckets_[buckets_[b].next].prev = buckets_[b].prev;
    if (bucket_head_ == b) bucket_head_ = buckets_[b].next;
    free_buckets_.push_back(b);
}

/// Moves a slot to the bucket holding `new_count`, creating it next to the
/// slot's current bucket if needed. Counts only ever move upward.
void SpaceSaving::slot_to_count(uint32_t s, uint64_t new_count) {
    uint32_t from = slots_[s].bucket;
    bucket_detach_slot(s);
    uint32_t dest;
    uint32_t next = buckets_[from].next;
    if (next != kNone && buckets_[next].count == new_count) {
        dest = next;
    } else {
        dest = bucket_alloc(new_count);
        bucket_insert_after(dest, from);
    }
    slots_[s].count = new_count;
    bucket_append_slot(dest, s);
    bucket_release_if_empty(from);
}

// ------------------------------------------------------------------ shared

void SpaceSaving::insert_fresh(const Prefix& item, uint64_t count) {
    uint32_t s = static_cast<uint32_t>(slots_.size());
    Slot sl;
    sl.item = item;
    sl.count = count;
    sl.error = 0;
    sl.touched = ++clock_;
    slots_.push_back(sl);
    index_.emplace(item, s);
    if (mode_ == UpdateMode::weighted) {
        heap_.push_back(s);
        pos_[s] = static_cast<uint32_t>(heap_.size() - 1);
        heap_sift_up(heap_.size() - 1);
    } else {
        uint32_t b;
        if (bucket_head_ != kNone && buckets_[bucket_head_].count == count) {
            b = bucket_head_;
        } else if (bucket_head_ != kNone && buckets_[bucket_head_].count < count) {
            // only reachable via from_counters(), which inserts sorted
            uint32_t after = bucket_head_;
            while (buckets_[after].next != kNone && buckets_[buckets_[after].next].count <= count) {
                after = buckets_[after].next;
            }
            if (buckets_[after].count == count) {
                b = after;
            } else {
                b = bucket_alloc(count);
                bucket_insert_after(b, after);
            }
        } else {
            b = bucket_alloc(count);
            bucket_insert_after(b, kNone);
        }
        bucket_append_slot(b, s);
    }
}

void SpaceSaving::check_invariants() const {
    assert(slots_.size() <= capacity_);
    assert(static_cast<int64_t>(sum_counts_) - static_cast<int64_t>(total_) == base_excess_);
#ifndef NDEBUG
    for (const Slot& s : slots_) assert(s.error <= s.count);
#endif
}

void SpaceSaving::update(const Prefix& item, uint64_t count) {
    if (count == 0) throw std::invalid_argument("update count must be >= 1");
    if (mode_ == UpdateMode::unitary) {
        if (count != 1) {
            throw std::logic_error("unitary summary only accepts increments of 1");
        }
        update_unitary(item);
        return;
    }
    total_ += count;
    sum_counts_ += count;
    auto it = index_.find(item);
    if (it != index_.end()) {
        Slot& sl = slots_[it->second];
        sl.count += count;
        sl.touched = ++clock_;
        heap_sift_down(pos_[it->second]);
    } else if (slots_.size() < capacity_) {
        insert_fresh(item, count);
    } else {
        uint32_t s = heap_[0];  // minimum (count, recency)
        Slot& sl = slots_[s];
        uint64_t evicted = sl.count;
        index_.erase(sl.item);
        sl.item = item;
        sl.count = evicted + count;
        sl.error = evicted;
        sl.touched = ++clock_;
        index_.emplace(item, s);
        heap_sift_down(0);
    }
    check_invariants();
}

void SpaceSaving::update_unitary(const Prefix& item) {
    if (mode_ != UpdateMode::unitary) {
        throw std::logic_error("update_unitary called on a weighted summary");
    }
    total_ += 1;
    sum_counts_ += 1;
    auto it = index_.find(item);
    if (it != index_.end()) {
        slot_to_count(it->second, slots_[it->second].count + 1);
    } else if (slots_.size() < capacity_) {
        insert_fresh(item, 1);
    } else {
        // head of the minimum bucket is the least recently updated minimum
        uint32_t s = buckets_[bucket_head_].head;
        uint64_t evicted = buckets_[bucket_head_].count;
        Slot& sl = slots_[s];
        index_.erase(sl.item);
        sl.item = item;
        sl.error = evicted;
        index_.emplace(item, s);
        slot_to_count(s, evicted + 1);
    }
    check_invariants();
}

Estimate SpaceSaving::estimate(const Prefix& item) const {
    auto it = index_.find(item);
    if (it != index_.end()) {
        const Slot& sl = slots_[it->second];
        return Estimate{sl.count - sl.error, sl.count};
    }
    return Estimate{0, min_count()};
}

uint64_t SpaceSaving::min_count() const {
    if (slots_.size() < capacity_) return 0;
    if (mode_ == UpdateMode::weighted) return slots_[heap_[0]].count;
    return buckets_[bucket_head_].count;
}

std::vector<CounterSnapshot> SpaceSaving::counters() const {
    std::vector<CounterSnapshot> out;
    out.reserve(slots_.size());
    for (const Slot& s : slots_) out.push_back(CounterSnapshot{s.item, s.count, s.error});
    return out;
}

std::vector<CounterSnapshot> SpaceSaving::sorted_counters() const {
    auto out = counters();
    std::sort(out.begin(), out.end(),
              [](const CounterSnapshot& a, const CounterSnapshot& b) {
                  return prefix_less(a.item, b.item);
              });
    return out;
}

// ------------------------------------------------------------ serialization

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct Reader {
    std::span<const uint8_t> in;
    std::size_t pos = 0;

    uint8_t u8() {
        if (pos + 1 > in.size()) throw std::invalid_argument("truncated summary blob");
        return in[pos++];
    }
    uint32_t u32() {
        if (pos + 4 > in.size()) throw std::invalid_argument("truncated summary blob");
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(in[pos++]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        if (pos + 8 > in.size()) throw std::invalid_argument("truncated summary blob");
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(in[pos++]) << (8 * i);
        return v;
    }
};

}  // namespace

void SpaceSaving::serialize(std::vector<uint8_t>& out, std::size_t dims) const {
    out.push_back(static_cast<uint8_t>(mode_));
    put_u32(out, capacity_);
    put_u64(out, total_);
    auto snap = sorted_counters();
    put_u32(out, static_cast<uint32_t>(snap.size()));
    for (const CounterSnapshot& c : snap) {
        for (std::size_t i = 0; i < dims; ++i) out.push_back(c.item.label.entry[i]);
        for (std::size_t i = 0; i < dims; ++i) put_u32(out, c.item.value[i]);
        put_u64(out, c.count);
        put_u64(out, c.error);
    }
}

SpaceSaving SpaceSaving::deserialize(std::span<const uint8_t> in, std::size_t dims,
                                     std::size_t* consumed) {
    if (dims == 0 || dims > kMaxDims) throw std::invalid_argument("bad dimension count");
    Reader r{in};
    uint8_t mode_byte = r.u8();
    if (mode_byte > 1) throw std::invalid_argument("bad summary mode byte");
    UpdateMode mode = static_cast<UpdateMode>(mode_byte);
    uint32_t capacity = r.u32();
    uint64_t total = r.u64();
    uint32_t n = r.u32();
    std::vector<CounterSnapshot> counters;
    counters.reserve(n);
    for (uint32_t k = 0; k < n; ++k) {
        CounterSnapshot c;
        for (std::size_t i = 0; i < dims; ++i) c.item.label.entry[i] = r.u8();
        for (std::size_t i = 0; i < dims; ++i) c.item.value[i] = r.u32();
        c.count = r.u64();
        c.error = r.u64();
        counters.push_back(c);
    }
    if (consumed) *consumed = r.pos;
    return from_counters(mode, capacity, total, std::move(counters));
}

SpaceSaving SpaceSaving::from_counters(UpdateMode mode, uint32_t capacity, uint64_t total,
                                       std::vector<CounterSnapshot> counters) {
    if (counters.size() > capacity) throw std::invalid_argument("more counters than capacity");
    SpaceSaving s(mode, capacity);
    if (mode == UpdateMode::unitary) {
        // stable: preserves given order within equal counts, which becomes
        // the eviction (least recently updated) order
        std::stable_sort(counters.begin(), counters.end(),
                         [](const CounterSnapshot& a, const CounterSnapshot& b) {
                             return a.count < b.count;
                         });
    }
    for (const CounterSnapshot& c : counters) {
        if (c.error > c.count) throw std::invalid_argument("counter error exceeds count");
        if (s.index_.count(c.item)) throw std::invalid_argument("duplicate counter item");
        s.insert_fresh(c.item, c.count);
        s.slots_.back().error = c.error;
        s.sum_counts_ += c.count;
    }
    s.total_ = total;
    // merged summaries can over- or under-count relative to total once
    // retention has dropped items; record the offset for the debug invariant
    s.base_excess_ = static_cast<int64_t>(s.sum_counts_) - static_cast<int64_t>(total);
    return s;
}

SpaceSaving SpaceSaving::merge(const std::vector<const SpaceSaving*>& inputs, uint32_t m_out) {
    if (inputs.empty()) throw std::invalid_argument("merge requires at least one summary");
    if (m_out == 0) throw std::invalid_argument("merge capacity must be >= 1");
    UpdateMode mode = inputs[0]->mode();
    uint64_t total = 0;
    for (const SpaceSaving* s : inputs) {
        if (s == nullptr) throw std::invalid_argument("null summary in merge");
        if (s->mode() != mode) throw std::invalid_argument("merge inputs must share mode");
        total += s->total();
    }

    struct Bound {
        Prefix item;
        uint64_t lower = 0;
        uint64_t upper = 0;
    };
    std::unordered_map<Prefix, std::size_t, PrefixHash> where;
    std::vector<Bound> bounds;
    for (const SpaceSaving* s : inputs) {
        for (const Slot& sl : s->slots_) {
            if (where.emplace(sl.item, bounds.size()).second) {
                bounds.push_back(Bound{sl.item, 0, 0});
            }
        }
    }
    for (Bound& b : bounds) {
        for (const SpaceSaving* s : inputs) {
            Estimate e = s->estimate(b.item);
            b.lower += e.f_min;
            b.upper += e.f_max;
        }
    }
    std::sort(bounds.begin(), bounds.end(), [](const Bound& a, const Bound& b) {
        if (a.lower != b.lower) return a.lower > b.lower;
        return prefix_less(a.item, b.item);
    });
    if (bounds.size() > m_out) bounds.resize(m_out);

    std::vector<CounterSnapshot> counters;
    counters.reserve(bounds.size());
    for (const Bound& b : bounds) {
        counters.push_back(CounterSnapshot{b.item, b.upper, b.upper - b.lower});
    }
    return from_counters(mode, m_out, total, std::move(counters));
}

}  // namespace hhh
