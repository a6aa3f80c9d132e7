#include "hhh/tcam.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hhh {

namespace {

uint32_t bits_for(uint64_t instances) {
    return instances <= 1 ? 1 : std::bit_width(instances - 1);
}

/// Tags in per-packet search order: deepest level first, ascending node
/// index within a level (the root gets the last tag).
std::vector<uint64_t> tag_to_node(const HierarchySpec& spec) {
    std::vector<uint64_t> order;
    order.reserve(spec.node_count());
    for (uint32_t level = spec.deepest_level() + 1; level-- > 0;) {
        for (uint64_t node : spec.nodes_by_level()[level]) order.push_back(node);
    }
    return order;
}

struct EventCosts {
    uint64_t hit_r, hit_w, ins_w, ev_r, ev_w;
};

}  // namespace

TcamCostModel TcamCostModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TcamCostModel m;
    auto pick = [&j](const char* key, uint32_t& out) {
        if (j.contains(key)) out = j.at(key).get<uint32_t>();
    };
    pick("search", m.search);
    pick("hit_read", m.hit_read);
    pick("hit_write", m.hit_write);
    pick("insert_write", m.insert_write);
    pick("evict_read", m.evict_read);
    pick("evict_write", m.evict_write);
    pick("min_maintenance_read", m.min_maintenance_read);
    if (j.contains("include_root")) m.include_root = j.at("include_root").get<bool>();
    return m;
}

std::string TcamCostModel::to_json() const {
    nlohmann::ordered_json j;
    j["search"] = search;
    j["hit_read"] = hit_read;
    j["hit_write"] = hit_write;
    j["insert_write"] = insert_write;
    j["evict_read"] = evict_read;
    j["evict_write"] = evict_write;
    j["min_maintenance_read"] = min_maintenance_read;
    j["include_root"] = include_root;
    return j.dump();
}

TcamOpTotals TcamOpCounts::totals(bool with_root) const {
    TcamOpTotals t;
    t.packets = packets;
    for (uint32_t tag = 0; tag < per_instance.size(); ++tag) {
        if (!with_root && tag == root_tag) continue;
        t.reads += per_instance[tag].reads;
        t.writes += per_instance[tag].writes;
        t.searches += per_instance[tag].searches;
    }
    return t;
}

namespace {

/// Classifies the imminent update against `summary`, charges ops to `stats`,
/// then applies the update. Returns the ops charged (without the search).
uint64_t charge_update(SpaceSaving& summary, const Prefix& key, const TcamCostModel& cost,
                       TcamInstanceStats& stats) {
    uint64_t ops = 0;
    if (summary.tracks(key)) {
        stats.hits += 1;
        stats.reads += cost.hit_read;
        stats.writes += cost.hit_write;
        ops = cost.hit_read + cost.hit_write;
    } else if (!summary.full()) {
        stats.misses += 1;
        stats.writes += cost.insert_write;
        ops = cost.insert_write;
    } else {
        stats.misses += 1;
        stats.evictions += 1;
        stats.reads += cost.evict_read + cost.min_maintenance_read;
        stats.writes += cost.evict_write;
        ops = cost.evict_read + cost.evict_write + cost.min_maintenance_read;
    }
    summary.update_unitary(key);
    return ops;
}

}  // namespace

TcamRunResult tcam_run(std::span<const TraceRecord> stream, const HierarchySpec& spec,
                       const Rational& epsilon, const TcamCostModel& cost) {
    std::vector<uint64_t> order = tag_to_node(spec);

    // The simulator owns its summaries; the per-key update semantics are the
    // software unitary path, so the assembled result state is bit-equal to a
    // software run over the same stream.
    std::vector<SpaceSaving> summaries;
    summaries.reserve(spec.node_count());
    for (uint64_t node = 0; node < spec.node_count(); ++node) {
        summaries.emplace_back(UpdateMode::unitary, counters_for_epsilon(epsilon));
    }

    TcamOpCounts ops;
    ops.tag_bits = bits_for(spec.node_count());
    ops.per_instance.assign(spec.node_count(), TcamInstanceStats{});
    ops.instance_labels.reserve(spec.node_count());
    for (uint32_t tag = 0; tag < order.size(); ++tag) {
        ops.instance_labels.push_back(spec.label_at(order[tag]));
        if (order[tag] == spec.node_index(spec.root_label())) ops.root_tag = tag;
    }

    uint64_t total = 0;
    for (const TraceRecord& rec : stream) {
        if (rec.count != 1) {
            throw std::invalid_argument("TCAM simulation requires a unitary stream");
        }
        Prefix element = record_element(spec, rec);
        ops.packets += 1;
        total += 1;
        for (uint32_t tag = 0; tag < order.size(); ++tag) {
            uint64_t node = order[tag];
            TcamInstanceStats& stats = ops.per_instance[tag];
            stats.searches += cost.search;
            Prefix key = generalize_to(spec, element, spec.label_at(node));
            uint64_t packet_ops =
                cost.search + charge_update(summaries[node], key, cost, stats);
            ops.max_instance_packet_ops = std::max(ops.max_instance_packet_ops, packet_ops);
        }
    }

    return TcamRunResult{
        std::move(ops),
        HhhState::assemble(spec, epsilon, UpdateMode::unitary, std::move(summaries), total)};
}

TcamSingleRunResult tcam_single_instance_run(std::span<const TraceRecord> stream,
                                             const HierarchySpec& spec, const Rational& epsilon,
                                             const TcamCostModel& cost) {
    uint64_t capacity = spec.node_count() * uint64_t(counters_for_epsilon(epsilon));
    if (capacity > UINT32_MAX) throw std::invalid_argument("single-instance capacity too large");
    SpaceSaving summary(UpdateMode::unitary, static_cast<uint32_t>(capacity));
    std::vector<uint64_t> order = tag_to_node(spec);

    TcamOpCounts ops;
    ops.tag_bits = bits_for(spec.node_count());
    ops.per_instance.assign(spec.node_count(), TcamInstanceStats{});
    ops.instance_labels.reserve(spec.node_count());
    for (uint32_t tag = 0; tag < order.size(); ++tag) {
        ops.instance_labels.push_back(spec.label_at(order[tag]));
        if (order[tag] == spec.node_index(spec.root_label())) ops.root_tag = tag;
    }

    for (const TraceRecord& rec : stream) {
        if (rec.count != 1) {
            throw std::invalid_argument("TCAM simulation requires a unitary stream");
        }
        Prefix element = record_element(spec, rec);
        ops.packets += 1;
        for (uint32_t tag = 0; tag < order.size(); ++tag) {
            TcamInstanceStats& stats = ops.per_instance[tag];
            stats.searches += cost.search;
            Prefix key = generalize_to(spec, element, spec.label_at(order[tag]));
            uint64_t packet_ops = cost.search + charge_update(summary, key, cost, stats);
            ops.max_instance_packet_ops = std::max(ops.max_instance_packet_ops, packet_ops);
        }
    }
    return TcamSingleRunResult{std::move(ops), std::move(summary)};
}

std::string ternary_key(const HierarchySpec& spec, const Prefix& p, uint32_t tag,
                        uint32_t tag_bits) {
    std::string key;
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        const DimensionSpec& d = spec.dim(i);
        uint32_t width = d.width_bits();
        uint32_t retained = p.label.entry[i] * d.step_bits;
        for (uint32_t b = 0; b < width; ++b) {
            if (b < retained) {
                key += ((p.value[i] >> (width - 1 - b)) & 1) ? '1' : '0';
            } else {
                key += '*';
            }
        }
    }
    key += '|';
    for (uint32_t b = tag_bits; b-- > 0;) {
        key += ((tag >> b) & 1) ? '1' : '0';
    }
    return key;
}

std::string to_json(const TcamOpCounts& ops, const TcamCostModel& cost) {
    nlohmann::ordered_json j;
    j["packets"] = ops.packets;
    j["tag_bits"] = ops.tag_bits;
    j["instances"] = ops.per_instance.size();
    j["max_instance_packet_ops"] = ops.max_instance_packet_ops;
    j["cost_model"] = nlohmann::ordered_json::parse(cost.to_json());
    auto emit_totals = [&ops](bool with_root) {
        TcamOpTotals t = ops.totals(with_root);
        nlohmann::ordered_json block;
        block["reads"] = t.reads;
        block["writes"] = t.writes;
        block["searches"] = t.searches;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", t.ops_per_packet());
        block["ops_per_packet"] = std::string(buf);
        return block;
    };
    j["root_included"] = emit_totals(true);
    j["root_excluded"] = emit_totals(false);
    j["headline"] = cost.include_root ? "root_included" : "root_excluded";
    nlohmann::ordered_json inst = nlohmann::ordered_json::array();
    for (uint32_t tag = 0; tag < ops.per_instance.size(); ++tag) {
        const TcamInstanceStats& s = ops.per_instance[tag];
        nlohmann::ordered_json row;
        row["tag"] = tag;
        row["searches"] = s.searches;
        row["reads"] = s.reads;
        row["writes"] = s.writes;
        row["hits"] = s.hits;
        row["misses"] = s.misses;
        row["evictions"] = s.evictions;
        inst.push_back(row);
    }
    j["per_instance"] = inst;
    return j.dump(2) + "\n";
}

}  // namespace hhh
