#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hhh/hhh.hpp"

namespace hhh {

/// Combines states built independently over k distributed substreams into
/// one state over the concatenation: per lattice node, the k node summaries
/// merge into a single summary with the input per-node capacity; N adds up.
/// All inputs must share the hierarchy, epsilon, capacity and mode. The
/// merge is one k-way pass (not a pairwise fold) and is order-insensitive
/// at the estimate level. Output procedures run unchanged on the result.
///
/// Per-node merges are independent; inputs are immutable.
HhhState merge_states(const std::vector<const HhhState*>& states);

/// State bundle file format: magic "HHHSTAT1", u32 manifest length, manifest
/// JSON (spec, epsilon, mode, capacity, total, node count), then one summary
/// blob per lattice node in node-index order.
std::vector<uint8_t> serialize_state(const HhhState& state);
HhhState deserialize_state(std::span<const uint8_t> bytes);

void write_state_file(const std::string& path, const HhhState& state);
HhhState read_state_file(const std::string& path);

}  // namespace hhh
