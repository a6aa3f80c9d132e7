#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hhh {

/// Hard cap on the number of dimensions; keeps prefixes inline and hashable
/// without heap traffic on the per-packet path.
inline constexpr std::size_t kMaxDims = 4;

/// One dimension of the hierarchy: `height` generalization steps of
/// `step_bits` each. A fully specified value occupies height*step_bits bits
/// (at most 32). IPv4 bytewise is {4, 8}; bitwise is {32, 1}.
struct DimensionSpec {
    uint32_t height = 0;
    uint32_t step_bits = 0;

    uint32_t width_bits() const { return height * step_bits; }
    friend bool operator==(const DimensionSpec&, const DimensionSpec&) = default;
};

/// Lattice node identifier: entry[i] is the number of retained steps in
/// dimension i (0 = fully general, height = fully specified).
struct Label {
    std::array<uint8_t, kMaxDims> entry{};
    friend bool operator==(const Label&, const Label&) = default;
};

/// A (possibly generalized) element. `value[i]` holds the retained bits of
/// dimension i left-aligned within the dimension width, with wildcarded bits
/// zero, so equality of prefixes is plain field equality.
struct Prefix {
    std::array<uint32_t, kMaxDims> value{};
    Label label;
    friend bool operator==(const Prefix&, const Prefix&) = default;
};

struct PrefixHash {
    std::size_t operator()(const Prefix& p) const;
};

/// Total order used everywhere a deterministic iteration order is needed:
/// label entries lexicographically, then values.
bool prefix_less(const Prefix& a, const Prefix& b);

class HierarchySpec {
public:
    explicit HierarchySpec(std::vector<DimensionSpec> dims);

    static HierarchySpec ipv4_bytewise(std::size_t dims);
    static HierarchySpec ipv4_bitwise(std::size_t dims);

    std::size_t dimensions() const { return dims_.size(); }
    const DimensionSpec& dim(std::size_t i) const { return dims_[i]; }
    const std::vector<DimensionSpec>& dims() const { return dims_; }

    /// Number of lattice nodes H = prod(h_i + 1).
    uint64_t node_count() const { return node_count_; }
    /// Deepest level L = sum(h_i).
    uint32_t deepest_level() const { return deepest_level_; }

    uint32_t level(const Label& l) const;
    bool valid_label(const Label& l) const;

    /// Mixed-radix index of a label in [0, node_count); row-major over
    /// dimension entries. Deterministic node enumeration order.
    uint64_t node_index(const Label& l) const;
    Label label_at(uint64_t index) const;

    /// Node indices grouped by level, levels 0..L, each list ascending.
    const std::vector<std::vector<uint64_t>>& nodes_by_level() const { return nodes_by_level_; }

    Label root_label() const { return Label{}; }
    Label full_label() const;

    /// Text form "4x8,4x8" (height x step_bits per dimension).
    std::string to_string() const;
    static HierarchySpec from_string(std::string_view text);

    friend bool operator==(const HierarchySpec& a, const HierarchySpec& b) {
        return a.dims_ == b.dims_;
    }

private:
    std::vector<DimensionSpec> dims_;
    uint64_t node_count_ = 1;
    uint32_t deepest_level_ = 0;
    std::vector<std::vector<uint64_t>> nodes_by_level_;
};

/// Builds a fully specified element; validates one value per dimension and
/// that each value fits its dimension width.
Prefix make_element(const HierarchySpec& spec, std::span<const uint32_t> values);

/// Masks a fully specified (or more specific) prefix down to `label`.
/// `label` must be a generalization of p.label (entrywise <=).
Prefix generalize_to(const HierarchySpec& spec, const Prefix& p, const Label& label);

/// One generalization step in dimension `dim` (0-based); absent when the
/// dimension is already fully general.
std::optional<Prefix> parent(const HierarchySpec& spec, const Prefix& p, std::size_t dim);

/// All H generalizations of a fully specified element (including itself and
/// the root), in node-index order.
std::vector<Prefix> generalizations(const HierarchySpec& spec, const Prefix& element);

/// p <= q in the generalization order: q retains a (possibly empty) prefix of
/// what p retains, in every dimension. Reflexive.
bool is_descendant(const HierarchySpec& spec, const Prefix& p, const Prefix& q);

/// Greatest lower bound: the componentwise more-specific prefix when the two
/// are comparable in every dimension; nullopt is the trivial item (no common
/// descendant, count 0 everywhere).
std::optional<Prefix> glb(const HierarchySpec& spec, const Prefix& a, const Prefix& b);

/// Largest antichain size A = 1 + min(h1, h2); only established for d = 2.
uint64_t max_antichain_size(const HierarchySpec& spec);

/// Canonical text: bytewise dimensions as dotted quads with "*" for
/// wildcarded bytes, anything else as "value/retained_bits". Dimensions
/// joined by "," inside parentheses when d >= 2.
std::string to_string(const HierarchySpec& spec, const Prefix& p);
std::string to_string(const HierarchySpec& spec, const Label& l);

/// Parses the canonical text form back into a prefix.
Prefix parse_prefix(const HierarchySpec& spec, std::string_view text);

/// Parses a fully specified element for one dimension of a trace record:
/// dotted quad for bytewise dimensions, decimal integer otherwise.
uint32_t parse_dimension_value(const HierarchySpec& spec, std::size_t dim, std::string_view text);

}  // namespace hhh
