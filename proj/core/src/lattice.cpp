#include "hhh/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace hhh {

namespace {

uint32_t dim_mask(const DimensionSpec& d, uint32_t retained_steps) {
    if (retained_steps == 0) return 0;
    uint32_t w = d.width_bits();
    uint32_t keep = retained_steps * d.step_bits;
    uint64_t full = (w == 64) ? ~0ull : ((1ull << w) - 1);
    return static_cast<uint32_t>((full << (w - keep)) & full);
}

uint32_t dim_full_mask(const DimensionSpec& d) { return dim_mask(d, d.height); }

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::size_t PrefixHash::operator()(const Prefix& p) const {
    // FNV-1a over values and label entries; deterministic across platforms.
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (std::size_t i = 0; i < kMaxDims; ++i) {
        uint32_t v = p.value[i];
        mix(v & 0xff);
        mix((v >> 8) & 0xff);
        mix((v >> 16) & 0xff);
        mix((v >> 24) & 0xff);
        mix(p.label.entry[i]);
    }
    return static_cast<std::size_t>(h);
}

bool prefix_less(const Prefix& a, const Prefix& b) {
    if (a.label.entry != b.label.entry) return a.label.entry < b.label.entry;
    return a.value < b.value;
}

HierarchySpec::HierarchySpec(std::vector<DimensionSpec> dims) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > kMaxDims) {
        bad("hierarchy must have between 1 and " + std::to_string(kMaxDims) + " dimensions");
    }
    for (const auto& d : dims_) {
        if (d.height < 1) bad("dimension height must be >= 1");
        if (d.step_bits < 1 || d.width_bits() > 32) {
            bad("dimension width height*step_bits must be in [1, 32]");
        }
        node_count_ *= d.height + 1;
        deepest_level_ += d.height;
    }
    nodes_by_level_.assign(deepest_level_ + 1, {});
    for (uint64_t i = 0; i < node_count_; ++i) {
        nodes_by_level_[level(label_at(i))].push_back(i);
    }
}

HierarchySpec HierarchySpec::ipv4_bytewise(std::size_t dims) {
    return HierarchySpec(std::vector<DimensionSpec>(dims, DimensionSpec{4, 8}));
}

HierarchySpec HierarchySpec::ipv4_bitwise(std::size_t dims) {
    return HierarchySpec(std::vector<DimensionSpec>(dims, DimensionSpec{32, 1}));
}

uint32_t HierarchySpec::level(const Label& l) const {
    uint32_t s = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) s += l.entry[i];
    return s;
}

bool HierarchySpec::valid_label(const Label& l) const {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (l.entry[i] > dims_[i].height) return false;
    }
    for (std::size_t i = dims_.size(); i < kMaxDims; ++i) {
        if (l.entry[i] != 0) return false;
    }
    return true;
}

uint64_t HierarchySpec::node_index(const Label& l) const {
    uint64_t idx = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        idx = idx * (dims_[i].height + 1) + l.entry[i];
    }
    return idx;
}

Label HierarchySpec::label_at(uint64_t index) const {
    Label l;
    for (std::size_t i = dims_.size(); i-- > 0;) {
        uint64_t radix = dims_[i].height + 1;
        l.entry[i] = static_cast<uint8_t>(index % radix);
        index /= radix;
    }
    return l;
}

Label HierarchySpec::full_label() const {
    Label l;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        l.entry[i] = static_cast<uint8_t>(dims_[i].height);
    }
    return l;
}

std::string HierarchySpec::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(dims_[i].height) + "x" + std::to_string(dims_[i].step_bits);
    }
    return s;
}

HierarchySpec HierarchySpec::from_string(std::string_view text) {
    std::vector<DimensionSpec> dims;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string_view part = text.substr(start, comma == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : comma - start);
        auto x = part.find('x');
        if (x == std::string_view::npos) bad("malformed hierarchy spec: " + std::string(text));
        DimensionSpec d;
        auto r1 = std::from_chars(part.data(), part.data() + x, d.height);
        auto r2 = std::from_chars(part.data() + x + 1, part.data() + part.size(), d.step_bits);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != part.data() + part.size()) {
            bad("malformed hierarchy spec: " + std::string(text));
        }
        dims.push_back(d);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return HierarchySpec(std::move(dims));
}

Prefix make_element(const HierarchySpec& spec, std::span<const uint32_t> values) {
    if (values.size() != spec.dimensions()) bad("element arity does not match hierarchy");
    Prefix p;
    for (std::size_t i = 0; i < values.size(); ++i) {
        uint32_t full = dim_full_mask(spec.dim(i));
        if ((values[i] & ~full) != 0) {
            bad("value " + std::to_string(values[i]) + " exceeds dimension width");
        }
        p.value[i] = values[i];
        p.label.entry[i] = static_cast<uint8_t>(spec.dim(i).height);
    }
    return p;
}

Prefix generalize_to(const HierarchySpec& spec, const Prefix& p, const Label& label) {
    Prefix out;
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        out.label.entry[i] = label.entry[i];
        out.value[i] = p.value[i] & dim_mask(spec.dim(i), label.entry[i]);
    }
    return out;
}

std::optional<Prefix> parent(const HierarchySpec& spec, const Prefix& p, std::size_t dim) {
    if (dim >= spec.dimensions()) bad("dimension index out of range");
    if (p.label.entry[dim] == 0) return std::nullopt;
    Prefix out = p;
    out.label.entry[dim] -= 1;
    out.value[dim] &= dim_mask(spec.dim(dim), out.label.entry[dim]);
    return out;
}

std::vector<Prefix> generalizations(const HierarchySpec& spec, const Prefix& element) {
    if (element.label != spec.full_label()) bad("generalizations requires a fully specified element");
    std::vector<Prefix> out;
    out.reserve(spec.node_count());
    for (uint64_t i = 0; i < spec.node_count(); ++i) {
        out.push_back(generalize_to(spec, element, spec.label_at(i)));
    }
    return out;
}

bool is_descendant(const HierarchySpec& spec, const Prefix& p, const Prefix& q) {
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        if (q.label.entry[i] > p.label.entry[i]) return false;
        uint32_t m = dim_mask(spec.dim(i), q.label.entry[i]);
        if ((p.value[i] & m) != q.value[i]) return false;
    }
    return true;
}

std::optional<Prefix> glb(const HierarchySpec& spec, const Prefix& a, const Prefix& b) {
    Prefix out;
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        // Comparable in dimension i iff the shorter retained value is a
        // prefix of the longer one; otherwise the subtrees are disjoint.
        const Prefix& fine = (a.label.entry[i] >= b.label.entry[i]) ? a : b;
        const Prefix& coarse = (a.label.entry[i] >= b.label.entry[i]) ? b : a;
        uint32_t m = dim_mask(spec.dim(i), coarse.label.entry[i]);
        if ((fine.value[i] & m) != coarse.value[i]) return std::nullopt;
        out.label.entry[i] = fine.label.entry[i];
        out.value[i] = fine.value[i];
    }
    return out;
}

uint64_t max_antichain_size(const HierarchySpec& spec) {
    if (spec.dimensions() != 2) {
        throw std::domain_error("antichain bound is only established for two dimensions");
    }
    return 1 + std::min<uint64_t>(spec.dim(0).height, spec.dim(1).height);
}

namespace {

bool bytewise(const DimensionSpec& d) { return d.height == 4 && d.step_bits == 8; }

std::string dim_to_string(const DimensionSpec& d, uint32_t value, uint32_t retained) {
    if (bytewise(d)) {
        std::string s;
        for (int b = 0; b < 4; ++b) {
            if (b) s += '.';
            if (static_cast<uint32_t>(b) < retained) {
                s += std::to_string((value >> (24 - 8 * b)) & 0xff);
            } else {
                s += '*';
            }
        }
        return s;
    }
    // Right-align the retained bits for readability: "v/len" where len is the
    // number of retained bits and v the retained bits as an integer.
    uint32_t keep = retained * d.step_bits;
    uint32_t v = keep == 0 ? 0 : value >> (d.width_bits() - keep);
    return std::to_string(v) + "/" + std::to_string(keep);
}

uint32_t parse_dotted_quad(std::string_view text, uint32_t* retained) {
    uint32_t value = 0;
    uint32_t steps = 0;
    bool saw_star = false;
    std::size_t start = 0;
    for (int b = 0; b < 4; ++b) {
        auto dot = text.find('.', start);
        bool last = (b == 3);
        if (last != (dot == std::string_view::npos)) bad("malformed IPv4: " + std::string(text));
        std::string_view part = text.substr(start, last ? std::string_view::npos : dot - start);
        if (part == "*") {
            saw_star = true;
        } else {
            if (saw_star) bad("malformed IPv4 (value after wildcard): " + std::string(text));
            uint32_t octet = 0;
            auto r = std::from_chars(part.data(), part.data() + part.size(), octet);
            if (r.ec != std::errc() || r.ptr != part.data() + part.size() || octet > 255) {
                bad("malformed IPv4: " + std::string(text));
            }
            value |= octet << (24 - 8 * b);
            ++steps;
        }
        start = last ? text.size() : dot + 1;
    }
    if (retained) *retained = steps;
    return value;
}

std::pair<uint32_t, uint32_t> parse_dim(const HierarchySpec& spec, std::size_t dim,
                                        std::string_view text) {
    const DimensionSpec& d = spec.dim(dim);
    if (bytewise(d)) {
        uint32_t retained = 0;
        uint32_t value = parse_dotted_quad(text, &retained);
        return {value, retained};
    }
    auto slash = text.find('/');
    if (slash == std::string_view::npos) bad("expected value/len: " + std::string(text));
    uint32_t v = 0, len = 0;
    auto r1 = std::from_chars(text.data(), text.data() + slash, v);
    auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), len);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != text.data() + text.size()) {
        bad("malformed prefix: " + std::string(text));
    }
    if (len % d.step_bits != 0 || len > d.width_bits()) {
        bad("retained bits not a multiple of the step: " + std::string(text));
    }
    if (len < 32 && (v >> len) != 0) bad("value exceeds retained bits: " + std::string(text));
    uint32_t value = len == 0 ? 0 : v << (d.width_bits() - len);
    return {value, len / d.step_bits};
}

}  // namespace

std::string to_string(const HierarchySpec& spec, const Prefix& p) {
    std::string s;
    bool wrap = spec.dimensions() >= 2;
    if (wrap) s += '(';
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        if (i) s += ',';
        s += dim_to_string(spec.dim(i), p.value[i], p.label.entry[i]);
    }
    if (wrap) s += ')';
    return s;
}

std::string to_string(const HierarchySpec& spec, const Label& l) {
    std::string s = "(";
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        if (i) s += ',';
        s += std::to_string(l.entry[i]);
    }
    s += ')';
    return s;
}

Prefix parse_prefix(const HierarchySpec& spec, std::string_view text) {
    if (spec.dimensions() >= 2) {
        if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
            bad("expected parenthesized tuple: " + std::string(text));
        }
        text = text.substr(1, text.size() - 2);
    }
    Prefix p;
    std::size_t start = 0;
    for (std::size_t i = 0; i < spec.dimensions(); ++i) {
        bool last = (i + 1 == spec.dimensions());
        auto comma = text.find(',', start);
        if (last != (comma == std::string_view::npos)) bad("prefix arity mismatch: " + std::string(text));
        std::string_view part = text.substr(start, last ? std::string_view::npos : comma - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        auto [value, retained] = parse_dim(spec, i, part);
        p.value[i] = value;
        p.label.entry[i] = static_cast<uint8_t>(retained);
        start = last ? text.size() : comma + 1;
    }
    return generalize_to(spec, p, p.label);  // canonicalize masked bits
}

uint32_t parse_dimension_value(const HierarchySpec& spec, std::size_t dim, std::string_view text) {
    const DimensionSpec& d = spec.dim(dim);
    if (bytewise(d)) {
        uint32_t retained = 0;
        uint32_t v = parse_dotted_quad(text, &retained);
        if (retained != 4) bad("trace element must be fully specified: " + std::string(text));
        return v;
    }
    uint32_t v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
        bad("malformed value: " + std::string(text));
    }
    if ((v & ~dim_mask(d, d.height)) != 0) bad("value exceeds dimension width: " + std::string(text));
    return v;
}

}  // namespace hhh
