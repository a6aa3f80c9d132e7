#include "hhh/merge.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hhh {

HhhState merge_states(const std::vector<const HhhState*>& states) {
    if (states.empty()) throw std::invalid_argument("merge requires at least one state");
    const HhhState& first = *states[0];
    uint64_t total = 0;
    for (const HhhState* s : states) {
        if (s == nullptr) throw std::invalid_argument("null state in merge");
        if (!(s->spec() == first.spec())) {
            throw std::invalid_argument("merge inputs must share the hierarchy");
        }
        if (!(s->epsilon() == first.epsilon()) || s->node_capacity() != first.node_capacity()) {
            throw std::invalid_argument("merge inputs must share epsilon and capacity");
        }
        if (s->mode() != first.mode()) {
            throw std::invalid_argument("merge inputs must share the update mode");
        }
        total += s->total();
    }

    std::vector<SpaceSaving> merged;
    merged.reserve(first.spec().node_count());
    std::vector<const SpaceSaving*> node_inputs(states.size());
    for (uint64_t node = 0; node < first.spec().node_count(); ++node) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            node_inputs[k] = &states[k]->summary(node);
        }
        merged.push_back(SpaceSaving::merge(node_inputs, first.node_capacity()));
    }
    return HhhState::assemble(first.spec(), first.epsilon(), first.mode(), std::move(merged),
                              total);
}

namespace {

constexpr char kMagic[8] = {'H', 'H', 'H', 'S', 'T', 'A', 'T', '1'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(std::span<const uint8_t> in, std::size_t pos) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(in[pos + i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<uint8_t> serialize_state(const HhhState& state) {
    nlohmann::ordered_json manifest;
    manifest["format"] = "hhh-state/1";
    manifest["spec"] = state.spec().to_string();
    manifest["epsilon"] = state.epsilon().str();
    manifest["mode"] = state.mode() == UpdateMode::weighted ? "weighted" : "unitary";
    manifest["capacity"] = state.node_capacity();
    manifest["total"] = state.total();
    manifest["nodes"] = state.spec().node_count();
    std::string mtext = manifest.dump();

    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
    put_u32(out, static_cast<uint32_t>(mtext.size()));
    out.insert(out.end(), mtext.begin(), mtext.end());
    for (uint64_t node = 0; node < state.spec().node_count(); ++node) {
        state.summary(node).serialize(out, state.spec().dimensions());
    }
    return out;
}

HhhState deserialize_state(std::span<const uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) + 4 ||
        std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw std::invalid_argument("not a state bundle");
    }
    std::size_t pos = sizeof(kMagic);
    uint32_t mlen = get_u32(bytes, pos);
    pos += 4;
    if (bytes.size() < pos + mlen) throw std::invalid_argument("truncated state bundle");
    nlohmann::json manifest =
        nlohmann::json::parse(bytes.begin() + pos, bytes.begin() + pos + mlen);
    pos += mlen;
    if (manifest.at("format").get<std::string>() != "hhh-state/1") {
        throw std::invalid_argument("unsupported state bundle format");
    }
    HierarchySpec spec = HierarchySpec::from_string(manifest.at("spec").get<std::string>());
    Rational epsilon = Rational::parse(manifest.at("epsilon").get<std::string>());
    UpdateMode mode = manifest.at("mode").get<std::string>() == "unitary" ? UpdateMode::unitary
                                                                          : UpdateMode::weighted;
    uint64_t total = manifest.at("total").get<uint64_t>();
    uint64_t nodes = manifest.at("nodes").get<uint64_t>();
    if (nodes != spec.node_count()) throw std::invalid_argument("node count mismatch");

    std::vector<SpaceSaving> summaries;
    summaries.reserve(nodes);
    for (uint64_t node = 0; node < nodes; ++node) {
        std::size_t consumed = 0;
        summaries.push_back(
            SpaceSaving::deserialize(bytes.subspan(pos), spec.dimensions(), &consumed));
        pos += consumed;
    }
    if (pos != bytes.size()) throw std::invalid_argument("trailing bytes in state bundle");
    return HhhState::assemble(std::move(spec), epsilon, mode, std::move(summaries), total);
}

void write_state_file(const std::string& path, const HhhState& state) {
    std::vector<uint8_t> bytes = serialize_state(state);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

HhhState read_state_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open state file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return deserialize_state(bytes);
}

}  // namespace hhh
