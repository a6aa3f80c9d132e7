#pragma once

// Shared stream fixtures for unit and acceptance tests.

#include <cstdint>
#include <vector>

#include "hhh/lattice.hpp"
#include "hhh/stream.hpp"
#include "support/reference.hpp"

namespace refimpl {

/// Two-dimensional bytewise demo stream: ten repetitions of one hot pair
/// plus three spread families of ten unit records each (N = 40). With
/// threshold phi*N = 10 the exact HHH set has four members whose discounting
/// exercises the pairwise glb correction.
inline std::vector<hhh::TraceRecord> two_dim_demo_stream() {
    const uint32_t a = 11, b = 12, c = 13, d = 14;
    const uint32_t w = 21, x = 22, y = 23, z = 24;
    auto ip = [](uint32_t p, uint32_t q, uint32_t r, uint32_t s) {
        return (p << 24) | (q << 16) | (r << 8) | s;
    };
    std::vector<hhh::TraceRecord> out;
    for (int rep = 0; rep < 10; ++rep) {
        out.push_back(record({ip(a, b, c, d), ip(w, x, y, z)}));
    }
    for (uint32_t i = 0; i < 10; ++i) {
        out.push_back(record({ip(a, b, c, i), ip(w, x, y, i)}));
        out.push_back(record({ip(a, b, i, d), ip(w, x, y, i)}));
        out.push_back(record({ip(a, b, c, i), ip(w, i, y, z)}));
    }
    return out;
}

}  // namespace refimpl
