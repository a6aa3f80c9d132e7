#include <doctest.h>

#include <random>
#include <vector>

#include "hhh/space_saving.hpp"
#include "support/reference.hpp"

using namespace hhh;
using refimpl::NaiveSummary;

namespace {

const HierarchySpec kSpec(std::vector<DimensionSpec>{{2, 2}});  // 1D, 4-bit values

Prefix item(uint32_t v) { return make_element(kSpec, std::vector<uint32_t>{v}); }

std::vector<std::pair<Prefix, uint64_t>> random_stream(std::mt19937_64& rng, std::size_t length,
                                                       uint32_t universe, bool weighted) {
    std::vector<std::pair<Prefix, uint64_t>> out;
    for (std::size_t i = 0; i < length; ++i) {
        out.push_back({item(rng() % universe), weighted ? 1 + rng() % 5 : 1});
    }
    return out;
}

}  // namespace

TEST_CASE("construction and sizing") {
    SpaceSaving s(UpdateMode::weighted, 3);
    CHECK(s.capacity() == 3);
    CHECK(s.size() == 0);
    CHECK(s.total() == 0);
    CHECK_THROWS(SpaceSaving(UpdateMode::weighted, 0));
    CHECK(counters_for_epsilon(Rational::parse("0.01")) == 100);
    CHECK(counters_for_epsilon(Rational(1, 3)) == 3);
    CHECK(counters_for_epsilon(Rational(2, 7)) == 4);  // ceil(7/2)
    CHECK_THROWS(counters_for_epsilon(Rational(0, 1)));
}

TEST_CASE("update rule on the worked examples") {
    // stream a,b,c then d with 3 counters: the oldest minimum (a) is evicted
    SpaceSaving s(UpdateMode::weighted, 3);
    s.update(item(1), 1);
    s.update(item(2), 1);
    s.update(item(3), 1);
    s.update(item(4), 1);
    CHECK_FALSE(s.tracks(item(1)));
    CHECK(s.estimate(item(2)).f_max == 1);
    CHECK(s.estimate(item(3)).f_max == 1);
    CHECK(s.estimate(item(4)).f_min == 1);
    CHECK(s.estimate(item(4)).f_max == 2);

    // one weighted update, no eviction
    SpaceSaving w(UpdateMode::weighted, 3);
    w.update(item(7), 5);
    CHECK(w.estimate(item(7)).f_min == 5);
    CHECK(w.estimate(item(7)).f_max == 5);

    // m=1, stream a,b,a: final counter is (a, count 3, error 2)
    SpaceSaving one(UpdateMode::weighted, 1);
    one.update(item(1), 1);
    one.update(item(2), 1);
    one.update(item(1), 1);
    auto cs = one.sorted_counters();
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].item == item(1));
    CHECK(cs[0].count == 3);
    CHECK(cs[0].error == 2);
    CHECK(cs[0].error <= one.total() / one.capacity());  // error <= N/m

    CHECK_THROWS(one.update(item(1), 0));
}

TEST_CASE("unitary engine matches the worked example") {
    // m=2, stream a,a,b,c under the oldest-minimum tie-break
    SpaceSaving s(UpdateMode::unitary, 2);
    s.update_unitary(item(1));
    s.update_unitary(item(1));
    s.update_unitary(item(2));
    s.update_unitary(item(3));
    auto cs = s.sorted_counters();
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].item == item(1));
    CHECK(cs[0].count == 2);
    CHECK(cs[0].error == 0);
    CHECK(cs[1].item == item(3));
    CHECK(cs[1].count == 2);
    CHECK(cs[1].error == 1);

    SpaceSaving fresh(UpdateMode::unitary, 4);
    fresh.update_unitary(item(9));
    auto single = fresh.sorted_counters();
    REQUIRE(single.size() == 1);
    CHECK(single[0].count == 1);
    CHECK(single[0].error == 0);

    SpaceSaving weighted(UpdateMode::weighted, 2);
    CHECK_THROWS(weighted.update_unitary(item(1)));
    SpaceSaving unitary(UpdateMode::unitary, 2);
    CHECK_THROWS(unitary.update(item(1), 2));
    CHECK_NOTHROW(unitary.update(item(1), 1));  // routed to the bucket engine
}

TEST_CASE("estimates") {
    SpaceSaving s(UpdateMode::weighted, 2);
    s.update(item(1), 7);
    // tracked with error: force an eviction
    s.update(item(2), 1);
    s.update(item(3), 1);  // evicts 2 (min), count 2 error 1
    CHECK(s.estimate(item(3)).f_min == 1);
    CHECK(s.estimate(item(3)).f_max == 2);
    // untracked on a full summary: (0, min counter)
    CHECK(s.estimate(item(4)).f_min == 0);
    CHECK(s.estimate(item(4)).f_max == 2);
    // untracked on a non-full summary: (0, 0)
    SpaceSaving empty(UpdateMode::weighted, 2);
    empty.update(item(1), 3);
    CHECK(empty.estimate(item(2)).f_min == 0);
    CHECK(empty.estimate(item(2)).f_max == 0);
}

TEST_CASE("weighted engine equals the linear-scan reference") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t m = 1 + rng() % 6;
        SpaceSaving s(UpdateMode::weighted, m);
        NaiveSummary naive(m);
        auto stream = random_stream(rng, 5 + rng() % 60, 2 + rng() % 12, true);
        for (const auto& [it, c] : stream) {
            s.update(it, c);
            naive.update(it, c);
        }
        auto got = s.sorted_counters();
        auto want = naive.sorted_counters();
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].item == want[i].item);
            CHECK(got[i].count == want[i].count);
            CHECK(got[i].error == want[i].error);
        }
    }
}

TEST_CASE("unitary engine equals the weighted engine on all-ones streams") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t m = 1 + rng() % 6;
        SpaceSaving unitary(UpdateMode::unitary, m);
        SpaceSaving weighted(UpdateMode::weighted, m);
        auto stream = random_stream(rng, 5 + rng() % 120, 2 + rng() % 12, false);
        for (const auto& [it, c] : stream) {
            unitary.update_unitary(it);
            weighted.update(it, 1);
        }
        CHECK(unitary.min_count() == weighted.min_count());
        auto got = unitary.sorted_counters();
        auto want = weighted.sorted_counters();
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].item == want[i].item);
            CHECK(got[i].count == want[i].count);
            CHECK(got[i].error == want[i].error);
        }
    }
}

TEST_CASE("frequency bounds and heavy-hitter containment (brute force)") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 150; ++trial) {
        uint32_t m = 1 + rng() % 5;
        uint32_t universe = 2 + rng() % 14;
        bool weighted = (trial % 2) == 0;
        SpaceSaving s(weighted ? UpdateMode::weighted : UpdateMode::unitary, m);
        auto stream = random_stream(rng, 10 + rng() % 80, universe, weighted);
        std::vector<std::pair<Prefix, uint64_t>> flat;
        for (const auto& [it, c] : stream) {
            s.update(it, c);
            flat.push_back({it, c});
        }
        auto truth = refimpl::true_counts(flat);
        uint64_t n_over_m = s.total() / m;
        uint64_t sum_counts = 0;
        for (const CounterSnapshot& c : s.counters()) sum_counts += c.count;
        CHECK(sum_counts == s.total());  // each update lands in exactly one counter
        for (uint32_t v = 0; v < universe; ++v) {
            Prefix it = item(v);
            uint64_t truth_v = truth.count(it) ? truth.at(it) : 0;
            Estimate e = s.estimate(it);
            if (s.tracks(it)) {
                CHECK(e.f_min <= truth_v);
                CHECK(truth_v <= e.f_max);
                CHECK(e.f_max - e.f_min <= n_over_m);  // Eq.(1) with j = 0
            } else {
                CHECK(truth_v <= e.f_max);  // bounded by the minimum counter
                CHECK(e.f_max <= std::max<uint64_t>(n_over_m, 1));
            }
            if (truth_v > n_over_m) CHECK(s.tracks(it));  // heavy hitters stay tracked
        }
    }
}

TEST_CASE("serialization round trips bit-exactly") {
    std::mt19937_64 rng(51);
    for (UpdateMode mode : {UpdateMode::weighted, UpdateMode::unitary}) {
        SpaceSaving s(mode, 4);
        auto stream = random_stream(rng, 60, 9, mode == UpdateMode::weighted);
        for (const auto& [it, c] : stream) s.update(it, c);

        std::vector<uint8_t> bytes;
        s.serialize(bytes, 1);
        SpaceSaving back = SpaceSaving::deserialize(bytes, 1);
        CHECK(back.mode() == s.mode());
        CHECK(back.capacity() == s.capacity());
        CHECK(back.total() == s.total());

        std::vector<uint8_t> again;
        back.serialize(again, 1);
        CHECK(again == bytes);

        // estimates survive the round trip
        for (uint32_t v = 0; v < 9; ++v) {
            CHECK(back.estimate(item(v)).f_min == s.estimate(item(v)).f_min);
            CHECK(back.estimate(item(v)).f_max == s.estimate(item(v)).f_max);
        }
    }
    CHECK_THROWS(SpaceSaving::deserialize(std::vector<uint8_t>{1, 2, 3}, 1));
}

TEST_CASE("merge: identity and disjoint inputs") {
    SpaceSaving s(UpdateMode::weighted, 4);
    s.update(item(1), 5);
    s.update(item(2), 3);
    SpaceSaving merged = SpaceSaving::merge({&s}, 4);
    CHECK(merged.total() == s.total());
    for (uint32_t v : {1u, 2u, 3u}) {
        CHECK(merged.estimate(item(v)).f_min == s.estimate(item(v)).f_min);
        CHECK(merged.estimate(item(v)).f_max == s.estimate(item(v)).f_max);
    }

    SpaceSaving a(UpdateMode::weighted, 4);
    a.update(item(1), 5);
    a.update(item(2), 3);
    SpaceSaving b(UpdateMode::weighted, 4);
    b.update(item(3), 2);
    SpaceSaving u = SpaceSaving::merge({&a, &b}, 8);
    CHECK(u.total() == 10);
    CHECK(u.estimate(item(1)).f_min == 5);
    CHECK(u.estimate(item(1)).f_max == 5);
    CHECK(u.estimate(item(3)).f_min == 2);
    CHECK(u.estimate(item(3)).f_max == 2);

    CHECK_THROWS(SpaceSaving::merge({}, 4));
    SpaceSaving c(UpdateMode::unitary, 4);
    CHECK_THROWS(SpaceSaving::merge({&a, &c}, 4));
}

TEST_CASE("merge: accuracy against brute-force truth over the concatenation") {
    std::mt19937_64 rng(67);
    const Rational eps(1, 20);  // 0.05
    const uint32_t m = static_cast<uint32_t>(3 * eps.den() / eps.num());  // 3/eps counters
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SpaceSaving> parts;
        std::vector<std::pair<Prefix, uint64_t>> concat;
        uint64_t total = 0;
        for (int k = 0; k < 4; ++k) {
            parts.emplace_back(UpdateMode::unitary, m);
            auto stream = random_stream(rng, 200 + rng() % 400, 2 + rng() % 14, false);
            for (const auto& [it, c] : stream) {
                parts.back().update_unitary(it);
                concat.push_back({it, c});
                total += c;
            }
        }
        SpaceSaving merged =
            SpaceSaving::merge({&parts[0], &parts[1], &parts[2], &parts[3]}, m);
        CHECK(merged.total() == total);
        auto truth = refimpl::true_counts(concat);
        for (const auto& [it, f] : truth) {
            Estimate e = merged.estimate(it);
            if (merged.tracks(it)) {
                CHECK(e.f_min <= f);
                CHECK(f <= e.f_max);
                // width bounded by 3*eps*N (the merge guarantee)
                CHECK(Rational(3, 1) * eps >= Rational(e.f_max - e.f_min, std::max<uint64_t>(total, 1)));
            } else {
                // estimate 0 for untracked; the miss stays within 3*eps*N
                CHECK(Rational(3, 1) * eps >= Rational(f, std::max<uint64_t>(total, 1)));
            }
        }
    }
}

TEST_CASE("merge is insensitive to input order") {
    std::mt19937_64 rng(83);
    std::vector<SpaceSaving> parts;
    for (int k = 0; k < 3; ++k) {
        parts.emplace_back(UpdateMode::weighted, 3);
        auto stream = random_stream(rng, 40, 8, true);
        for (const auto& [it, c] : stream) parts[k].update(it, c);
    }
    SpaceSaving m1 = SpaceSaving::merge({&parts[0], &parts[1], &parts[2]}, 3);
    SpaceSaving m2 = SpaceSaving::merge({&parts[2], &parts[0], &parts[1]}, 3);
    auto a = m1.sorted_counters();
    auto b = m2.sorted_counters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].item == b[i].item);
        CHECK(a[i].count == b[i].count);
        CHECK(a[i].error == b[i].error);
    }
}

TEST_CASE("capacity is fixed") {
    SpaceSaving s(UpdateMode::unitary, 5);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) s.update_unitary(item(rng() % 16));
    CHECK(s.size() <= 5);
    CHECK(s.capacity() == 5);
}
