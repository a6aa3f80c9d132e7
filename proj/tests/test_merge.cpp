#include <doctest.h>

#include <cstdio>
#include <random>
#include <vector>

#include "hhh/merge.hpp"
#include "hhh/oracle.hpp"
#include "support/reference.hpp"

using namespace hhh;
using refimpl::record;

namespace {

std::vector<TraceRecord> random_stream(std::mt19937_64& rng, const HierarchySpec& spec,
                                       std::size_t n, uint32_t universe) {
    std::vector<TraceRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        TraceRecord r;
        for (std::size_t d = 0; d < spec.dimensions(); ++d) r.values[d] = rng() % universe;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("merging one state is the identity at the estimate level") {
    HierarchySpec spec(std::vector<DimensionSpec>{{4, 2}});
    HhhState state(spec, Rational(1, 20));
    std::mt19937_64 rng(7);
    auto stream = random_stream(rng, spec, 400, 64);
    insert_stream(state, stream);

    HhhState merged = merge_states({&state});
    CHECK(merged.total() == state.total());
    for (uint64_t node = 0; node < spec.node_count(); ++node) {
        for (const CounterSnapshot& c : state.summary(node).counters()) {
            Estimate a = state.summary(node).estimate(c.item);
            Estimate b = merged.summary(node).estimate(c.item);
            CHECK(a.f_min == b.f_min);
            CHECK(a.f_max == b.f_max);
        }
    }
}

TEST_CASE("disjoint non-full states merge exactly") {
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 2}});  // values 0..15
    HhhState a(spec, Rational(1, 10));
    HhhState b(spec, Rational(1, 10));
    a.insert(make_element(spec, std::vector<uint32_t>{1}), 5);
    b.insert(make_element(spec, std::vector<uint32_t>{9}), 3);
    HhhState merged = merge_states({&a, &b});
    CHECK(merged.total() == 8);
    Label full = spec.full_label();
    const SpaceSaving& deep = merged.summary(full);
    Estimate e1 = deep.estimate(make_element(spec, std::vector<uint32_t>{1}));
    CHECK(e1.f_min == 5);
    CHECK(e1.f_max == 5);
    Estimate e9 = deep.estimate(make_element(spec, std::vector<uint32_t>{9}));
    CHECK(e9.f_min == 3);
    CHECK(e9.f_max == 3);
}

TEST_CASE("mismatched inputs are rejected") {
    HierarchySpec spec(std::vector<DimensionSpec>{{4, 2}});
    HhhState a(spec, Rational(1, 10));
    HhhState b(spec, Rational(1, 20));
    CHECK_THROWS(merge_states({}));
    CHECK_THROWS(merge_states({&a, &b}));  // different epsilon
    HhhState c(HierarchySpec(std::vector<DimensionSpec>{{3, 2}}), Rational(1, 10));
    CHECK_THROWS(merge_states({&a, &c}));  // different hierarchy
    HhhState d(spec, Rational(1, 10), UpdateMode::unitary);
    CHECK_THROWS(merge_states({&a, &d}));  // different mode
}

TEST_CASE("merged distributed streams keep the combined guarantee") {
    // k = 4 substreams with ceil(3/eps)-counter nodes; the merged state must
    // bracket every prefix of the concatenation within 3*eps*N and pass
    // coverage after the standard output walk.
    std::mt19937_64 rng(13);
    HierarchySpec spec(std::vector<DimensionSpec>{{4, 2}});
    const Rational eps(1, 20);
    const Rational merged_eps(eps.num(), 3 * eps.den());  // eps/3 -> 3/eps counters
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<HhhState> parts;
        std::vector<TraceRecord> concat;
        for (int k = 0; k < 4; ++k) {
            parts.emplace_back(spec, merged_eps, UpdateMode::unitary);
            auto stream = random_stream(rng, spec, 300 + rng() % 300, 40);
            insert_stream(parts[k], stream);
            concat.insert(concat.end(), stream.begin(), stream.end());
        }
        HhhState merged = merge_states({&parts[0], &parts[1], &parts[2], &parts[3]});
        CHECK(merged.total() == concat.size());

        ExactCounts counts = exact_counts(concat, spec);
        const uint64_t n = counts.total;
        for (const auto& [p, f] : counts.counts) {
            const SpaceSaving& s = merged.summary(p.label);
            Estimate e = s.estimate(p);
            if (s.tracks(p)) {
                CHECK(e.f_min <= f);
                CHECK(f <= e.f_max);
                CHECK(Rational(e.f_max - e.f_min, n) <= Rational(3, 1) * eps);
            } else {
                // estimate 0 for untracked items; their miss stays within 3*eps*N
                CHECK(Rational(f, n) <= Rational(3, 1) * eps);
            }
        }

        Rational phi(1, 5);
        HhhReport report = output_1d(merged, phi);
        CheckVerdict verdict = check_report(concat, spec, phi, Rational(3, 1) * eps, report);
        CHECK(verdict.pass);
    }
}

TEST_CASE("merge is order-insensitive") {
    std::mt19937_64 rng(19);
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 2}, {2, 2}});
    std::vector<HhhState> parts;
    for (int k = 0; k < 3; ++k) {
        parts.emplace_back(spec, Rational(1, 8));
        auto stream = random_stream(rng, spec, 200, 12);
        insert_stream(parts[k], stream);
    }
    HhhState m1 = merge_states({&parts[0], &parts[1], &parts[2]});
    HhhState m2 = merge_states({&parts[2], &parts[1], &parts[0]});
    CHECK(refimpl::snapshot_equal(refimpl::state_snapshot(m1), refimpl::state_snapshot(m2)));
}

TEST_CASE("state bundles round trip bit-exactly") {
    std::mt19937_64 rng(23);
    HierarchySpec spec(std::vector<DimensionSpec>{{4, 2}, {2, 2}});
    HhhState state(spec, Rational(1, 25));
    insert_stream(state, random_stream(rng, spec, 600, 12));

    std::vector<uint8_t> bytes = serialize_state(state);
    HhhState back = deserialize_state(bytes);
    CHECK(back.total() == state.total());
    CHECK(back.spec() == state.spec());
    CHECK(back.epsilon() == state.epsilon());
    CHECK(back.mode() == state.mode());
    CHECK(refimpl::snapshot_equal(refimpl::state_snapshot(back), refimpl::state_snapshot(state)));
    CHECK(serialize_state(back) == bytes);

    // file round trip
    std::string path = "merge_test_state.bin";
    write_state_file(path, state);
    HhhState from_file = read_state_file(path);
    CHECK(serialize_state(from_file) == bytes);
    std::remove(path.c_str());

    CHECK_THROWS(deserialize_state(std::vector<uint8_t>{'x', 'y'}));
}

TEST_CASE("merged states answer output queries like a centralized run would") {
    // merging states whose streams never overflow any node summary gives
    // the same report as the centralized state over the concatenation
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 2}});
    std::mt19937_64 rng(29);
    HhhState a(spec, Rational(1, 40));
    HhhState b(spec, Rational(1, 40));
    HhhState central(spec, Rational(1, 40));
    std::vector<TraceRecord> concat;
    for (int i = 0; i < 120; ++i) {
        TraceRecord r = record({uint32_t(rng() % 16)});
        (i % 2 == 0 ? a : b).insert(record_element(spec, r), 1);
        central.insert(record_element(spec, r), 1);
        concat.push_back(r);
    }
    HhhState merged = merge_states({&a, &b});
    HhhReport m = output_1d(merged, Rational(1, 8));
    HhhReport c = output_1d(central, Rational(1, 8));
    CHECK(to_csv(m) == to_csv(c));
}
