#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "hhh/hhh.hpp"
#include "hhh/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace hhh;
using refimpl::record;

namespace {

std::vector<Prefix> emitted_prefixes(const HhhReport& r) {
    std::vector<Prefix> out;
    for (const HhhOutputEntry& e : r.entries) out.push_back(e.prefix);
    return out;
}

std::set<std::string> emitted_names(const HhhReport& r) {
    std::set<std::string> out;
    for (const HhhOutputEntry& e : r.entries) out.insert(to_string(r.spec, e.prefix));
    return out;
}

HhhState state_over(const HierarchySpec& spec, const Rational& eps,
                    const std::vector<TraceRecord>& stream) {
    HhhState state(spec, eps);
    insert_stream(state, stream);
    return state;
}

}  // namespace

TEST_CASE("demo stream: exact summaries recover the exact set") {
    HierarchySpec spec = HierarchySpec::ipv4_bytewise(2);
    auto stream = refimpl::two_dim_demo_stream();
    Rational eps(1, 1000), phi(1, 4);
    HhhState state = state_over(spec, eps, stream);
    HhhReport report = output_2d(state, phi);

    CHECK(emitted_names(report) ==
          std::set<std::string>{"(11.12.13.14,21.22.23.24)", "(11.12.13.*,21.22.23.*)",
                                "(11.12.*.*,21.22.23.*)", "(11.12.13.*,21.*.*.*)"});
    // counts are exact at this epsilon
    for (const HhhOutputEntry& e : report.entries) {
        CHECK(e.f_min == e.f_max);
        CHECK(e.f_prime == 10);
    }
    CHECK(check_report(stream, spec, phi, eps, report).pass);

    // the pairwise glb correction fires: the audit row for (11.12.*.*,21.*.*.*)
    // shows F' = 40 - 30 - 30 + 20 = 0
    bool found = false;
    for (const HhhAuditEntry& a : report.audit) {
        if (to_string(spec, a.prefix) == "(11.12.*.*,21.*.*.*)") {
            found = true;
            CHECK(a.f_prime == 0);
            CHECK_FALSE(a.emitted);
        }
    }
    CHECK(found);
}

TEST_CASE("single repeated pair: ancestors fully discounted") {
    HierarchySpec spec = HierarchySpec::ipv4_bytewise(2);
    HhhState state(spec, Rational(1, 100));
    Prefix e = make_element(spec, std::vector<uint32_t>{0x01020304, 0x05060708});
    state.insert(e, 50);
    HhhReport report = output_2d(state, Rational(1, 5));
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].prefix == e);
    for (const HhhAuditEntry& a : report.audit) {
        if (!(a.prefix == e)) CHECK(a.f_prime == 0);
    }
}

TEST_CASE("exact summaries reproduce exact conditioned counts in 2D") {
    // Exhaustive small streams over a 2-level-per-dimension lattice: with no
    // evictions the emitted set equals the exact set and F' matches the
    // exact conditioned count for every scanned prefix, including the
    // third-element exclusion rule for the glb correction.
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 1}, {2, 1}});
    const Rational eps(1, 64);
    std::mt19937_64 rng(53);
    int identity_checks = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t n = 1 + rng() % 5;
        std::vector<TraceRecord> stream;
        for (std::size_t i = 0; i < n; ++i) {
            stream.push_back(record({uint32_t(rng() % 4), uint32_t(rng() % 4)}, 1 + rng() % 4));
        }
        HhhState state = state_over(spec, eps, stream);
        for (const Rational& phi : {Rational(1, 4), Rational(1, 8)}) {
            HhhReport report = output_2d(state, phi);
            auto P = emitted_prefixes(report);
            for (const HhhAuditEntry& a : report.audit) {
                uint64_t exact = conditioned_count_wrt(stream, spec, a.prefix, P);
                CHECK(a.f_prime == static_cast<int64_t>(exact));
                ++identity_checks;
            }
            ExactHhhSet exact_set = exact_hhh(stream, spec, phi);
            REQUIRE(P.size() == exact_set.entries.size());
            for (const ExactHhhEntry& e : exact_set.entries) {
                CHECK(std::find(P.begin(), P.end(), e.prefix) != P.end());
            }
        }
    }
    CHECK(identity_checks > 1000);
}

TEST_CASE("third-element exclusion changes the estimate (crafted antichain)") {
    // Three pairwise-overlapping heavy prefixes whose pairwise glbs are all
    // above their common core: the 2D rule must skip glbs that lie below a
    // third member, while the pairwise-only rule counts them.
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 2}, {2, 2}});
    std::vector<TraceRecord> stream;
    // common core (0,0) seen through three incomparable windows
    auto add = [&stream](uint32_t a, uint32_t b, uint64_t c) {
        stream.push_back(record({a, b}, c));
    };
    add(0, 0, 9);    // descends from all three windows
    add(1, 0, 9);    // (0/..,0) family
    add(0, 1, 9);
    add(5, 5, 9);    // unrelated mass
    HhhState state = state_over(spec, Rational(1, 128), stream);
    HhhReport two = output_2d(state, Rational(1, 6));
    HhhReport loose = output_nd(state, Rational(1, 6));
    // the pairwise-only estimate dominates the filtered one, so its output
    // set contains the 2D set
    auto p2 = emitted_names(two);
    auto pn = emitted_names(loose);
    for (const std::string& name : p2) CHECK(pn.count(name) == 1);
    CHECK(check_report(stream, spec, Rational(1, 6), Rational(1, 128), two).pass);
    CHECK(check_report(stream, spec, Rational(1, 6), Rational(1, 128), loose).pass);
}

TEST_CASE("general-dimension output is a superset of the 2D output") {
    HierarchySpec spec(std::vector<DimensionSpec>{{4, 2}, {4, 2}});
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 8; ++trial) {
        HhhState state(spec, Rational(1, 200));
        std::vector<TraceRecord> stream;
        for (int i = 0; i < 800; ++i) {
            TraceRecord r = record({uint32_t(rng() % 64), uint32_t(rng() % 64)}, 1 + rng() % 2);
            stream.push_back(r);
        }
        insert_stream(state, stream);
        Rational phi(1, 25);
        auto two = emitted_names(output_2d(state, phi));
        auto loose = emitted_names(output_nd(state, phi));
        for (const std::string& name : two) CHECK(loose.count(name) == 1);
        CHECK(check_report(stream, spec, phi, Rational(1, 200), output_nd(state, phi)).pass);
    }
}

TEST_CASE("three dimensions") {
    HierarchySpec spec(std::vector<DimensionSpec>{{2, 1}, {2, 1}, {2, 1}});
    CHECK(spec.node_count() == 27);

    // a single repeated element stays the only member under exact summaries
    HhhState hot(spec, Rational(1, 100));
    Prefix e = make_element(spec, std::vector<uint32_t>{1, 2, 3});
    hot.insert(e, 30);
    HhhReport hot_report = output_nd(hot, Rational(1, 3));
    REQUIRE(hot_report.entries.size() == 1);
    CHECK(hot_report.entries[0].prefix == e);

    // random small streams: coverage versus the oracle
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 6; ++trial) {
        HhhState state(spec, Rational(1, 50));
        std::vector<TraceRecord> stream;
        for (int i = 0; i < 300; ++i) {
            TraceRecord r =
                record({uint32_t(rng() % 4), uint32_t(rng() % 4), uint32_t(rng() % 4)}, 1);
            stream.push_back(r);
        }
        insert_stream(state, stream);
        Rational phi(1, 8);
        HhhReport report = output_nd(state, phi);
        CHECK(check_report(stream, spec, phi, Rational(1, 50), report).pass);
    }
}

TEST_CASE("2D output size bound holds when the discriminant allows it") {
    HierarchySpec spec = HierarchySpec::ipv4_bytewise(2);
    std::mt19937_64 rng(79);
    Rational eps(1, 10000), phi(1, 10);
    HhhState state(spec, eps);
    std::vector<TraceRecord> stream;
    for (int i = 0; i < 2000; ++i) {
        TraceRecord r = record({uint32_t(rng()), uint32_t(rng())}, 1);
        stream.push_back(r);
        state.insert(record_element(spec, r), 1);
    }
    HhhReport report = output_2d(state, phi);
    double bound = bound_output_size_2d(phi, eps, max_antichain_size(spec));
    CHECK(static_cast<double>(report.entries.size()) <= bound);
}

TEST_CASE("csv and json carry the run metadata") {
    HierarchySpec spec = HierarchySpec::ipv4_bytewise(2);
    HhhState state = state_over(spec, Rational(1, 100), refimpl::two_dim_demo_stream());
    HhhReport report = output_2d(state, Rational(1, 4));
    std::string csv = to_csv(report);
    CHECK(csv.find("#spec,4x8,4x8") != std::string::npos);
    CHECK(csv.find("#N,40") != std::string::npos);
    CHECK(csv.find("prefix,label,f_min,f_max,f_prime") != std::string::npos);
    CHECK(csv.find("\"(11.12.13.14,21.22.23.24)\"") != std::string::npos);

    std::string json = to_json(report);
    HhhReport back = report_from_json(json);
    CHECK(back.total == report.total);
    CHECK(back.spec == report.spec);
    REQUIRE(back.entries.size() == report.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].prefix == report.entries[i].prefix);
        CHECK(back.entries[i].f_min == report.entries[i].f_min);
        CHECK(back.entries[i].f_max == report.entries[i].f_max);
        CHECK(back.entries[i].f_prime == report.entries[i].f_prime);
    }
}
