#include <benchmark/benchmark.h>

#include <vector>

#include "hhh/hhh.hpp"
#include "hhh/stream.hpp"

namespace {

std::vector<hhh::TraceRecord> bench_stream(const hhh::HierarchySpec& spec, std::size_t n) {
    hhh::GeneratorConfig cfg;
    cfg.kind = hhh::GeneratorConfig::Kind::zipf;
    cfg.universe = 1 << 16;
    cfg.records = n;
    cfg.alpha = 1.1;
    cfg.seed = 2;
    return hhh::generate_stream(cfg, spec);
}

/// Insert throughput (packets/second shows up as items_per_second).
void BM_Insert(benchmark::State& state, hhh::HierarchySpec spec, hhh::UpdateMode mode) {
    auto stream = bench_stream(spec, 1 << 16);
    std::vector<hhh::Prefix> elements;
    elements.reserve(stream.size());
    for (const hhh::TraceRecord& r : stream) {
        elements.push_back(hhh::record_element(spec, r));
    }
    hhh::HhhState hhh_state(spec, hhh::Rational(1, 1000), mode);
    std::size_t i = 0;
    for (auto _ : state) {
        hhh_state.insert(elements[i++ & (elements.size() - 1)], 1);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_Insert, bytewise_1d_weighted, hhh::HierarchySpec::ipv4_bytewise(1),
                  hhh::UpdateMode::weighted);
BENCHMARK_CAPTURE(BM_Insert, bytewise_1d_unitary, hhh::HierarchySpec::ipv4_bytewise(1),
                  hhh::UpdateMode::unitary);
BENCHMARK_CAPTURE(BM_Insert, bytewise_2d_weighted, hhh::HierarchySpec::ipv4_bytewise(2),
                  hhh::UpdateMode::weighted);
BENCHMARK_CAPTURE(BM_Insert, bytewise_2d_unitary, hhh::HierarchySpec::ipv4_bytewise(2),
                  hhh::UpdateMode::unitary);

void BM_Output(benchmark::State& state, hhh::HierarchySpec spec) {
    auto stream = bench_stream(spec, 1 << 17);
    hhh::HhhState hhh_state(spec, hhh::Rational(1, 1000), hhh::UpdateMode::unitary);
    hhh::insert_stream(hhh_state, stream);
    hhh::Rational phi(1, 50);
    for (auto _ : state) {
        if (spec.dimensions() == 1) {
            benchmark::DoNotOptimize(hhh::output_1d(hhh_state, phi));
        } else {
            benchmark::DoNotOptimize(hhh::output_2d(hhh_state, phi));
        }
    }
}
BENCHMARK_CAPTURE(BM_Output, bytewise_1d, hhh::HierarchySpec::ipv4_bytewise(1));
BENCHMARK_CAPTURE(BM_Output, bytewise_2d, hhh::HierarchySpec::ipv4_bytewise(2));

}  // namespace

BENCHMARK_MAIN();
