#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hhh/space_saving.hpp"
#include "hhh/stream.hpp"

namespace {

std::vector<hhh::Prefix> zipf_items(const hhh::HierarchySpec& spec, std::size_t n) {
    hhh::GeneratorConfig cfg;
    cfg.kind = hhh::GeneratorConfig::Kind::zipf;
    cfg.universe = 1 << 16;
    cfg.records = n;
    cfg.alpha = 1.1;
    cfg.seed = 1;
    std::vector<hhh::Prefix> items;
    items.reserve(n);
    for (const hhh::TraceRecord& r : hhh::generate_stream(cfg, spec)) {
        items.push_back(hhh::record_element(spec, r));
    }
    return items;
}

void BM_WeightedUpdate(benchmark::State& state) {
    hhh::HierarchySpec spec(std::vector<hhh::DimensionSpec>{{4, 8}});
    auto items = zipf_items(spec, 1 << 16);
    uint32_t m = static_cast<uint32_t>(state.range(0));
    hhh::SpaceSaving s(hhh::UpdateMode::weighted, m);
    std::size_t i = 0;
    for (auto _ : state) {
        s.update(items[i++ & (items.size() - 1)], 1);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WeightedUpdate)->Arg(100)->Arg(1000)->Arg(10000);

void BM_UnitaryUpdate(benchmark::State& state) {
    hhh::HierarchySpec spec(std::vector<hhh::DimensionSpec>{{4, 8}});
    auto items = zipf_items(spec, 1 << 16);
    uint32_t m = static_cast<uint32_t>(state.range(0));
    hhh::SpaceSaving s(hhh::UpdateMode::unitary, m);
    std::size_t i = 0;
    for (auto _ : state) {
        s.update_unitary(items[i++ & (items.size() - 1)]);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UnitaryUpdate)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Estimate(benchmark::State& state) {
    hhh::HierarchySpec spec(std::vector<hhh::DimensionSpec>{{4, 8}});
    auto items = zipf_items(spec, 1 << 16);
    hhh::SpaceSaving s(hhh::UpdateMode::weighted, 1000);
    for (const hhh::Prefix& p : items) s.update(p, 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.estimate(items[i++ & (items.size() - 1)]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Estimate);

}  // namespace
