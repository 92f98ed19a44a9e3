#include <benchmark/benchmark.h>

#include <random>

#include "bipemb/matching.hpp"

using namespace bipemb;

static void BM_HopcroftKarp(benchmark::State & st)
{
    const auto n = static_cast<std::uint32_t>(st.range(0));
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.3);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t l = 0; l < n; ++l)
        for (std::uint32_t r = 0; r < n; ++r)
            if (coin(rng))
                edges.emplace_back(l, r);
    for (auto _ : st) {
        HopcroftKarp hk(n, n);
        for (auto [l, r] : edges)
            hk.add_edge(l, r);
        benchmark::DoNotOptimize(hk.solve());
    }
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * edges.size()));
}
BENCHMARK(BM_HopcroftKarp)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);
