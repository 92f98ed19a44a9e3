#include <benchmark/benchmark.h>

#include "bipemb/embedder.hpp"
#include "bipemb/generators.hpp"

using namespace bipemb;

// full embedding of a Hamilton cycle, the usual smoke workload
static void BM_EmbedCycle(benchmark::State & st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    auto g = random_min_degree_host(n, Rational(3, 10), 1);
    auto t = hamilton_cycle_target(n);
    PipelineConfig c;
    c.gamma = Rational(3, 10);
    c.k0 = 8;
    c.labelling_mode = LabellingMode::given;
    c.labelling = t.order;
    for (auto _ : st) {
        auto r = embed_bipartite(g, t.graph, c);
        benchmark::DoNotOptimize(r.embedding.map_a.data());
    }
}
BENCHMARK(BM_EmbedCycle)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
