#include <benchmark/benchmark.h>

#include "bipemb/generators.hpp"
#include "bipemb/regularity.hpp"

using namespace bipemb;

static void BM_SampledPairCheck(benchmark::State & st)
{
    const auto m = static_cast<std::size_t>(st.range(0));
    auto g = planted_cycle_host(2, m, 0.5, 1);
    auto p = planted_partition(2, m);
    CertifyOptions o;
    o.budget = static_cast<std::size_t>(st.range(1));
    for (auto _ : st) {
        auto c = check_regular_pair(g, p.a[0], p.b[0], {Rational(1, 10), Rational(3, 10)}, o);
        benchmark::DoNotOptimize(c.verdict);
    }
}
BENCHMARK(BM_SampledPairCheck)->Args({250, 500})->Args({500, 2000})->Unit(benchmark::kMillisecond);

static void BM_ExhaustivePairCheck(benchmark::State & st)
{
    auto g = planted_blocks_host(2, 8);
    auto p = planted_partition(2, 8);
    CertifyOptions o;
    o.strategy = Strategy::exhaustive;
    for (auto _ : st) {
        auto c = check_regular_pair(g, p.a[0], p.b[0], {Rational(1, 4), Rational(0)}, o);
        benchmark::DoNotOptimize(c.verdict);
    }
}
BENCHMARK(BM_ExhaustivePairCheck);

static void BM_BuildPartition(benchmark::State & st)
{
    auto g = random_min_degree_host(static_cast<std::size_t>(st.range(0)), Rational(3, 10), 0);
    for (auto _ : st) {
        auto b = build_regular_partition(g, {Rational(1, 4), Rational(3, 10)}, 8, 64);
        benchmark::DoNotOptimize(b.partition.k);
    }
}
BENCHMARK(BM_BuildPartition)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
