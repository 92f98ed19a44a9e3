#include <benchmark/benchmark.h>

#include "bipemb/generators.hpp"
#include "bipemb/hamilton.hpp"

using namespace bipemb;

static void BM_RotationExtension(benchmark::State & st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    auto g = random_min_degree_host(n, Rational(1, 50), 3, Rational(0));
    HamiltonOptions o;
    o.mode = HamiltonMode::rotation_extension;
    for (auto _ : st) {
        auto c = find_hamilton_cycle(g, o);
        benchmark::DoNotOptimize(c.order.data());
    }
}
BENCHMARK(BM_RotationExtension)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMicrosecond);

static void BM_ExhaustiveSmall(benchmark::State & st)
{
    auto g = random_min_degree_host(static_cast<std::size_t>(st.range(0)), Rational(1, 10), 4, Rational(0));
    HamiltonOptions o;
    o.mode = HamiltonMode::exhaustive_small;
    for (auto _ : st) {
        auto c = find_hamilton_cycle(g, o);
        benchmark::DoNotOptimize(c.order.data());
    }
}
BENCHMARK(BM_ExhaustiveSmall)->Arg(8)->Arg(12);
