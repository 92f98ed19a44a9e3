#include <gtest/gtest.h>

#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/generators.hpp"
#include "bipemb/regularity.hpp"
#include "bipemb/rng.hpp"
#include "oracles.hpp"

using namespace bipemb;

namespace {

BipartiteGraph complete(std::size_t m)
{
    return planted_blocks_host(1, m);
}

BipartiteGraph random_graph(std::size_t n, double p, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Edge> e;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (uniform_unit(rng) < p)
                e.emplace_back(a, b);
    return BipartiteGraph::build(n, n, e);
}

CertifyOptions exhaustive()
{
    CertifyOptions o;
    o.strategy = Strategy::exhaustive;
    return o;
}

std::vector<std::uint32_t> iota_vec(std::uint32_t n)
{
    std::vector<std::uint32_t> v(n);
    for (std::uint32_t i = 0; i < n; ++i)
        v[i] = i;
    return v;
}

} // namespace

TEST(RegularPair, CompleteK44IsRegular)
{
    auto g = complete(4);
    auto c = check_regular_pair(g, VertexSet::full(Side::A, 4), VertexSet::full(Side::B, 4), {Rational(1, 4), Rational(1, 2)},
                                exhaustive());
    EXPECT_EQ(c.verdict, Verdict::certified_regular);
    EXPECT_EQ(c.base_density, Rational(1));
}

TEST(RegularPair, EmptyPairIsNotRegularAtPositiveDensity)
{
    auto g = BipartiteGraph::build(4, 4, {});
    auto c = check_regular_pair(g, VertexSet::full(Side::A, 4), VertexSet::full(Side::B, 4), {Rational(1, 4), Rational(1, 4)},
                                exhaustive());
    EXPECT_TRUE(c.verdict == Verdict::below_density || c.verdict == Verdict::certified_irregular);
    EXPECT_EQ(c.base_density, Rational(0));
}

TEST(RegularPair, TwoBlocksHaveDeviationWitness)
{
    auto g = planted_blocks_host(2, 2);
    auto c = check_regular_pair(g, VertexSet::full(Side::A, 4), VertexSet::full(Side::B, 4), {Rational(1, 4), Rational(0)},
                                exhaustive());
    ASSERT_EQ(c.verdict, Verdict::certified_irregular);
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_GT(c.witness->deviation, Rational(1, 4));
    EXPECT_EQ(abs(density(g, c.witness->u_sub, c.witness->w_sub) - Rational(1, 2)), c.witness->deviation);
    // The named witness {A0,A1} x {B0,B1} deviates by exactly 1/2.
    const std::vector<std::uint32_t> two{0, 1};
    EXPECT_EQ(density(g, VertexSet::of(Side::A, 4, two), VertexSet::of(Side::B, 4, two)) - Rational(1, 2), Rational(1, 2));
}

TEST(RegularPair, ExhaustiveCapRefuses)
{
    auto g = complete(40);
    CertifyOptions o = exhaustive();
    o.enumeration_cap = 1000;
    EXPECT_THROW(check_regular_pair(g, VertexSet::full(Side::A, 40), VertexSet::full(Side::B, 40),
                                    {Rational(1, 4), Rational(0)}, o),
                 PreconditionError);
}

TEST(SuperRegularPair, CompleteK33)
{
    auto g = complete(3);
    auto c = check_super_regular_pair(g, VertexSet::full(Side::A, 3), VertexSet::full(Side::B, 3),
                                      {Rational(1, 3), Rational(1, 2)}, exhaustive());
    EXPECT_EQ(c.verdict, Verdict::certified_super_regular);
}

TEST(SuperRegularPair, IsolatedVertexFails)
{
    std::vector<Edge> e;
    for (std::uint32_t a = 1; a < 3; ++a)
        for (std::uint32_t b = 0; b < 3; ++b)
            e.emplace_back(a, b);
    auto g = BipartiteGraph::build(3, 3, e);
    auto c = check_super_regular_pair(g, VertexSet::full(Side::A, 3), VertexSet::full(Side::B, 3),
                                      {Rational(1, 3), Rational(1, 2)}, exhaustive());
    EXPECT_EQ(c.verdict, Verdict::failed_super_regular);
    ASSERT_TRUE(c.low_degree_vertex.has_value());
    EXPECT_EQ(*c.low_degree_vertex, (VertexId{Side::A, 0}));
}

TEST(SuperRegularPair, SixCycleFailsOnRegularity)
{
    const std::vector<Edge> e{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}};
    auto g = BipartiteGraph::build(3, 3, e);
    auto c = check_super_regular_pair(g, VertexSet::full(Side::A, 3), VertexSet::full(Side::B, 3),
                                      {Rational(1, 3), Rational(1, 2)}, exhaustive());
    EXPECT_EQ(c.verdict, Verdict::failed_super_regular);
    EXPECT_FALSE(c.low_degree_vertex.has_value());
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_GT(c.witness->deviation, Rational(1, 3));
}

TEST(RegularPairProperty, ExhaustiveAgreesWithOracle)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t m = 4 + seed % 3;
        auto g = random_graph(m, 0.5, seed);
        const Rational eps = seed % 2 ? Rational(1, 3) : Rational(1, 2);
        auto c = check_regular_pair(g, VertexSet::full(Side::A, m), VertexSet::full(Side::B, m), {eps, Rational(0)},
                                    exhaustive());
        EXPECT_EQ(c.epsilon_regular(), oracle::epsilon_regular(g, iota_vec(m), iota_vec(m), eps)) << "seed " << seed;
    }
}

TEST(RegularPairProperty, WitnessesAreSound)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_graph(24, 0.5, seed);
        for (Strategy s : {Strategy::sampled, Strategy::guided}) {
            CertifyOptions o;
            o.strategy = s;
            o.seed = seed;
            o.budget = 300;
            const Rational eps(1, 10);
            auto c = check_regular_pair(g, VertexSet::full(Side::A, 24), VertexSet::full(Side::B, 24), {eps, Rational(0)}, o);
            if (!c.witness)
                continue;
            EXPECT_GE(Rational(Integer(c.witness->u_sub.size())), eps * 24);
            EXPECT_GE(Rational(Integer(c.witness->w_sub.size())), eps * 24);
            EXPECT_GT(abs(density(g, c.witness->u_sub, c.witness->w_sub) - c.base_density), eps);
        }
    }
}

TEST(RegularPairProperty, MonotoneInEpsilon)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_graph(5, 0.5, seed + 500);
        const auto u = VertexSet::full(Side::A, 5);
        const auto w = VertexSet::full(Side::B, 5);
        auto small = check_regular_pair(g, u, w, {Rational(1, 5), Rational(0)}, exhaustive());
        if (small.epsilon_regular())
            for (Rational e : {Rational(1, 4), Rational(2, 5), Rational(3, 5), Rational(1)})
                EXPECT_TRUE(check_regular_pair(g, u, w, {e, Rational(0)}, exhaustive()).epsilon_regular());
    }
}

TEST(Typical, CompletePairAllTypical)
{
    auto g = complete(4);
    const std::vector<std::uint32_t> two{1, 3};
    auto r = typical_vertices(g, VertexSet::full(Side::A, 4), VertexSet::full(Side::B, 4), VertexSet::of(Side::B, 4, two),
                              {Rational(1, 4), Rational(1, 2)});
    EXPECT_EQ(r.typical.size(), 4u);
    EXPECT_TRUE(r.precondition_met);
}

TEST(Typical, EdgelessNoneTypical)
{
    auto g = BipartiteGraph::build(4, 4, {});
    auto r = typical_vertices(g, VertexSet::full(Side::A, 4), VertexSet::full(Side::B, 4), VertexSet::full(Side::B, 4),
                              {Rational(1, 4), Rational(1, 2)});
    EXPECT_TRUE(r.typical.empty());
}

TEST(Typical, SmallBPrimeFlagsPrecondition)
{
    auto g = complete(8);
    const std::vector<std::uint32_t> one{0};
    auto r = typical_vertices(g, VertexSet::full(Side::A, 8), VertexSet::full(Side::B, 8), VertexSet::of(Side::B, 8, one),
                              {Rational(1, 4), Rational(1, 2)});
    EXPECT_FALSE(r.precondition_met);
}

TEST(Typical, RandomPairFewAtypical)
{
    auto g = random_graph(64, 0.5, 0);
    VertexSet bp(Side::B, 64);
    for (std::uint32_t b = 0; b < 32; ++b)
        bp.insert(b);
    const RegularityParams p{Rational(1, 4), Rational(3, 8)};
    auto r = typical_vertices(g, VertexSet::full(Side::A, 64), VertexSet::full(Side::B, 64), bp, p);
    // direct recount
    std::size_t expect = 0;
    for (std::uint32_t a = 0; a < 64; ++a)
        if (at_least(degree_into(g, {Side::A, a}, bp), 32, p.d - p.epsilon))
            ++expect;
    EXPECT_EQ(r.typical.size(), expect);
    EXPECT_LE(64 - r.typical.size(), 16u);
}

TEST(Rebound, Identity)
{
    auto r = rebound_after_perturbation({Rational(1, 10), Rational(1, 2)}, 0, 0);
    EXPECT_EQ(r.epsilon, Rational(1, 10));
    EXPECT_EQ(r.d, Rational(1, 2));
}

TEST(Rebound, WorkedExample)
{
    auto r = rebound_after_perturbation({Rational(1, 10), Rational(1, 2)}, Rational(1, 100), 0);
    EXPECT_EQ(r.epsilon, Rational(4, 10));
    EXPECT_EQ(r.d, Rational(48, 100));
}

TEST(Rebound, ClampsEpsilon)
{
    auto r = rebound_after_perturbation({Rational(1, 10), Rational(1, 2)}, Rational(4, 100), Rational(4, 100));
    EXPECT_EQ(r.epsilon, Rational(1));
    EXPECT_EQ(r.d, Rational(34, 100));
}

TEST(Partition, PlantedBlocksCertify)
{
    auto g = planted_blocks_host(4, 8);
    auto b = build_regular_partition(g, {Rational(1, 4), Rational(1, 2)}, 4, 8);
    EXPECT_EQ(b.partition.k, 4u);
    EXPECT_EQ(b.refinements, 0u);
    for (std::uint32_t i = 0; i < 4; ++i) {
        EXPECT_TRUE(b.reduced.has_edge(i, i));
        EXPECT_EQ(b.reduced.certificate(i, i).base_density, Rational(1));
    }
}

TEST(Partition, RandomGraphCompleteReducedGraph)
{
    auto g = random_graph(256, 0.6, 1);
    CertifyOptions o;
    o.seed = 1;
    auto b = build_regular_partition(g, {Rational(1, 4), Rational(3, 10)}, 4, 16, o);
    EXPECT_EQ(b.partition.k, 4u);
    EXPECT_EQ(b.reduced.edges.size(), 16u);
    EXPECT_TRUE(b.partition.is_equipartition());
    b.partition.validate(g);
}

TEST(Partition, TwoDisjointBlocksGiveTwoEdges)
{
    auto g = planted_blocks_host(2, 128);
    auto b = build_regular_partition(g, {Rational(1, 4), Rational(1, 2)}, 2, 4);
    EXPECT_EQ(b.reduced.edges.size(), 2u);
    EXPECT_TRUE(b.reduced.has_edge(0, 0));
    EXPECT_TRUE(b.reduced.has_edge(1, 1));
}

TEST(Partition, ExhaustiveCrossCheckOnSmallPair)
{
    auto g = random_graph(48, 0.6, 1);
    ClusterPartition p = planted_partition(4, 12);
    CertifyOptions o;
    o.seed = 3;
    auto r = maximal_reduced_graph(g, p, {Rational(1, 2), Rational(3, 10)}, o);
    // the exhaustive verdict on pair (0, 0) agrees with the sampled one when it is regular
    const auto & c = r.certificate(0, 0);
    CertifyOptions ex = exhaustive();
    ex.enumeration_cap = std::uint64_t{1} << 26;
    auto e = check_regular_pair(g, p.a[0], p.b[0], {Rational(1, 2), Rational(3, 10)}, ex);
    if (!e.epsilon_regular())
        EXPECT_TRUE(e.witness.has_value());
    if (!c.epsilon_regular())
        EXPECT_FALSE(e.epsilon_regular());
}

TEST(ReducedGraph, EdgelessHasNoEdges)
{
    auto g = BipartiteGraph::build(16, 16, {});
    auto r = maximal_reduced_graph(g, planted_partition(2, 8), {Rational(1, 4), Rational(1, 10)});
    EXPECT_TRUE(r.edges.empty());
}

TEST(ReducedGraph, PlantedTwoBlocks)
{
    auto g = planted_blocks_host(2, 8);
    auto r = maximal_reduced_graph(g, planted_partition(2, 8), {Rational(1, 4), Rational(1, 2)});
    EXPECT_EQ(r.edges.size(), 2u);
}

TEST(SuperRegularize, PlantedUnchanged)
{
    auto g = planted_blocks_host(3, 8);
    auto p = planted_partition(3, 8);
    auto r = maximal_reduced_graph(g, p, {Rational(1, 4), Rational(1, 2)});
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> rstar{{0, 0}, {1, 1}, {2, 2}};
    SuperRegularizeOptions o;
    o.weakened = {Rational(1, 4), Rational(1, 2)};
    auto s = super_regularize(g, p, r, rstar, o);
    EXPECT_EQ(s.moved_low_degree, 0u);
    EXPECT_EQ(s.trimmed, 0u);
    EXPECT_EQ(s.partition.a, p.a);
}

TEST(SuperRegularize, IsolatedVertexMovesAndOneTrimmed)
{
    std::vector<Edge> e;
    for (std::uint32_t a = 1; a < 16; ++a)
        for (std::uint32_t b = 0; b < 16; ++b)
            e.emplace_back(a, b);
    auto g = BipartiteGraph::build(16, 16, e);
    auto p = planted_partition(1, 16);
    CertifyOptions co;
    co.seed = 5;
    auto r = maximal_reduced_graph(g, p, {Rational(1, 4), Rational(1, 2)}, co);
    ASSERT_TRUE(r.has_edge(0, 0));
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> rstar{{0, 0}};
    SuperRegularizeOptions o;
    o.weakened = {Rational(1, 4), Rational(1, 2)};
    o.certify = co;
    auto s = super_regularize(g, p, r, rstar, o);
    EXPECT_EQ(s.moved_low_degree, 1u);
    EXPECT_TRUE(s.partition.a0.contains(0));
    EXPECT_EQ(s.partition.a0.size(), 1u);
    EXPECT_EQ(s.partition.b0.size(), 1u);
    EXPECT_EQ(s.trimmed, 1u);
    EXPECT_EQ(s.certificates.front().verdict, Verdict::certified_super_regular);
}

TEST(SuperRegularize, RandomInstanceDegreeConditionAfterwards)
{
    auto g = random_graph(256, 0.6, 1);
    CertifyOptions o;
    o.seed = 1;
    auto b = build_regular_partition(g, {Rational(1, 4), Rational(3, 10)}, 4, 16, o);
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> rstar{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 0}};
    SuperRegularizeOptions so;
    so.weakened = {Rational(1, 2), Rational(1, 4)};
    so.exceptional_fraction = Rational(1, 4);
    so.certify = o;
    auto s = super_regularize(g, b.partition, b.reduced, rstar, so);
    const std::size_t before = b.partition.a[0].size();
    for (auto [i, j] : rstar) {
        s.partition.a[i].bits().for_each([&](std::size_t v) {
            EXPECT_TRUE(at_least(degree_into(g, {Side::A, static_cast<std::uint32_t>(v)}, s.partition.b[j]),
                                 s.partition.b[j].size(), so.weakened.d));
        });
    }
    EXPECT_LE(Rational(Integer(s.moved_low_degree)), Rational(1, 4) * Integer(before) * Integer(8));
}

TEST(SuperRegularize, RejectsRStarOutsideR)
{
    auto g = planted_blocks_host(2, 8);
    auto p = planted_partition(2, 8);
    auto r = maximal_reduced_graph(g, p, {Rational(1, 4), Rational(1, 2)});
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> rstar{{0, 1}};
    SuperRegularizeOptions o;
    EXPECT_THROW(super_regularize(g, p, r, rstar, o), PreconditionError);
}
