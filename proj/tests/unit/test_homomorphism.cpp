#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/generators.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/rng.hpp"
#include "oracles.hpp"

using namespace bipemb;

namespace {

BandwidthLabelling given(const Target & t)
{
    return bandwidth_labelling(t.graph, LabellingMode::given, t.order);
}

// independent recount of the linking set: positions within the first 2k·beta_n of each piece
std::size_t linking_count(const PiecePartition & p, std::size_t k, std::size_t beta_n)
{
    std::size_t c = 0;
    for (auto size : p.sizes)
        c += std::min(size, 2 * k * beta_n);
    return c;
}

std::uint32_t cluster_at(const CycleHomomorphism & hom, const BandwidthLabelling & l, std::size_t pos)
{
    const auto v = l.order[pos];
    return v.side == Side::A ? hom.f_a[v.index] : hom.f_b[v.index];
}

} // namespace

TEST(Labelling, PathNaturalOrder)
{
    // A0 B0 A1 B1 A2 B2
    const std::vector<Edge> e{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}};
    auto h = BipartiteGraph::build(3, 3, e);
    const std::vector<VertexId> order{{Side::A, 0}, {Side::B, 0}, {Side::A, 1}, {Side::B, 1}, {Side::A, 2}, {Side::B, 2}};
    EXPECT_EQ(bandwidth_labelling(h, LabellingMode::given, order).bandwidth, 1u);
}

TEST(Labelling, CycleZigZag)
{
    auto t = hamilton_cycle_target(4);
    EXPECT_EQ(given(t).bandwidth, 2u);
    EXPECT_EQ(oracle::bandwidth(t.graph), 2u);
}

TEST(Labelling, K33ExactMatchesOracle)
{
    auto h = planted_blocks_host(1, 3);
    auto l = bandwidth_labelling(h, LabellingMode::exact_small);
    EXPECT_EQ(l.bandwidth, oracle::bandwidth(h));
    EXPECT_EQ(l.bandwidth, 4u);
}

TEST(Labelling, RejectsNonPermutation)
{
    auto t = hamilton_cycle_target(3);
    auto order = t.order;
    order[1] = order[0];
    EXPECT_THROW(bandwidth_labelling(t.graph, LabellingMode::given, order), PreconditionError);
    order.pop_back();
    EXPECT_THROW(bandwidth_labelling(t.graph, LabellingMode::given, order), PreconditionError);
}

TEST(LabellingProperty, ExactIsOptimalAndHeuristicIsHonest)
{
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        std::vector<Edge> e;
        for (std::uint32_t a = 0; a < 4; ++a)
            for (std::uint32_t b = 0; b < 4; ++b)
                if (uniform_unit(rng) < 0.4)
                    e.emplace_back(a, b);
        auto h = BipartiteGraph::build(4, 4, e);
        auto exact = bandwidth_labelling(h, LabellingMode::exact_small);
        auto cm = bandwidth_labelling(h, LabellingMode::cuthill_mckee);
        const auto oracle_bw = e.empty() ? 0 : oracle::bandwidth(h);
        EXPECT_EQ(exact.bandwidth, oracle_bw) << "seed " << seed;
        EXPECT_EQ(cm.bandwidth, labelling_bandwidth(h, cm.order));
        EXPECT_GE(cm.bandwidth, exact.bandwidth);
    }
}

TEST(Pieces, EqualSizes)
{
    auto t = hamilton_cycle_target(4);
    auto p = partition_pieces(t.graph, given(t), 4);
    EXPECT_EQ(p.sizes, (std::vector<std::size_t>{2, 2, 2, 2}));
    EXPECT_EQ(p.x, (std::vector<std::size_t>{1, 1, 1, 1}));
    EXPECT_EQ(p.y, (std::vector<std::size_t>{1, 1, 1, 1}));
}

TEST(Pieces, LargerPiecesFirst)
{
    auto t = hamilton_cycle_target(5);
    auto p = partition_pieces(t.graph, given(t), 4);
    EXPECT_EQ(p.sizes, (std::vector<std::size_t>{3, 3, 2, 2}));
    EXPECT_EQ(p.starts, (std::vector<std::size_t>{0, 3, 6, 8}));
    EXPECT_EQ(p.piece_of(7), 2u);
}

TEST(Pieces, EllOutOfRange)
{
    auto t = hamilton_cycle_target(4);
    EXPECT_THROW(partition_pieces(t.graph, given(t), 9), PreconditionError);
    EXPECT_THROW(partition_pieces(t.graph, given(t), 0), PreconditionError);
}

TEST(PiecesProperty, CountsCoverSides)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto t = random_local_target(50 + seed, 5, 3, seed);
        const std::size_t ell = 3 + seed % 17;
        auto p = partition_pieces(t.graph, given(t), ell);
        EXPECT_EQ(std::accumulate(p.x.begin(), p.x.end(), std::size_t{0}), t.graph.size_a());
        EXPECT_EQ(std::accumulate(p.y.begin(), p.y.end(), std::size_t{0}), t.graph.size_b());
        const auto [lo, hi] = std::minmax_element(p.sizes.begin(), p.sizes.end());
        EXPECT_LE(*hi - *lo, 1u);
        for (std::size_t i = 0; i + 1 < ell; ++i)
            EXPECT_EQ(p.starts[i] + p.sizes[i], p.starts[i + 1]);
    }
}

TEST(Balance, SingleClusterViolatesSizeHypothesis)
{
    const std::vector<std::size_t> targets{100}, x{50, 50}, y{50, 50};
    EXPECT_THROW(balance_assignment(targets, x, y, Rational(1, 10)), PreconditionError);
}

TEST(Balance, LocallyBalancedPieces)
{
    const std::vector<std::size_t> targets(8, 1000), x(200, 40), y(200, 40);
    BalanceOptions o;
    o.seed = 0;
    auto phi = balance_assignment(targets, x, y, Rational(1, 10), o);
    EXPECT_EQ(phi.a_bar, phi.b_bar);
    EXPECT_TRUE(balance_bounds_hold(phi, targets, Rational(1, 10)));
    EXPECT_LE(phi.retries_used, 5u);
}

TEST(Balance, FailureCarriesViolations)
{
    // a single piece cannot be spread
    const std::vector<std::size_t> targets(8, 10), x{80}, y{80};
    BalanceOptions o;
    o.max_retries = 3;
    try {
        balance_assignment(targets, x, y, Rational(1, 4), o);
        FAIL();
    } catch (const BalanceFailed & e) {
        EXPECT_EQ(e.samples(), 4u);
        EXPECT_EQ(std::accumulate(e.violations().begin(), e.violations().end(), std::size_t{0}), 4u);
    }
}

TEST(BalanceProperty, ReturnedAssignmentsSatisfyBoundsAndIdentity)
{
    const std::size_t n = 1200, ell = 60;
    std::vector<std::size_t> targets{100, 120, 150, 130, 110, 140, 150, 100, 100, 100};
    ASSERT_EQ(std::accumulate(targets.begin(), targets.end(), std::size_t{0}), n);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        std::vector<std::size_t> x(ell), y(ell);
        for (std::size_t j = 0; j < ell; ++j) {
            x[j] = j % 2 ? 40 : 0;
            y[j] = 40 - x[j];
        }
        shuffle_in_place(x, rng);
        for (std::size_t j = 0; j < ell; ++j)
            y[j] = 40 - x[j];
        BalanceOptions o;
        o.seed = seed;
        o.max_retries = 200;
        const Rational xi(1, 8);
        auto phi = balance_assignment(targets, x, y, xi, o);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            std::size_t a = 0, b = 0;
            for (std::size_t j = 0; j < ell; ++j)
                if (phi.phi[j] == i) {
                    a += x[j];
                    b += y[j];
                }
            EXPECT_EQ(a, phi.a_bar[i]);
            EXPECT_EQ(b, phi.b_bar[i]);
            EXPECT_LT(Rational(Integer(a)), Integer(targets[i]) + xi * Integer(n));
            EXPECT_LT(Rational(Integer(b)), Integer(targets[i]) + xi * Integer(n));
            EXPECT_EQ(Rational(Integer(a)) - Integer(b), Rational(Integer(3 * n), Integer(ell)) * phi.d[i]);
        }
    }
}

TEST(FailureBound, DefaultPieceCountMakesBoundNontrivial)
{
    EXPECT_EQ(lemma_piece_count(1, Rational(1, 4)), Integer(16000));
    EXPECT_LT(failure_probability_bound(1, Rational(1, 4), 16000).raw, 1.0);
}

TEST(FailureBound, TinyEllIsVacuous)
{
    auto b = failure_probability_bound(3, Rational(1, 4), 1);
    EXPECT_GT(b.raw, 1.0);
    EXPECT_NEAR(b.raw, 6 * std::exp(-1.0 / 32) + 6 * std::exp(-1.0 / 1152), 1e-12);
    EXPECT_EQ(b.clamped, 1.0);
}

TEST(FailureBound, Informational)
{
    auto b = failure_probability_bound(8, Rational(1, 20), 200);
    EXPECT_GT(b.raw, 0.0);
    EXPECT_EQ(b.clamped, std::min(b.raw, 1.0));
}

TEST(CycleHom, ConstantPhi)
{
    auto t = hamilton_cycle_target(32);
    auto l = given(t);
    auto p = partition_pieces(t.graph, l, 4);
    const std::vector<std::size_t> phi(4, 2);
    auto hom = build_cycle_homomorphism(t.graph, l, p, phi, 2, 3);
    for (auto c : hom.f_a)
        EXPECT_EQ(c, 2u);
    for (auto c : hom.f_b)
        EXPECT_EQ(c, 2u);
    EXPECT_EQ(hom.s_size(), 4u * 2 * 3 * 2);
    const std::vector<std::size_t> targets{30, 1, 1};
    auto r = verify_cycle_homomorphism(t.graph, hom, targets, Rational(1, 100));
    EXPECT_TRUE(r.homomorphism);
    EXPECT_TRUE(r.h2);
    EXPECT_FALSE(r.h3);
    ASSERT_TRUE(r.h3_violation.has_value());
    EXPECT_EQ(*r.h3_violation, 2u);
}

TEST(CycleHom, LongCycleIdentityPhi)
{
    // C_128 zig-zag, k = 8, beta_n = 2: pieces must hold (2k+1)·2 = 34 positions, so ℓ = 3
    auto t = hamilton_cycle_target(64);
    auto l = given(t);
    auto p = partition_pieces(t.graph, l, 3);
    const std::vector<std::size_t> phi{0, 1, 2};
    auto hom = build_cycle_homomorphism(t.graph, l, p, phi, 2, 8);
    auto r = verify_cycle_homomorphism(t.graph, hom, std::vector<std::size_t>(8, 8), Rational(1));
    EXPECT_TRUE(r.homomorphism);
    EXPECT_TRUE(r.h2);
    EXPECT_EQ(hom.s_size(), 3u * 2 * 8 * 2);
    // piece 2 starts at 43: block 1 (positions 43, 44) sends A to A_1 and B to B_2, block 2 sends both to index 2
    for (std::size_t pos = 43; pos < 45; ++pos)
        EXPECT_EQ(cluster_at(hom, l, pos), l.order[pos].side == Side::A ? 0u : 1u);
    for (std::size_t pos = 45; pos < 47; ++pos)
        EXPECT_EQ(cluster_at(hom, l, pos), 1u);
    EXPECT_EQ(cluster_at(hom, l, 47), 1u);
}

TEST(CycleHom, JumpOfThree)
{
    auto t = hamilton_cycle_target(60);
    auto l = given(t);
    auto p = partition_pieces(t.graph, l, 2);
    const std::vector<std::size_t> phi{6, 1}; // (1 − 6) mod 8 = 3
    auto hom = build_cycle_homomorphism(t.graph, l, p, phi, 2, 8);
    auto r = verify_cycle_homomorphism(t.graph, hom, std::vector<std::size_t>(8, 8), Rational(1));
    EXPECT_TRUE(r.homomorphism);
    EXPECT_TRUE(r.h2);
    // the second piece climbs 6 → 7 → 0 → 1 in its first six blocks
    for (std::size_t j = 1; j <= 6; ++j)
        for (std::size_t pos = 60 + 2 * (j - 1); pos < 60 + 2 * j; ++pos) {
            const std::size_t climb = l.order[pos].side == Side::A ? j / 2 : (j + 1) / 2;
            EXPECT_EQ(cluster_at(hom, l, pos), (6 + climb) % 8) << "position " << pos;
        }
    EXPECT_EQ(cluster_at(hom, l, 72), 1u);
}

TEST(CycleHom, PreconditionsChecked)
{
    auto t = hamilton_cycle_target(16);
    auto l = given(t);
    auto p = partition_pieces(t.graph, l, 4);
    const std::vector<std::size_t> phi{0, 1, 2, 3};
    EXPECT_THROW(build_cycle_homomorphism(t.graph, l, p, phi, 1, 4), PreconditionError); // bandwidth 2 > 1
    EXPECT_THROW(build_cycle_homomorphism(t.graph, l, p, phi, 2, 4), PreconditionError); // 18 > 8
    const std::vector<std::size_t> bad{0, 1, 9, 3};
    EXPECT_THROW(build_cycle_homomorphism(t.graph, l, p, bad, 2, 1), PreconditionError);
}

TEST(VerifyHom, InjectedFaultNamesEdge)
{
    auto t = hamilton_cycle_target(64);
    auto l = given(t);
    auto p = partition_pieces(t.graph, l, 3);
    const std::vector<std::size_t> phi{0, 1, 2};
    auto hom = build_cycle_homomorphism(t.graph, l, p, phi, 2, 8);
    hom.f_a[10] = 5;
    auto r = verify_cycle_homomorphism(t.graph, hom, std::vector<std::size_t>(8, 8), Rational(1));
    EXPECT_FALSE(r.homomorphism);
    ASSERT_TRUE(r.bad_edge.has_value());
    EXPECT_EQ(r.bad_edge->first, 10u);
    EXPECT_FALSE(r.all());
}

TEST(CycleHomProperty, RandomInputsVerify)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        const std::size_t k = 2 + uniform_below(rng, 6);
        const std::size_t window = 1 + 2 * uniform_below(rng, 2);
        const std::size_t ell = 1 + uniform_below(rng, 5);
        const std::size_t beta = window;
        const std::size_t n = (ell * (2 * k + 1) * beta + 1) / 2 + uniform_below(rng, 40);
        auto t = random_local_target(n, window, 3, seed);
        auto l = given(t);
        auto p = partition_pieces(t.graph, l, ell);
        std::vector<std::size_t> phi(ell);
        for (auto & c : phi)
            c = uniform_below(rng, k);
        auto hom = build_cycle_homomorphism(t.graph, l, p, phi, std::max(beta, l.bandwidth), k);
        auto r = verify_cycle_homomorphism(t.graph, hom, std::vector<std::size_t>(k, n), Rational(1));
        EXPECT_TRUE(r.homomorphism) << "seed " << seed;
        EXPECT_TRUE(r.h2) << "seed " << seed;
        EXPECT_EQ(hom.s_size(), linking_count(p, k, std::max(beta, l.bandwidth)));
        EXPECT_EQ(hom.s_size(), 2 * k * ell * std::max(beta, l.bandwidth));
    }
}
