#include "bipemb/generators.hpp"

#include <algorithm>
#include <string>

#include "bipemb/error.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/rng.hpp"

namespace bipemb {

BipartiteGraph random_min_degree_host(std::size_t n, const Rational & gamma, std::uint64_t seed, const Rational & slack)
{
    if (gamma <= 0 || gamma >= Rational(1, 2))
        throw PreconditionError("random host needs 0 < gamma < 1/2, got " + to_string(gamma));
    if (n == 0)
        throw PreconditionError("random host needs n >= 1");
    const Rational threshold = (Rational(1, 2) + gamma) * Integer(n);
    const auto need = static_cast<std::size_t>(ceil(threshold));
    const double p = std::min(1.0, to_double(Rational(1, 2) + gamma + slack));

    Rng rng(derive_seed(seed, 0x40));
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            adj[a][b] = uniform_unit(rng) < p;

    // Patch rows, then columns; adding edges never lowers a degree.
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<std::size_t> missing;
        for (std::size_t b = 0; b < n; ++b)
            if (!adj[a][b])
                missing.push_back(b);
        const std::size_t deg = n - missing.size();
        if (deg < need) {
            partial_shuffle(missing, need - deg, rng);
            for (std::size_t t = 0; t < need - deg; ++t)
                adj[a][missing[t]] = 1;
        }
    }
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<std::size_t> missing;
        for (std::size_t a = 0; a < n; ++a)
            if (!adj[a][b])
                missing.push_back(a);
        const std::size_t deg = n - missing.size();
        if (deg < need) {
            partial_shuffle(missing, need - deg, rng);
            for (std::size_t t = 0; t < need - deg; ++t)
                adj[missing[t]][b] = 1;
        }
    }
    std::vector<Edge> edges;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (adj[a][b])
                edges.emplace_back(a, b);
    auto g = BipartiteGraph::build(n, n, edges);
    if (g.min_degree() < need)
        throw StageError("generate", "internal error: patched host misses its minimum degree");
    return g;
}

BipartiteGraph planted_blocks_host(std::size_t k, std::size_t m)
{
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                edges.emplace_back(static_cast<std::uint32_t>(i * m + a), static_cast<std::uint32_t>(i * m + b));
    return BipartiteGraph::build(k * m, k * m, edges);
}

BipartiteGraph planted_cycle_host(std::size_t k, std::size_t m, double p, std::uint64_t seed)
{
    if (k == 0 || m == 0)
        throw PreconditionError("planted cycle host needs k, m >= 1");
    Rng rng(derive_seed(seed, 0x41));
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t next = (i + 1) % k;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                if (uniform_unit(rng) < p)
                    edges.emplace_back(static_cast<std::uint32_t>(i * m + a), static_cast<std::uint32_t>(i * m + b));
                if (k > 1 && uniform_unit(rng) < p)
                    edges.emplace_back(static_cast<std::uint32_t>(i * m + a), static_cast<std::uint32_t>(next * m + b));
            }
    }
    return BipartiteGraph::build(k * m, k * m, edges);
}

ClusterPartition planted_partition(std::size_t k, std::size_t m)
{
    ClusterPartition p;
    p.k = k;
    p.a0 = VertexSet(Side::A, k * m);
    p.b0 = VertexSet(Side::B, k * m);
    for (std::size_t i = 0; i < k; ++i) {
        VertexSet a(Side::A, k * m), b(Side::B, k * m);
        for (std::size_t t = 0; t < m; ++t) {
            a.insert(static_cast<std::uint32_t>(i * m + t));
            b.insert(static_cast<std::uint32_t>(i * m + t));
        }
        p.a.push_back(std::move(a));
        p.b.push_back(std::move(b));
    }
    return p;
}

namespace {

// Builds a target from global vertices 0..N-1 with a proper 2-colouring. Colour 0 goes to side A;
// side indices follow global order. `order` lists global ids by position.
Target from_global(const std::vector<int> & colour, const std::vector<std::pair<std::size_t, std::size_t>> & edges,
                   const std::vector<std::size_t> & order)
{
    std::vector<VertexId> id(colour.size());
    std::uint32_t na = 0, nb = 0;
    for (std::size_t v = 0; v < colour.size(); ++v)
        id[v] = colour[v] == 0 ? VertexId{Side::A, na++} : VertexId{Side::B, nb++};
    if (na != nb)
        throw PreconditionError("target family produced unbalanced sides (" + std::to_string(na) + " vs " +
                                std::to_string(nb) + ")");
    std::vector<Edge> es;
    for (auto [u, v] : edges) {
        if (colour[u] == colour[v])
            throw PreconditionError("target family is not bipartite for these parameters");
        const auto a = colour[u] == 0 ? id[u] : id[v];
        const auto b = colour[u] == 0 ? id[v] : id[u];
        es.emplace_back(a.index, b.index);
    }
    Target t;
    t.graph = BipartiteGraph::build(na, nb, es);
    for (auto g : order)
        t.order.push_back(id[g]);
    t.bandwidth = labelling_bandwidth(t.graph, t.order);
    return t;
}

std::vector<std::size_t> identity(std::size_t n)
{
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i;
    return v;
}

} // namespace

Target hamilton_cycle_target(std::size_t n)
{
    if (n < 2)
        throw PreconditionError("hamilton-cycle target needs n >= 2");
    const std::size_t len = 2 * n;
    std::vector<int> colour(len);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < len; ++v) {
        colour[v] = static_cast<int>(v % 2);
        edges.emplace_back(v, (v + 1) % len);
    }
    // Zig-zag: 0, 1, 2n−1, 2, 2n−2, ...
    std::vector<std::size_t> order{0};
    for (std::size_t lo = 1, hi = len - 1; lo <= hi; ++lo, --hi) {
        order.push_back(lo);
        if (lo != hi)
            order.push_back(hi);
    }
    return from_global(colour, edges, order);
}

Target ladder_target(std::size_t n)
{
    if (n < 1)
        throw PreconditionError("ladder target needs n >= 1");
    // Rung r holds globals 2r and 2r+1.
    std::vector<int> colour(2 * n);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t r = 0; r < n; ++r) {
        colour[2 * r] = static_cast<int>(r % 2);
        colour[2 * r + 1] = static_cast<int>((r + 1) % 2);
        edges.emplace_back(2 * r, 2 * r + 1);
        if (r + 1 < n) {
            edges.emplace_back(2 * r, 2 * r + 2);
            edges.emplace_back(2 * r + 1, 2 * r + 3);
        }
    }
    return from_global(colour, edges, identity(2 * n));
}

Target moebius_ladder_target(std::size_t n)
{
    if (n < 3 || n % 2 == 0)
        throw PreconditionError("moebius-ladder target needs odd n >= 3 to be bipartite");
    const std::size_t len = 2 * n;
    std::vector<int> colour(len);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < len; ++v) {
        colour[v] = static_cast<int>(v % 2);
        edges.emplace_back(v, (v + 1) % len);
        if (v < n)
            edges.emplace_back(v, v + n);
    }
    // Rungs r = {r, r + n}, folded: 0, n−1, 1, n−2, ...
    std::vector<std::size_t> order;
    for (std::size_t lo = 0, hi = n - 1; lo <= hi && hi < n; ++lo, --hi) {
        order.push_back(lo);
        order.push_back(lo + n);
        if (lo != hi) {
            order.push_back(hi);
            order.push_back(hi + n);
        }
        if (hi == 0)
            break;
    }
    return from_global(colour, edges, order);
}

Target grid_target(std::size_t w, std::size_t h)
{
    if (w == 0 || h == 0 || (w * h) % 2 != 0)
        throw PreconditionError("grid target needs w*h even and positive");
    std::vector<int> colour(w * h);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t v = r * w + c;
            colour[v] = static_cast<int>((r + c) % 2);
            if (c + 1 < w)
                edges.emplace_back(v, v + 1);
            if (r + 1 < h)
                edges.emplace_back(v, v + w);
        }
    return from_global(colour, edges, identity(w * h));
}

Target random_local_target(std::size_t n, std::size_t window, std::size_t Delta, std::uint64_t seed, double p)
{
    if (n == 0 || window == 0 || Delta == 0)
        throw PreconditionError("random-local target needs n, window, Delta >= 1");
    const std::size_t len = 2 * n;
    Rng rng(derive_seed(seed, 0x42));
    std::vector<int> colour(len);
    std::vector<std::size_t> deg(len, 0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < len; ++v)
        colour[v] = static_cast<int>(v % 2);
    for (std::size_t u = 0; u < len; ++u)
        for (std::size_t d = 1; d <= window && u + d < len; d += 2) {
            const std::size_t v = u + d;
            if (deg[u] < Delta && deg[v] < Delta && uniform_unit(rng) < p) {
                edges.emplace_back(u, v);
                ++deg[u];
                ++deg[v];
            }
        }
    return from_global(colour, edges, identity(len));
}

Target c4_union_target(std::size_t n)
{
    if (n < 2 || n % 2 != 0)
        throw PreconditionError("c4-union target needs even n >= 2");
    const std::size_t len = 2 * n;
    std::vector<int> colour(len);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < len; ++v)
        colour[v] = static_cast<int>(v % 2);
    for (std::size_t base = 0; base < len; base += 4) {
        edges.emplace_back(base, base + 1);
        edges.emplace_back(base + 1, base + 2);
        edges.emplace_back(base + 2, base + 3);
        edges.emplace_back(base + 3, base);
    }
    return from_global(colour, edges, identity(len));
}

} // namespace bipemb
