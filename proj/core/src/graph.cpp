#include "bipemb/graph.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bipemb/error.hpp"

namespace bipemb {

VertexSet VertexSet::full(Side side, std::size_t side_size)
{
    VertexSet s(side, side_size);
    s.members_.set_all();
    return s;
}

VertexSet VertexSet::of(Side side, std::size_t side_size, std::span<const std::uint32_t> indices)
{
    VertexSet s(side, side_size);
    for (auto i : indices)
        s.insert(i);
    return s;
}

void VertexSet::insert(std::uint32_t i)
{
    if (i >= members_.size())
        throw PreconditionError("vertex " + std::to_string(i) + " outside side of size " + std::to_string(members_.size()));
    members_.set(i);
}

void VertexSet::erase(std::uint32_t i)
{
    if (i >= members_.size())
        throw PreconditionError("vertex " + std::to_string(i) + " outside side of size " + std::to_string(members_.size()));
    members_.reset(i);
}

std::vector<std::uint32_t> VertexSet::to_vector() const
{
    std::vector<std::uint32_t> out;
    out.reserve(size());
    members_.for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
    return out;
}

BipartiteGraph BipartiteGraph::build(std::size_t size_a, std::size_t size_b, std::span<const Edge> edges)
{
    BipartiteGraph g;
    g.adj_a_.assign(size_a, DynBitset(size_b));
    g.adj_b_.assign(size_b, DynBitset(size_a));
    for (const auto & [a, b] : edges) {
        if (a >= size_a || b >= size_b)
            throw PreconditionError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range for sides " +
                                    std::to_string(size_a) + "+" + std::to_string(size_b));
        if (!g.adj_a_[a].test(b)) {
            g.adj_a_[a].set(b);
            g.adj_b_[b].set(a);
            ++g.edge_count_;
        }
    }
    return g;
}

std::size_t BipartiteGraph::min_degree() const
{
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto & row : adj_a_)
        best = std::min(best, row.count());
    for (const auto & row : adj_b_)
        best = std::min(best, row.count());
    return best == std::numeric_limits<std::size_t>::max() ? 0 : best;
}

std::size_t BipartiteGraph::max_degree() const
{
    std::size_t best = 0;
    for (const auto & row : adj_a_)
        best = std::max(best, row.count());
    for (const auto & row : adj_b_)
        best = std::max(best, row.count());
    return best;
}

std::vector<Edge> BipartiteGraph::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::uint32_t a = 0; a < adj_a_.size(); ++a)
        adj_a_[a].for_each([&](std::size_t b) { out.emplace_back(a, static_cast<std::uint32_t>(b)); });
    return out;
}

namespace {

void require_opposite(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w)
{
    if (u.side() == w.side())
        throw PreconditionError("vertex sets lie on the same side");
    if (u.universe() != g.side_size(u.side()) || w.universe() != g.side_size(w.side()))
        throw PreconditionError("vertex set universe does not match graph side size");
}

} // namespace

std::size_t edge_count_between(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w)
{
    require_opposite(g, u, w);
    std::size_t e = 0;
    u.bits().for_each([&](std::size_t i) {
        e += g.neighbours({u.side(), static_cast<std::uint32_t>(i)}).intersect_count(w.bits());
    });
    return e;
}

Rational density(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w)
{
    require_opposite(g, u, w);
    const auto nu = u.size(), nw = w.size();
    if (nu == 0 || nw == 0)
        throw PreconditionError("density undefined for an empty vertex set");
    return Rational(Integer(edge_count_between(g, u, w)), Integer(nu) * Integer(nw));
}

std::size_t degree_into(const BipartiteGraph & g, VertexId v, const VertexSet & w)
{
    if (v.side == w.side())
        throw PreconditionError("degree_into: target set lies on the vertex's own side");
    if (w.universe() != g.side_size(w.side()))
        throw PreconditionError("degree_into: vertex set universe does not match graph side size");
    return g.neighbours(v).intersect_count(w.bits());
}

} // namespace bipemb
