#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bipemb/bitset.hpp"
#include "bipemb/rational.hpp"

namespace bipemb {

enum class Side : std::uint8_t { A, B };

constexpr Side opposite(Side s) noexcept { return s == Side::A ? Side::B : Side::A; }
constexpr const char * side_name(Side s) noexcept { return s == Side::A ? "A" : "B"; }

/// A vertex of a bipartite graph: its side and its index within that side.
struct VertexId {
    Side side = Side::A;
    std::uint32_t index = 0;

    friend bool operator==(const VertexId &, const VertexId &) = default;
    friend auto operator<=>(const VertexId &, const VertexId &) = default;
};

using Edge = std::pair<std::uint32_t, std::uint32_t>; ///< (A-index, B-index)

/// A subset of one side of a bipartite graph.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(Side side, std::size_t side_size) : side_(side), members_(side_size) {}

    static VertexSet full(Side side, std::size_t side_size);
    static VertexSet of(Side side, std::size_t side_size, std::span<const std::uint32_t> indices);

    Side side() const noexcept { return side_; }
    std::size_t universe() const noexcept { return members_.size(); }
    std::size_t size() const noexcept { return members_.count(); }
    bool empty() const noexcept { return members_.none(); }

    bool contains(std::uint32_t i) const noexcept { return i < members_.size() && members_.test(i); }
    void insert(std::uint32_t i);
    void erase(std::uint32_t i);

    const DynBitset & bits() const noexcept { return members_; }
    std::vector<std::uint32_t> to_vector() const;

    friend bool operator==(const VertexSet &, const VertexSet &) = default;

private:
    Side side_ = Side::A;
    DynBitset members_;
};

/// Bipartite graph on sides A (size_a vertices) and B (size_b vertices) with
/// bitset adjacency stored in both directions. Immutable after construction.
class BipartiteGraph {
public:
    BipartiteGraph() = default;

    /// Builds the graph; duplicate edges collapse. Throws PreconditionError naming
    /// the first out-of-range edge.
    static BipartiteGraph build(std::size_t size_a, std::size_t size_b, std::span<const Edge> edges);

    std::size_t size_a() const noexcept { return adj_a_.size(); }
    std::size_t size_b() const noexcept { return adj_b_.size(); }
    std::size_t side_size(Side s) const noexcept { return s == Side::A ? size_a() : size_b(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool balanced() const noexcept { return size_a() == size_b(); }

    bool has_edge(std::uint32_t a, std::uint32_t b) const noexcept
    {
        return a < size_a() && b < size_b() && adj_a_[a].test(b);
    }

    /// Neighbours of v, as a bitset over the opposite side.
    const DynBitset & neighbours(VertexId v) const { return v.side == Side::A ? adj_a_.at(v.index) : adj_b_.at(v.index); }
    std::size_t degree(VertexId v) const { return neighbours(v).count(); }

    std::size_t min_degree() const;
    std::size_t max_degree() const;

    /// All edges, sorted by (A-index, B-index).
    std::vector<Edge> edges() const;

private:
    std::vector<DynBitset> adj_a_;
    std::vector<DynBitset> adj_b_;
    std::size_t edge_count_ = 0;
};

/// e(U, W) for U and W on opposite sides.
std::size_t edge_count_between(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w);

/// e(U, W) / (|U| |W|) exactly. Throws PreconditionError on empty sets or side mismatch.
Rational density(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w);

/// |N(v) ∩ W|. Throws PreconditionError when W is on v's own side.
std::size_t degree_into(const BipartiteGraph & g, VertexId v, const VertexSet & w);

} // namespace bipemb
