#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bipemb {

/// Maximum-cardinality matching in a bipartite graph (Hopcroft–Karp).
/// Left vertices are 0..left-1, right vertices 0..right-1.
class HopcroftKarp {
public:
    static constexpr std::uint32_t unmatched = ~std::uint32_t{0};

    HopcroftKarp(std::size_t left, std::size_t right);

    void add_edge(std::uint32_t l, std::uint32_t r);

    /// Runs to a maximum matching and returns its size.
    std::size_t solve();

    const std::vector<std::uint32_t> & mate_of_left() const noexcept { return mate_left_; }
    const std::vector<std::uint32_t> & mate_of_right() const noexcept { return mate_right_; }

    /// After solve(): left vertices reachable from unmatched left vertices by alternating paths.
    /// When the matching is not left-perfect this set has fewer neighbours than members (Hall violator).
    std::vector<std::uint32_t> hall_violator() const;

    /// Neighbourhood of a set of left vertices.
    std::vector<std::uint32_t> neighbourhood(const std::vector<std::uint32_t> & left_set) const;

private:
    bool bfs();
    bool dfs(std::uint32_t l);

    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::uint32_t> mate_left_;
    std::vector<std::uint32_t> mate_right_;
    std::vector<std::uint32_t> layer_;
    std::vector<std::size_t> cursor_;
    std::size_t right_;
};

} // namespace bipemb
