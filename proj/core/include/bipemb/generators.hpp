#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bipemb/graph.hpp"
#include "bipemb/rational.hpp"
#include "bipemb/regularity.hpp"

namespace bipemb {

/// Balanced host with δ ≥ ⌈(1/2 + γ)n⌉: each edge independently with probability
/// 1/2 + γ + slack (capped at 1), then deficient vertices get random extra edges.
/// Throws PreconditionError unless 0 < γ < 1/2.
BipartiteGraph random_min_degree_host(std::size_t n, const Rational & gamma, std::uint64_t seed,
                                      const Rational & slack = Rational(1, 20));

/// k disjoint copies of K_{m,m}; A-block i holds indices [im, (i+1)m).
BipartiteGraph planted_blocks_host(std::size_t k, std::size_t m);

/// Clusters A_i, B_i of size m (A_i = [im, (i+1)m)) with independent random edges of
/// probability p on the pairs (A_i, B_i) and (A_i, B_{i+1}), indices mod k.
BipartiteGraph planted_cycle_host(std::size_t k, std::size_t m, double p, std::uint64_t seed);

/// The clusters of planted_cycle_host / planted_blocks_host as a partition.
ClusterPartition planted_partition(std::size_t k, std::size_t m);

/// A target graph with the labelling it was generated under.
struct Target {
    BipartiteGraph graph;
    std::vector<VertexId> order;
    std::size_t bandwidth = 0; ///< computed from the edges, never assumed
};

/// C_{2n} under the zig-zag labelling (bandwidth 2 for n ≥ 2).
Target hamilton_cycle_target(std::size_t n);

/// Ladder P_n × K_2 on 2n vertices, rung by rung.
Target ladder_target(std::size_t n);

/// Möbius ladder: C_{2n} plus chords i ~ i + n. Bipartite only for odd n. Folded rung order.
Target moebius_ladder_target(std::size_t n);

/// w × h grid in row-major order; needs w·h even.
Target grid_target(std::size_t w, std::size_t h);

/// 2n positions coloured by parity; each pair at odd distance ≤ window is an edge with
/// probability p while both ends have degree < Delta.
Target random_local_target(std::size_t n, std::size_t window, std::size_t Delta, std::uint64_t seed, double p = 0.5);

/// n/2 disjoint 4-cycles (n even), each on four consecutive positions (bandwidth 3).
Target c4_union_target(std::size_t n);

} // namespace bipemb
