#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bipemb/graph.hpp"

namespace bipemb {

/// ".bg" format: `bipartite <nA> <nB> <m>`, then m lines `<a> <b>`. `#` starts a comment.
/// Duplicate edges, bad counts and out-of-range indices throw ParseError with the line number.
BipartiteGraph read_graph(std::istream & in);
void write_graph(std::ostream & out, const BipartiteGraph & g);

BipartiteGraph load_graph(const std::filesystem::path & path);
void save_graph(const std::filesystem::path & path, const BipartiteGraph & g);

/// Global id of a vertex of a balanced graph: A i → 2i, B j → 2j + 1.
std::size_t global_id(VertexId v);
VertexId from_global_id(std::size_t g);

/// Labelling file: line g (after comments) holds the position of global id g.
/// Reading checks it is a permutation of 0..2n−1 and returns the order by position.
std::vector<VertexId> read_labelling(std::istream & in, std::size_t n);
void write_labelling(std::ostream & out, const std::vector<VertexId> & order);

std::vector<VertexId> load_labelling(const std::filesystem::path & path, std::size_t n);
void save_labelling(const std::filesystem::path & path, const std::vector<VertexId> & order);

/// Pieces file: one `x y` line per piece (X- and Y-vertex counts).
struct PieceCounts {
    std::vector<std::size_t> x;
    std::vector<std::size_t> y;
};

PieceCounts read_pieces(std::istream & in);
void write_pieces(std::ostream & out, const PieceCounts & pieces);

} // namespace bipemb
