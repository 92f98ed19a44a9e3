#include "bipemb/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "bipemb/error.hpp"

namespace bipemb {

namespace {

// Splits a line into whitespace-separated tokens after stripping a `#` comment.
std::vector<std::string> tokens(const std::string & line)
{
    std::istringstream ss(line.substr(0, line.find('#')));
    std::vector<std::string> out;
    for (std::string t; ss >> t;)
        out.push_back(t);
    return out;
}

std::size_t number(const std::string & text, std::size_t line)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(line, "expected a non-negative integer, got '" + text + "'");
    return value;
}

// Next non-blank, non-comment line; false at end of input.
bool next_line(std::istream & in, std::size_t & line_no, std::vector<std::string> & out)
{
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            throw ParseError(line_no, "CR line ending; files must use LF");
        out = tokens(line);
        if (!out.empty())
            return true;
    }
    return false;
}

std::ifstream open_in(const std::filesystem::path & path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path & path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

} // namespace

BipartiteGraph read_graph(std::istream & in)
{
    std::size_t line_no = 0;
    std::vector<std::string> t;
    if (!next_line(in, line_no, t))
        throw ParseError(line_no, "empty graph file");
    if (t.size() != 4 || t[0] != "bipartite")
        throw ParseError(line_no, "header must be 'bipartite <nA> <nB> <m>'");
    const std::size_t na = number(t[1], line_no);
    const std::size_t nb = number(t[2], line_no);
    const std::size_t m = number(t[3], line_no);
    std::set<Edge> seen;
    std::vector<Edge> edges;
    while (next_line(in, line_no, t)) {
        if (t.size() != 2)
            throw ParseError(line_no, "edge line must be '<a> <b>'");
        const std::size_t a = number(t[0], line_no);
        const std::size_t b = number(t[1], line_no);
        if (a >= na || b >= nb)
            throw ParseError(line_no, "edge (" + t[0] + ", " + t[1] + ") out of range");
        const Edge e{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
        if (!seen.insert(e).second)
            throw ParseError(line_no, "duplicate edge (" + t[0] + ", " + t[1] + ")");
        edges.push_back(e);
    }
    if (edges.size() != m)
        throw ParseError(line_no, "header declares " + std::to_string(m) + " edges, found " +
                                      std::to_string(edges.size()));
    return BipartiteGraph::build(na, nb, edges);
}

void write_graph(std::ostream & out, const BipartiteGraph & g)
{
    out << "bipartite " << g.size_a() << ' ' << g.size_b() << ' ' << g.edge_count() << '\n';
    for (auto [a, b] : g.edges())
        out << a << ' ' << b << '\n';
}

BipartiteGraph load_graph(const std::filesystem::path & path)
{
    auto in = open_in(path);
    return read_graph(in);
}

void save_graph(const std::filesystem::path & path, const BipartiteGraph & g)
{
    auto out = open_out(path);
    write_graph(out, g);
}

std::size_t global_id(VertexId v)
{
    return 2 * static_cast<std::size_t>(v.index) + (v.side == Side::A ? 0 : 1);
}

VertexId from_global_id(std::size_t g)
{
    return {g % 2 == 0 ? Side::A : Side::B, static_cast<std::uint32_t>(g / 2)};
}

std::vector<VertexId> read_labelling(std::istream & in, std::size_t n)
{
    std::size_t line_no = 0;
    std::vector<std::string> t;
    std::vector<std::size_t> pos, lines;
    while (next_line(in, line_no, t)) {
        if (t.size() != 1)
            throw ParseError(line_no, "labelling line must hold one position");
        const std::size_t p = number(t[0], line_no);
        if (p >= 2 * n)
            throw ParseError(line_no, "position " + t[0] + " out of range");
        pos.push_back(p);
        lines.push_back(line_no);
    }
    if (pos.size() != 2 * n)
        throw ParseError(line_no, "labelling has " + std::to_string(pos.size()) + " entries, expected " +
                                      std::to_string(2 * n));
    std::vector<VertexId> order(2 * n);
    std::vector<char> taken(2 * n, 0);
    for (std::size_t g = 0; g < pos.size(); ++g) {
        if (taken[pos[g]])
            throw ParseError(lines[g], "labelling repeats position " + std::to_string(pos[g]));
        taken[pos[g]] = 1;
        order[pos[g]] = from_global_id(g);
    }
    return order;
}

void write_labelling(std::ostream & out, const std::vector<VertexId> & order)
{
    std::vector<std::size_t> pos(order.size());
    for (std::size_t p = 0; p < order.size(); ++p)
        pos.at(global_id(order[p])) = p;
    out << "# line g holds the position of global vertex g (A i = 2i, B j = 2j+1)\n";
    for (auto p : pos)
        out << p << '\n';
}

std::vector<VertexId> load_labelling(const std::filesystem::path & path, std::size_t n)
{
    auto in = open_in(path);
    return read_labelling(in, n);
}

void save_labelling(const std::filesystem::path & path, const std::vector<VertexId> & order)
{
    auto out = open_out(path);
    write_labelling(out, order);
}

PieceCounts read_pieces(std::istream & in)
{
    std::size_t line_no = 0;
    std::vector<std::string> t;
    PieceCounts p;
    while (next_line(in, line_no, t)) {
        if (t.size() != 2)
            throw ParseError(line_no, "piece line must be '<x> <y>'");
        p.x.push_back(number(t[0], line_no));
        p.y.push_back(number(t[1], line_no));
    }
    if (p.x.empty())
        throw ParseError(line_no, "no pieces");
    return p;
}

void write_pieces(std::ostream & out, const PieceCounts & pieces)
{
    for (std::size_t j = 0; j < pieces.x.size(); ++j)
        out << pieces.x[j] << ' ' << pieces.y[j] << '\n';
}

} // namespace bipemb
