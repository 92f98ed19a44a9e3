#include "bipemb/homomorphism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_set>

#include "bipemb/rng.hpp"

namespace bipemb {

namespace {

// Global numbering inside this file: A-vertex i is i, B-vertex j is size_a + j.
VertexId local_id(const BipartiteGraph & h, std::uint32_t g)
{
    return g < h.size_a() ? VertexId{Side::A, g} : VertexId{Side::B, static_cast<std::uint32_t>(g - h.size_a())};
}

std::vector<std::vector<std::uint32_t>> adjacency(const BipartiteGraph & h)
{
    std::vector<std::vector<std::uint32_t>> adj(h.size_a() + h.size_b());
    for (const auto & [a, b] : h.edges()) {
        const auto gb = static_cast<std::uint32_t>(h.size_a() + b);
        adj[a].push_back(gb);
        adj[gb].push_back(a);
    }
    return adj;
}

BandwidthLabelling finish(const BipartiteGraph & h, std::vector<VertexId> order)
{
    BandwidthLabelling l;
    l.positions_a.assign(h.size_a(), 0);
    l.positions_b.assign(h.size_b(), 0);
    for (std::size_t t = 0; t < order.size(); ++t)
        (order[t].side == Side::A ? l.positions_a : l.positions_b)[order[t].index] = t;
    l.order = std::move(order);
    l.bandwidth = labelling_bandwidth(h, l.order);
    return l;
}

std::vector<VertexId> cuthill_mckee(const BipartiteGraph & h)
{
    const auto adj = adjacency(h);
    const std::size_t total = adj.size();
    std::vector<char> seen(total, 0);
    std::vector<std::uint32_t> by_degree(total);
    std::iota(by_degree.begin(), by_degree.end(), 0);
    std::stable_sort(by_degree.begin(), by_degree.end(),
                     [&](std::uint32_t u, std::uint32_t v) { return adj[u].size() < adj[v].size(); });
    std::vector<VertexId> order;
    order.reserve(total);
    for (auto start : by_degree) {
        if (seen[start])
            continue;
        std::queue<std::uint32_t> queue;
        queue.push(start);
        seen[start] = 1;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop();
            order.push_back(local_id(h, v));
            auto next = adj[v];
            std::stable_sort(next.begin(), next.end(), [&](std::uint32_t a, std::uint32_t b) {
                return adj[a].size() != adj[b].size() ? adj[a].size() < adj[b].size() : a < b;
            });
            for (auto u : next)
                if (!seen[u]) {
                    seen[u] = 1;
                    queue.push(u);
                }
        }
    }
    return order;
}

class ExactLayout {
public:
    ExactLayout(const std::vector<std::vector<std::uint32_t>> & adj) : adj_(adj), n_(adj.size()), nb_(adj.size(), 0)
    {
        for (std::size_t v = 0; v < n_; ++v)
            for (auto u : adj[v])
                nb_[v] |= 1U << u;
    }

    std::optional<std::vector<std::uint32_t>> solve(std::size_t b)
    {
        b_ = b;
        failed_.clear();
        seq_.clear();
        pos_.assign(n_, 0);
        if (dfs(0))
            return seq_;
        return std::nullopt;
    }

private:
    bool dfs(std::uint32_t mask)
    {
        const std::size_t p = seq_.size();
        if (p == n_)
            return true;
        std::string key = std::to_string(mask);
        for (std::size_t t = p > b_ ? p - b_ : 0; t < p; ++t)
            key += "," + std::to_string(seq_[t]);
        if (failed_.count(key))
            return false;
        for (std::uint32_t v = 0; v < n_; ++v) {
            if (mask & (1U << v))
                continue;
            bool ok = true;
            for (auto u : adj_[v])
                if ((mask & (1U << u)) && pos_[u] + b_ < p) {
                    ok = false;
                    break;
                }
            // the vertex leaving the window must have all neighbours placed
            if (ok && b_ > 0 && p >= b_) {
                const auto old = seq_[p - b_];
                if ((nb_[old] & ~(mask | (1U << v))) != 0)
                    ok = false;
            }
            if (!ok)
                continue;
            pos_[v] = p;
            seq_.push_back(v);
            if (dfs(mask | (1U << v)))
                return true;
            seq_.pop_back();
        }
        failed_.insert(std::move(key));
        return false;
    }

    const std::vector<std::vector<std::uint32_t>> & adj_;
    std::size_t n_;
    std::vector<std::uint32_t> nb_;
    std::size_t b_ = 0;
    std::vector<std::uint32_t> seq_;
    std::vector<std::size_t> pos_;
    std::unordered_set<std::string> failed_;
};

} // namespace

std::size_t labelling_bandwidth(const BipartiteGraph & h, std::span<const VertexId> order)
{
    std::vector<std::size_t> pa(h.size_a()), pb(h.size_b());
    for (std::size_t t = 0; t < order.size(); ++t)
        (order[t].side == Side::A ? pa : pb).at(order[t].index) = t;
    std::size_t bw = 0;
    for (const auto & [a, b] : h.edges())
        bw = std::max(bw, pa[a] > pb[b] ? pa[a] - pb[b] : pb[b] - pa[a]);
    return bw;
}

BandwidthLabelling bandwidth_labelling(const BipartiteGraph & h, LabellingMode mode, std::span<const VertexId> order)
{
    const std::size_t total = h.size_a() + h.size_b();
    switch (mode) {
    case LabellingMode::given: {
        if (order.size() != total)
            throw PreconditionError("labelling has " + std::to_string(order.size()) + " entries, graph has " +
                                    std::to_string(total) + " vertices");
        std::vector<char> seen_a(h.size_a(), 0), seen_b(h.size_b(), 0);
        for (const auto & v : order) {
            auto & seen = v.side == Side::A ? seen_a : seen_b;
            if (v.index >= seen.size() || seen[v.index])
                throw PreconditionError("labelling is not a permutation of the vertex set");
            seen[v.index] = 1;
        }
        return finish(h, std::vector<VertexId>(order.begin(), order.end()));
    }
    case LabellingMode::cuthill_mckee:
        return finish(h, cuthill_mckee(h));
    case LabellingMode::exact_small: {
        if (total > 16)
            throw PreconditionError("exact bandwidth needs at most 16 vertices, got " + std::to_string(total));
        const auto adj = adjacency(h);
        ExactLayout layout(adj);
        std::size_t max_deg = 0;
        for (const auto & a : adj)
            max_deg = std::max(max_deg, a.size());
        for (std::size_t b = (max_deg + 1) / 2; b < std::max<std::size_t>(total, 1); ++b)
            if (auto seq = layout.solve(b)) {
                std::vector<VertexId> out;
                for (auto v : *seq)
                    out.push_back(local_id(h, v));
                return finish(h, std::move(out));
            }
        return finish(h, cuthill_mckee(h)); // unreachable for total >= 1: b = total-1 always succeeds
    }
    }
    throw PreconditionError("unknown labelling mode");
}

std::size_t PiecePartition::piece_of(std::size_t position) const
{
    const auto it = std::upper_bound(starts.begin(), starts.end(), position);
    return static_cast<std::size_t>(it - starts.begin()) - 1;
}

PiecePartition partition_pieces(const BipartiteGraph & h, const BandwidthLabelling & labelling, std::size_t ell)
{
    const std::size_t total = labelling.order.size();
    if (total != h.size_a() + h.size_b())
        throw PreconditionError("labelling does not match the graph");
    if (ell == 0 || ell > total)
        throw PreconditionError("need 1 <= ell <= 2n, got ell = " + std::to_string(ell));
    PiecePartition p;
    p.ell = ell;
    const std::size_t base = total / ell, extra = total % ell;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ell; ++i) {
        const std::size_t size = base + (i < extra ? 1 : 0);
        p.starts.push_back(pos);
        p.sizes.push_back(size);
        std::size_t xs = 0;
        for (std::size_t t = pos; t < pos + size; ++t)
            xs += labelling.order[t].side == Side::A ? 1 : 0;
        p.x.push_back(xs);
        p.y.push_back(size - xs);
        pos += size;
    }
    return p;
}

bool balance_bounds_hold(const BalancingAssignment & phi, std::span<const std::size_t> targets, const Rational & xi)
{
    const std::size_t n = std::accumulate(targets.begin(), targets.end(), std::size_t{0});
    const Rational slack = xi * Integer(n);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const Rational bound = Integer(targets[i]) + slack;
        if (!(Rational(Integer(phi.a_bar[i])) < bound) || !(Rational(Integer(phi.b_bar[i])) < bound))
            return false;
    }
    return true;
}

BalancingAssignment balance_assignment(std::span<const std::size_t> targets, std::span<const std::size_t> x,
                                       std::span<const std::size_t> y, const Rational & xi,
                                       const BalanceOptions & options)
{
    const std::size_t k = targets.size();
    const std::size_t ell = x.size();
    if (k == 0 || ell == 0 || y.size() != ell)
        throw PreconditionError("balance_assignment: need k >= 1 and matching piece counts");
    const std::size_t n = std::accumulate(targets.begin(), targets.end(), std::size_t{0});
    if (std::accumulate(x.begin(), x.end(), std::size_t{0}) != n || std::accumulate(y.begin(), y.end(), std::size_t{0}) != n)
        throw PreconditionError("balance_assignment: targets, x and y must all be partitions of the same n");
    if (xi <= 0 || xi > Rational(1, 4))
        throw PreconditionError("balance_assignment: xi must lie in (0, 1/4]");
    if (options.enforce_size_hypothesis)
        for (std::size_t i = 0; i < k; ++i)
            if (8 * targets[i] > n)
                throw PreconditionError("balance_assignment: n_" + std::to_string(i + 1) + " = " +
                                        std::to_string(targets[i]) + " exceeds n/8");
    const Rational piece_cap = (1 + xi) * Integer(2 * n) / Integer(ell);
    for (std::size_t j = 0; j < ell; ++j)
        if (Rational(Integer(x[j] + y[j])) > piece_cap)
            throw PreconditionError("balance_assignment: piece " + std::to_string(j + 1) +
                                    " exceeds (1 + xi) 2n/ell");

    std::vector<std::size_t> cumulative(k);
    std::partial_sum(targets.begin(), targets.end(), cumulative.begin());
    std::vector<std::size_t> violations(k, 0);
    const Rational scale(Integer(ell), Integer(3 * n));

    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
        Rng rng(derive_seed(options.seed, attempt));
        BalancingAssignment out;
        out.phi.resize(ell);
        out.a_bar.assign(k, 0);
        out.b_bar.assign(k, 0);
        out.s.assign(k, 0);
        for (std::size_t j = 0; j < ell; ++j) {
            const auto r = static_cast<std::size_t>(uniform_below(rng, n));
            const auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) -
                                                    cumulative.begin());
            out.phi[j] = i;
            out.a_bar[i] += x[j];
            out.b_bar[i] += y[j];
            ++out.s[i];
        }
        out.d.assign(k, Rational(0));
        for (std::size_t i = 0; i < k; ++i) {
            const Rational p(Integer(targets[i]), Integer(n));
            for (std::size_t j = 0; j < ell; ++j) {
                const Rational indicator = out.phi[j] == i ? Rational(1) : Rational(0);
                out.d[i] += scale * (Integer(x[j]) - Integer(y[j])) * (indicator - p);
            }
        }
        out.retries_used = attempt;
        if (balance_bounds_hold(out, targets, xi))
            return out;
        const Rational slack = xi * Integer(n);
        for (std::size_t i = 0; i < k; ++i) {
            const Rational bound = Integer(targets[i]) + slack;
            if (!(Rational(Integer(out.a_bar[i])) < bound) || !(Rational(Integer(out.b_bar[i])) < bound))
                ++violations[i];
        }
    }
    throw BalanceFailed(options.max_retries + 1, violations,
                        "no sample met the bounds in " + std::to_string(options.max_retries + 1) + " samples");
}

FailureBound failure_probability_bound(std::size_t k, const Rational & xi, std::size_t ell)
{
    if (k == 0 || ell == 0 || xi <= 0)
        throw PreconditionError("failure_probability_bound: need k, ell >= 1 and xi > 0");
    const double x = to_double(xi);
    const double l = static_cast<double>(ell);
    const double kk = static_cast<double>(k);
    FailureBound b;
    b.raw = 2 * kk * std::exp(-x * x * l / 2) + 2 * kk * std::exp(-x * x * l / 72);
    b.clamped = std::min(b.raw, 1.0);
    return b;
}

Integer lemma_piece_count(std::size_t k, const Rational & xi)
{
    Integer k5 = 1;
    for (int t = 0; t < 5; ++t)
        k5 *= k;
    return ceil(Rational(1000 * k5 / (xi * xi)));
}

bool is_cycle_edge(std::size_t k, std::size_t i, std::size_t j)
{
    const std::size_t diff = (j + k - i % k) % k;
    return diff == 0 || diff == 1 % k;
}

std::vector<std::size_t> CycleHomomorphism::preimage_a() const
{
    std::vector<std::size_t> out(k, 0);
    for (auto c : f_a)
        ++out.at(c);
    return out;
}

std::vector<std::size_t> CycleHomomorphism::preimage_b() const
{
    std::vector<std::size_t> out(k, 0);
    for (auto c : f_b)
        ++out.at(c);
    return out;
}

CycleHomomorphism build_cycle_homomorphism(const BipartiteGraph & h, const BandwidthLabelling & labelling,
                                           const PiecePartition & pieces, std::span<const std::size_t> phi,
                                           std::size_t beta_n, std::size_t k)
{
    if (k == 0)
        throw PreconditionError("build_cycle_homomorphism: k must be positive");
    if (phi.size() != pieces.ell)
        throw PreconditionError("build_cycle_homomorphism: phi must have one entry per piece");
    for (auto c : phi)
        if (c >= k)
            throw PreconditionError("build_cycle_homomorphism: phi value out of range");
    if (beta_n == 0 || labelling.bandwidth > beta_n)
        throw PreconditionError("build_cycle_homomorphism: bandwidth " + std::to_string(labelling.bandwidth) +
                                " exceeds beta_n = " + std::to_string(beta_n));
    const std::size_t smallest = *std::min_element(pieces.sizes.begin(), pieces.sizes.end());
    if ((2 * k + 1) * beta_n > smallest)
        throw PreconditionError("build_cycle_homomorphism: (2k + 1) beta_n = " + std::to_string((2 * k + 1) * beta_n) +
                                " exceeds the smallest piece (" + std::to_string(smallest) + ")");

    CycleHomomorphism hom;
    hom.k = k;
    hom.f_a.assign(h.size_a(), 0);
    hom.f_b.assign(h.size_b(), 0);
    hom.s_a = VertexSet(Side::A, h.size_a());
    hom.s_b = VertexSet(Side::B, h.size_b());

    // block index j ∈ [2k] of each position (0 when outside the linking prefix)
    auto block_of = [&](std::size_t pos, std::size_t piece) -> std::size_t {
        const std::size_t offset = pos - pieces.starts[piece];
        return offset < 2 * k * beta_n ? offset / beta_n + 1 : 0;
    };

    for (std::size_t pos = 0; pos < labelling.order.size(); ++pos) {
        const VertexId v = labelling.order[pos];
        const std::size_t i = pieces.piece_of(pos);
        const std::size_t prev = phi[i == 0 ? 0 : i - 1];
        const std::size_t q = (phi[i] + k - prev) % k;
        const std::size_t j = block_of(pos, i);
        std::size_t cluster = phi[i];
        if (j != 0 && j <= 2 * q)
            cluster = (prev + (v.side == Side::A ? j / 2 : (j + 1) / 2)) % k;
        if (v.side == Side::A)
            hom.f_a[v.index] = static_cast<std::uint32_t>(cluster);
        else
            hom.f_b[v.index] = static_cast<std::uint32_t>(cluster);
        if (j != 0)
            (v.side == Side::A ? hom.s_a : hom.s_b).insert(v.index);
    }

    for (const auto & [a, b] : h.edges()) {
        if (is_cycle_edge(k, hom.f_a[a], hom.f_b[b]))
            continue;
        auto trace = [&](VertexId v) {
            const auto pos = labelling.position(v);
            const auto piece = pieces.piece_of(pos);
            return std::string(side_name(v.side)) + std::to_string(v.index) + " at position " + std::to_string(pos) +
                   " in piece " + std::to_string(piece + 1) + " block " + std::to_string(block_of(pos, piece));
        };
        throw StageError("homomorphism", "internal error: edge (" + trace({Side::A, a}) + ", " + trace({Side::B, b}) +
                                             ") maps to (A_" + std::to_string(hom.f_a[a] + 1) + ", B_" +
                                             std::to_string(hom.f_b[b] + 1) + "), not an edge of C");
    }
    return hom;
}

HomomorphismReport verify_cycle_homomorphism(const BipartiteGraph & h, const CycleHomomorphism & hom,
                                             std::span<const std::size_t> targets, const Rational & xi)
{
    HomomorphismReport r;
    const std::size_t k = hom.k;
    const std::size_t n = h.size_a();
    r.homomorphism = hom.f_a.size() == h.size_a() && hom.f_b.size() == h.size_b() && k > 0;
    if (r.homomorphism)
        for (const auto & e : h.edges()) {
            if (hom.f_a[e.first] >= k || hom.f_b[e.second] >= k || !is_cycle_edge(k, hom.f_a[e.first], hom.f_b[e.second])) {
                r.homomorphism = false;
                r.bad_edge = e;
                break;
            }
        }

    r.s_size = hom.s_size();
    r.h1_bound = xi * Integer(2 * k) * Integer(n);
    r.h1 = !(Rational(Integer(r.s_size)) > r.h1_bound);

    r.h2 = true;
    if (r.homomorphism)
        for (const auto & e : h.edges()) {
            if (hom.s_a.contains(e.first) || hom.s_b.contains(e.second))
                continue;
            if (hom.f_a[e.first] != hom.f_b[e.second]) {
                r.h2 = false;
                r.h2_violation = e;
                break;
            }
        }
    else
        r.h2 = false;

    r.h3 = targets.size() == k && r.homomorphism;
    if (r.homomorphism) {
        r.preimage_a = hom.preimage_a();
        r.preimage_b = hom.preimage_b();
    }
    if (r.h3) {
        const Rational slack = xi * Integer(n);
        for (std::size_t i = 0; i < k; ++i) {
            const Rational bound = Integer(targets[i]) + slack;
            if (!(Rational(Integer(r.preimage_a[i])) < bound) || !(Rational(Integer(r.preimage_b[i])) < bound)) {
                r.h3 = false;
                r.h3_violation = i;
                break;
            }
        }
    }
    return r;
}

} // namespace bipemb
