#include "bipemb/hamilton.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <string>

#include "bipemb/rng.hpp"

namespace bipemb {

namespace {

// Internal numbering: A-vertex i is i, B-vertex j is n + j.
struct Dense {
    std::size_t n;
    std::vector<std::vector<std::uint32_t>> adj;

    explicit Dense(const BipartiteGraph & g) : n(g.size_a()), adj(2 * g.size_a())
    {
        for (const auto & [a, b] : g.edges()) {
            adj[a].push_back(static_cast<std::uint32_t>(n + b));
            adj[n + b].push_back(a);
        }
    }

    VertexId id(std::uint32_t v) const
    {
        return v < n ? VertexId{Side::A, v} : VertexId{Side::B, static_cast<std::uint32_t>(v - n)};
    }
};

HamiltonCycle to_cycle(const Dense & d, const std::vector<std::uint32_t> & path)
{
    HamiltonCycle c;
    c.order.reserve(path.size());
    for (auto v : path)
        c.order.push_back(d.id(v));
    return c;
}

class PathState {
public:
    PathState(const Dense & d, const BipartiteGraph & g) : d_(d), g_(g), pos_(2 * d.n, npos) {}

    void reset(std::uint32_t start)
    {
        for (auto v : path_)
            pos_[v] = npos;
        path_.assign(1, start);
        pos_[start] = 0;
    }

    bool adjacent(std::uint32_t u, std::uint32_t v) const
    {
        if (u >= d_.n)
            std::swap(u, v);
        return u < d_.n && v >= d_.n && g_.has_edge(u, static_cast<std::uint32_t>(v - d_.n));
    }

    bool closed() const { return path_.size() > 2 && adjacent(path_.front(), path_.back()); }
    bool full() const { return path_.size() == 2 * d_.n; }

    bool extend(Rng & rng)
    {
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<std::uint32_t> options;
            for (auto u : d_.adj[path_.back()])
                if (pos_[u] == npos)
                    options.push_back(u);
            if (!options.empty()) {
                const auto u = options[uniform_below(rng, options.size())];
                pos_[u] = path_.size();
                path_.push_back(u);
                return true;
            }
            reverse();
        }
        return false;
    }

    /// Opens the closed path at a vertex with an outside neighbour.
    bool break_cycle(Rng & rng)
    {
        std::vector<std::pair<std::uint32_t, std::size_t>> options;
        for (std::size_t i = 0; i < path_.size(); ++i)
            for (auto u : d_.adj[path_[i]])
                if (pos_[u] == npos)
                    options.emplace_back(u, i);
        if (options.empty())
            return false;
        const auto [u, i] = options[uniform_below(rng, options.size())];
        std::rotate(path_.begin(), path_.begin() + static_cast<std::ptrdiff_t>(i), path_.end());
        path_.insert(path_.begin(), u);
        reindex();
        return true;
    }

    /// Pósa rotation at a random end: v_0 .. v_i v_t v_{t-1} .. v_{i+1}.
    bool rotate(Rng & rng)
    {
        if (uniform_below(rng, 2) == 1)
            reverse();
        for (int attempt = 0; attempt < 2; ++attempt) {
            const auto end = path_.back();
            std::vector<std::size_t> pivots;
            for (auto u : d_.adj[end])
                if (pos_[u] != npos && pos_[u] + 2 < path_.size())
                    pivots.push_back(pos_[u]);
            if (!pivots.empty()) {
                const auto i = pivots[uniform_below(rng, pivots.size())];
                std::reverse(path_.begin() + static_cast<std::ptrdiff_t>(i + 1), path_.end());
                for (std::size_t t = i + 1; t < path_.size(); ++t)
                    pos_[path_[t]] = t;
                return true;
            }
            reverse();
        }
        return false;
    }

    const std::vector<std::uint32_t> & path() const { return path_; }

private:
    static constexpr std::size_t npos = ~std::size_t{0};

    void reverse()
    {
        std::reverse(path_.begin(), path_.end());
        reindex();
    }

    void reindex()
    {
        for (std::size_t t = 0; t < path_.size(); ++t)
            pos_[path_[t]] = t;
    }

    const Dense & d_;
    const BipartiteGraph & g_;
    std::vector<std::size_t> pos_;
    std::vector<std::uint32_t> path_;
};

std::optional<HamiltonCycle> rotation_extension(const BipartiteGraph & g, const Dense & d, std::uint64_t seed,
                                                std::size_t restarts)
{
    const std::size_t total = 2 * d.n;
    const std::size_t step_limit = 20 * total * total + 100;
    PathState state(d, g);
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, r));
        state.reset(static_cast<std::uint32_t>(uniform_below(rng, total)));
        for (std::size_t step = 0; step < step_limit; ++step) {
            if (state.full()) {
                if (state.closed())
                    return to_cycle(d, state.path());
                if (!state.rotate(rng))
                    break;
                continue;
            }
            if (state.extend(rng))
                continue;
            if (state.closed() && state.break_cycle(rng))
                continue;
            if (!state.rotate(rng))
                break;
        }
    }
    return std::nullopt;
}

/// dp[mask] = endpoints v such that some path from vertex 0 covers exactly mask and ends at v.
std::optional<HamiltonCycle> exhaustive(const Dense & d)
{
    const std::size_t total = 2 * d.n;
    std::vector<std::uint32_t> nb(total, 0);
    for (std::size_t v = 0; v < total; ++v)
        for (auto u : d.adj[v])
            nb[v] |= std::uint32_t{1} << u;

    // masks always contain vertex 0; index by mask >> 1
    const std::size_t states = std::size_t{1} << (total - 1);
    std::vector<std::uint32_t> dp(states, 0);
    dp[0] = 1; // path {0} ending at 0
    for (std::size_t idx = 0; idx < states; ++idx) {
        const std::uint32_t ends = dp[idx];
        if (!ends)
            continue;
        const std::uint32_t mask = static_cast<std::uint32_t>((idx << 1) | 1U);
        for (std::uint32_t e = ends; e; e &= e - 1) {
            const auto v = static_cast<std::uint32_t>(std::countr_zero(e));
            for (std::uint32_t free = nb[v] & ~mask; free; free &= free - 1) {
                const auto u = static_cast<std::uint32_t>(std::countr_zero(free));
                dp[(mask | (std::uint32_t{1} << u)) >> 1] |= std::uint32_t{1} << u;
            }
        }
    }

    const std::uint32_t all = static_cast<std::uint32_t>((std::uint64_t{1} << total) - 1);
    const std::uint32_t closing = dp[all >> 1] & nb[0];
    if (!closing)
        return std::nullopt;

    std::vector<std::uint32_t> path;
    std::uint32_t mask = all;
    auto v = static_cast<std::uint32_t>(std::countr_zero(closing));
    while (v != 0) {
        path.push_back(v);
        const std::uint32_t prev_mask = mask & ~(std::uint32_t{1} << v);
        const std::uint32_t prev = dp[prev_mask >> 1] & nb[v];
        mask = prev_mask;
        v = static_cast<std::uint32_t>(std::countr_zero(prev));
    }
    path.push_back(0);
    std::reverse(path.begin(), path.end());
    return to_cycle(d, path);
}

} // namespace

HamiltonCycle find_hamilton_cycle(const BipartiteGraph & g, const HamiltonOptions & options)
{
    if (!g.balanced())
        throw PreconditionError("find_hamilton_cycle: graph must be balanced");
    const std::size_t n = g.size_a();
    if (n < 2)
        throw PreconditionError("find_hamilton_cycle: need n >= 2 per side");

    HamiltonMode mode = options.mode;
    if (mode == HamiltonMode::automatic)
        mode = n <= 12 ? HamiltonMode::exhaustive_small : HamiltonMode::rotation_extension;
    if (mode == HamiltonMode::exhaustive_small && n > 12)
        throw PreconditionError("find_hamilton_cycle: exhaustive mode needs n <= 12, got " + std::to_string(n));

    const Dense d(g);
    const bool hypothesis = 2 * g.min_degree() >= n + 2;
    std::optional<HamiltonCycle> found;
    if (mode == HamiltonMode::exhaustive_small)
        found = exhaustive(d);
    else
        found = rotation_extension(g, d, options.seed, options.restart_budget ? options.restart_budget : 50 * n);

    if (!found) {
        const std::string reason =
            mode == HamiltonMode::exhaustive_small ? "graph has no Hamilton cycle" : "restart budget exhausted";
        throw HamiltonNotFound(hypothesis, reason + (hypothesis ? " although min degree >= n/2 + 1 held"
                                                                : "; min degree >= n/2 + 1 does not hold"));
    }
    if (auto check = verify_cycle(g, *found); !check)
        throw StageError("hamilton", "internal error: produced cycle fails verification: " + check.detail);
    return *found;
}

CycleCheck verify_cycle(const BipartiteGraph & g, const HamiltonCycle & cycle)
{
    auto fail = [](std::string why) { return CycleCheck{false, std::move(why)}; };
    const auto & order = cycle.order;
    if (order.size() != g.size_a() + g.size_b())
        return fail("cycle has " + std::to_string(order.size()) + " vertices, graph has " +
                    std::to_string(g.size_a() + g.size_b()));
    if (order.size() < 4)
        return fail("cycle shorter than 4");
    std::vector<char> seen_a(g.size_a(), 0), seen_b(g.size_b(), 0);
    for (std::size_t t = 0; t < order.size(); ++t) {
        const auto v = order[t];
        auto & seen = v.side == Side::A ? seen_a : seen_b;
        if (v.index >= seen.size())
            return fail("position " + std::to_string(t) + ": vertex out of range");
        if (seen[v.index])
            return fail(std::string("vertex ") + side_name(v.side) + std::to_string(v.index) + " repeated");
        seen[v.index] = 1;
        const auto w = order[(t + 1) % order.size()];
        if (v.side == w.side)
            return fail("sides do not alternate at position " + std::to_string(t));
        const auto a = v.side == Side::A ? v.index : w.index;
        const auto b = v.side == Side::A ? w.index : v.index;
        if (!g.has_edge(a, b))
            return fail("non-edge (A" + std::to_string(a) + ", B" + std::to_string(b) + ") at position " +
                        std::to_string(t));
    }
    return CycleCheck{true, {}};
}

} // namespace bipemb
