#include "bipemb/embedder.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "bipemb/matching.hpp"
#include "bipemb/rng.hpp"

namespace bipemb {

namespace {

constexpr std::uint32_t none = ~std::uint32_t{0};

std::string name(VertexId v)
{
    return (v.side == Side::A ? "x" : "y") + std::to_string(v.index);
}

void validate_hpartition(const BipartiteGraph & h, const HPartition & w)
{
    if (w.k == 0)
        throw PreconditionError("H-partition needs k >= 1");
    if (w.class_a.size() != h.size_a() || w.class_b.size() != h.size_b())
        throw PreconditionError("H-partition does not cover V(H)");
    for (auto c : w.class_a)
        if (c >= w.k)
            throw PreconditionError("H-partition class index out of range");
    for (auto c : w.class_b)
        if (c >= w.k)
            throw PreconditionError("H-partition class index out of range");
}

void validate_class_edges(std::span<const ClassEdge> edges, std::size_t k, const char * what)
{
    for (auto [i, j] : edges)
        if (i >= k || j >= k)
            throw PreconditionError(std::string(what) + " edge out of range");
}

bool contains_edge(std::span<const ClassEdge> edges, std::uint32_t i, std::uint32_t j)
{
    return std::find(edges.begin(), edges.end(), ClassEdge{i, j}) != edges.end();
}

// S and T of the compatibility definition, per side of H.
struct Boundary {
    VertexSet s_a, s_b, t_a, t_b;
};

Boundary boundary(const BipartiteGraph & h, const HPartition & w, std::span<const ClassEdge> rprime)
{
    const std::size_t k = w.k;
    std::vector<char> on_rprime(k * k, 0);
    for (auto [i, j] : rprime)
        on_rprime[i * k + j] = 1;
    Boundary out{VertexSet(Side::A, h.size_a()), VertexSet(Side::B, h.size_b()), VertexSet(Side::A, h.size_a()),
                 VertexSet(Side::B, h.size_b())};
    for (auto [x, y] : h.edges())
        if (!on_rprime[w.class_a[x] * k + w.class_b[y]]) {
            out.s_a.insert(x);
            out.s_b.insert(y);
        }
    for (auto x : out.s_a.to_vector())
        h.neighbours({Side::A, x}).for_each([&](std::size_t y) {
            if (!out.s_b.contains(static_cast<std::uint32_t>(y)))
                out.t_b.insert(static_cast<std::uint32_t>(y));
        });
    for (auto y : out.s_b.to_vector())
        h.neighbours({Side::B, y}).for_each([&](std::size_t x) {
            if (!out.s_a.contains(static_cast<std::uint32_t>(x)))
                out.t_a.insert(static_cast<std::uint32_t>(x));
        });
    return out;
}

// Union-find over the 2k classes A_0..A_{k-1}, B_0..B_{k-1} (B_j is node k + j).
struct Components {
    std::vector<std::size_t> parent;

    explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t v)
    {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    }

    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace

CompatibilityReport compatibility_report(const BipartiteGraph & h, const HPartition & w,
                                         std::span<const std::size_t> target_a, std::span<const std::size_t> target_b,
                                         std::span<const ClassEdge> r, std::span<const ClassEdge> rprime,
                                         const Rational & epsilon)
{
    validate_hpartition(h, w);
    const std::size_t k = w.k;
    if (target_a.size() != k || target_b.size() != k)
        throw PreconditionError("compatibility_report: need k target sizes per side");
    validate_class_edges(r, k, "R");
    validate_class_edges(rprime, k, "R'");
    for (auto [i, j] : rprime)
        if (!contains_edge(r, i, j))
            throw PreconditionError("compatibility_report: R' is not a subgraph of R");

    CompatibilityReport rep;
    rep.size_a.assign(k, 0);
    rep.size_b.assign(k, 0);
    for (auto c : w.class_a)
        ++rep.size_a[c];
    for (auto c : w.class_b)
        ++rep.size_b[c];
    rep.target_a.assign(target_a.begin(), target_a.end());
    rep.target_b.assign(target_b.begin(), target_b.end());

    auto fail = [&](const std::string & why) {
        if (rep.first_violation.empty())
            rep.first_violation = why;
    };

    rep.clause_i = true;
    rep.sizes_exact = true;
    for (std::size_t i = 0; i < k; ++i) {
        if (rep.size_a[i] != rep.target_a[i] || rep.size_b[i] != rep.target_b[i])
            rep.sizes_exact = false;
        if (rep.size_a[i] > rep.target_a[i]) {
            rep.clause_i = false;
            fail("(i): |X_" + std::to_string(i + 1) + "| = " + std::to_string(rep.size_a[i]) + " > n = " +
                 std::to_string(rep.target_a[i]));
        }
        if (rep.size_b[i] > rep.target_b[i]) {
            rep.clause_i = false;
            fail("(i): |Y_" + std::to_string(i + 1) + "| = " + std::to_string(rep.size_b[i]) + " > n = " +
                 std::to_string(rep.target_b[i]));
        }
    }

    std::vector<char> on_r(k * k, 0);
    for (auto [i, j] : r)
        on_r[i * k + j] = 1;
    rep.clause_ii = true;
    for (auto [x, y] : h.edges())
        if (!on_r[w.class_a[x] * k + w.class_b[y]]) {
            rep.clause_ii = false;
            fail("(ii): edge (x" + std::to_string(x) + ", y" + std::to_string(y) + ") lies on (A_" +
                 std::to_string(w.class_a[x] + 1) + ", B_" + std::to_string(w.class_b[y] + 1) + ") outside R");
            break;
        }

    auto b = boundary(h, w, rprime);
    rep.s_a = std::move(b.s_a);
    rep.s_b = std::move(b.s_b);
    rep.t_a = std::move(b.t_a);
    rep.t_b = std::move(b.t_b);

    Components comp(2 * k);
    for (auto [i, j] : rprime)
        comp.unite(i, k + j);
    auto target_of = [&](std::size_t node) { return node < k ? rep.target_a[node] : rep.target_b[node - k]; };
    std::vector<std::size_t> comp_min(2 * k, std::numeric_limits<std::size_t>::max());
    for (std::size_t v = 0; v < 2 * k; ++v) {
        auto root = comp.find(v);
        comp_min[root] = std::min(comp_min[root], target_of(v));
    }

    std::vector<std::size_t> s_count(2 * k, 0), t_count(2 * k, 0);
    rep.s_a.bits().for_each([&](std::size_t x) { ++s_count[w.class_a[x]]; });
    rep.s_b.bits().for_each([&](std::size_t y) { ++s_count[k + w.class_b[y]]; });
    rep.t_a.bits().for_each([&](std::size_t x) { ++t_count[w.class_a[x]]; });
    rep.t_b.bits().for_each([&](std::size_t y) { ++t_count[k + w.class_b[y]]; });

    rep.clause_iii = true;
    for (std::size_t v = 0; v < 2 * k; ++v) {
        const std::string label = (v < k ? "A_" + std::to_string(v + 1) : "B_" + std::to_string(v - k + 1));
        if (Rational(Integer(s_count[v])) > epsilon * Integer(target_of(v))) {
            rep.clause_iii = false;
            fail("(iii): |S| in " + label + " is " + std::to_string(s_count[v]) + " > eps * " +
                 std::to_string(target_of(v)));
        }
        const auto m = comp_min[comp.find(v)];
        if (Rational(Integer(t_count[v])) > epsilon * Integer(m)) {
            rep.clause_iii = false;
            fail("(iii): |T| in " + label + " is " + std::to_string(t_count[v]) + " > eps * " + std::to_string(m));
        }
    }
    return rep;
}

EmbeddingCheck verify_embedding(const BipartiteGraph & g, const BipartiteGraph & h, const Embedding & emb)
{
    if (emb.map_a.size() != h.size_a() || emb.map_b.size() != h.size_b())
        return {false, "map does not cover V(H)"};
    std::vector<char> used_a(g.size_a(), 0), used_b(g.size_b(), 0);
    for (std::uint32_t x = 0; x < emb.map_a.size(); ++x) {
        const auto v = emb.map_a[x];
        if (v >= g.size_a())
            return {false, "x" + std::to_string(x) + " maps outside side A of G"};
        if (used_a[v])
            return {false, "not injective: two X-vertices map to A" + std::to_string(v)};
        used_a[v] = 1;
    }
    for (std::uint32_t y = 0; y < emb.map_b.size(); ++y) {
        const auto v = emb.map_b[y];
        if (v >= g.size_b())
            return {false, "y" + std::to_string(y) + " maps outside side B of G"};
        if (used_b[v])
            return {false, "not injective: two Y-vertices map to B" + std::to_string(v)};
        used_b[v] = 1;
    }
    for (auto [x, y] : h.edges())
        if (!g.has_edge(emb.map_a[x], emb.map_b[y]))
            return {false, "edge (x" + std::to_string(x) + ", y" + std::to_string(y) + ") maps to non-edge (A" +
                               std::to_string(emb.map_a[x]) + ", B" + std::to_string(emb.map_b[y]) + ")"};
    return {true, {}};
}

namespace {

struct Attempt {
    const BipartiteGraph & g;
    const BipartiteGraph & h;
    const ClusterPartition & gp;
    const HPartition & hp;
    Rng rng;

    std::vector<std::uint32_t> map_a, map_b;
    std::vector<EmbedPhase> phase_a, phase_b;
    DynBitset used_a, used_b;

    std::optional<VertexId> stuck;
    std::vector<VertexId> hall;
    std::string why;

    Attempt(const BipartiteGraph & g_, const BipartiteGraph & h_, const ClusterPartition & gp_,
            const HPartition & hp_, std::uint64_t seed)
        : g(g_), h(h_), gp(gp_), hp(hp_), rng(seed), map_a(h_.size_a(), none), map_b(h_.size_b(), none),
          phase_a(h_.size_a(), EmbedPhase::matching), phase_b(h_.size_b(), EmbedPhase::matching),
          used_a(g_.size_a()), used_b(g_.size_b())
    {
    }

    std::uint32_t image(VertexId v) const { return v.side == Side::A ? map_a[v.index] : map_b[v.index]; }
    const VertexSet & cluster_for(VertexId v) const
    {
        return v.side == Side::A ? gp.a[hp.class_a[v.index]] : gp.b[hp.class_b[v.index]];
    }

    // Unused vertices of w's target cluster adjacent to the images of all embedded neighbours of w.
    DynBitset candidates(VertexId w) const
    {
        DynBitset c = cluster_for(w).bits();
        c.subtract(w.side == Side::A ? used_a : used_b);
        h.neighbours(w).for_each([&](std::size_t u) {
            const VertexId nb{opposite(w.side), static_cast<std::uint32_t>(u)};
            const auto img = image(nb);
            if (img != none)
                c &= g.neighbours({nb.side, img});
        });
        return c;
    }

    void place(VertexId w, std::uint32_t v, EmbedPhase phase)
    {
        if (w.side == Side::A) {
            map_a[w.index] = v;
            phase_a[w.index] = phase;
            used_a.set(v);
        } else {
            map_b[w.index] = v;
            phase_b[w.index] = phase;
            used_b.set(v);
        }
    }

    // Greedy phase: typical candidates keep at least (d − ε) of every unembedded neighbour's candidates.
    bool greedy(std::span<const VertexId> order, const Rational & typical_ratio)
    {
        for (auto w : order) {
            if (image(w) != none)
                continue;
            const DynBitset cand = candidates(w);
            if (cand.none()) {
                stuck = w;
                why = "no admissible image left for " + name(w);
                return false;
            }
            std::vector<DynBitset> pending;
            h.neighbours(w).for_each([&](std::size_t u) {
                const VertexId nb{opposite(w.side), static_cast<std::uint32_t>(u)};
                if (image(nb) == none)
                    pending.push_back(candidates(nb));
            });
            std::vector<std::uint32_t> typical, all;
            std::vector<double> score;
            cand.for_each([&](std::size_t v) {
                const auto vi = static_cast<std::uint32_t>(v);
                all.push_back(vi);
                const DynBitset & nv = g.neighbours({w.side, vi});
                bool ok = true;
                double worst = 1.0;
                for (const auto & p : pending) {
                    const auto total = p.count();
                    const auto hit = nv.intersect_count(p);
                    if (total == 0 || !at_least(hit, total, typical_ratio))
                        ok = false;
                    worst = std::min(worst, total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total));
                }
                score.push_back(worst);
                if (ok)
                    typical.push_back(vi);
            });
            std::uint32_t pick;
            if (!typical.empty())
                pick = typical[uniform_below(rng, typical.size())];
            else
                pick = all[static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin())];
            place(w, pick, EmbedPhase::greedy);
        }
        return true;
    }

    // Places every unembedded vertex of the given class by a perfect matching on its admissibility graph.
    bool complete_class(Side side, std::uint32_t cls)
    {
        std::vector<std::uint32_t> left;
        const auto & classes = side == Side::A ? hp.class_a : hp.class_b;
        for (std::uint32_t w = 0; w < classes.size(); ++w)
            if (classes[w] == cls && image({side, w}) == none)
                left.push_back(w);
        if (left.empty())
            return true;
        shuffle_in_place(left, rng);
        const VertexSet & cluster = side == Side::A ? gp.a[cls] : gp.b[cls];
        std::vector<std::uint32_t> right = cluster.to_vector();
        shuffle_in_place(right, rng);
        std::vector<std::uint32_t> right_pos(g.side_size(side), none);
        for (std::uint32_t t = 0; t < right.size(); ++t)
            right_pos[right[t]] = t;

        HopcroftKarp hk(left.size(), right.size());
        for (std::uint32_t l = 0; l < left.size(); ++l) {
            std::vector<std::uint32_t> adj;
            candidates({side, left[l]}).for_each([&](std::size_t v) { adj.push_back(right_pos[v]); });
            shuffle_in_place(adj, rng);
            for (auto r : adj)
                hk.add_edge(l, r);
        }
        if (hk.solve() < left.size()) {
            for (auto l : hk.hall_violator())
                hall.push_back({side, left[l]});
            stuck = hall.empty() ? std::optional<VertexId>{} : std::optional<VertexId>{hall.front()};
            why = std::string("matching deficiency in ") + (side == Side::A ? "X_" : "Y_") + std::to_string(cls + 1) +
                  ": Hall violator of size " + std::to_string(hall.size());
            return false;
        }
        for (std::uint32_t l = 0; l < left.size(); ++l)
            place({side, left[l]}, right[hk.mate_of_left()[l]], EmbedPhase::matching);
        return true;
    }
};

} // namespace

Embedding embed_compatible(const BipartiteGraph & g, const BipartiteGraph & h, const ClusterPartition & gpart,
                           const HPartition & hpart, std::span<const ClassEdge> r, std::span<const ClassEdge> rprime,
                           const EmbedOptions & options, EmbedStats * stats)
{
    validate_hpartition(h, hpart);
    gpart.validate(g);
    const std::size_t k = hpart.k;
    if (gpart.k != k)
        throw PreconditionError("embed_compatible: G- and H-partitions have different k");
    if (!gpart.a0.empty() || !gpart.b0.empty())
        throw PreconditionError("embed_compatible: G-partition has exceptional vertices");
    validate_class_edges(r, k, "R");
    validate_class_edges(rprime, k, "R'");
    std::vector<char> seen_a(k, 0), seen_b(k, 0);
    for (auto [i, j] : rprime) {
        if (seen_a[i] || seen_b[j])
            throw PreconditionError("embed_compatible: R' must be a matching");
        seen_a[i] = seen_b[j] = 1;
    }

    std::vector<std::size_t> ta(k), tb(k);
    for (std::size_t i = 0; i < k; ++i) {
        ta[i] = gpart.a[i].size();
        tb[i] = gpart.b[i].size();
    }
    const auto rep = compatibility_report(h, hpart, ta, tb, r, rprime, options.params.epsilon);
    if (!rep.sizes_exact)
        throw PreconditionError("embed_compatible: class sizes must equal cluster sizes (" +
                                (rep.first_violation.empty() ? std::string("spanning case") : rep.first_violation) + ")");
    if (!rep.clause_ii)
        throw PreconditionError("embed_compatible: " + rep.first_violation);
    if (options.require_clause_iii && !rep.clause_iii)
        throw PreconditionError("embed_compatible: " + rep.first_violation);

    BandwidthLabelling lab = options.order.empty() ? bandwidth_labelling(h, LabellingMode::cuthill_mckee)
                                                   : bandwidth_labelling(h, LabellingMode::given, options.order);
    std::vector<VertexId> phase1;
    for (auto v : lab.order) {
        const bool in = v.side == Side::A ? (rep.s_a.contains(v.index) || rep.t_a.contains(v.index))
                                          : (rep.s_b.contains(v.index) || rep.t_b.contains(v.index));
        if (in)
            phase1.push_back(v);
    }
    Rational typical_ratio = options.params.d - options.params.epsilon;
    if (typical_ratio < 0)
        typical_ratio = 0;

    std::optional<VertexId> stuck;
    std::vector<VertexId> hall;
    std::string why;
    const std::size_t attempts = std::max<std::size_t>(options.retries, 1);
    for (std::size_t t = 0; t < attempts; ++t) {
        Attempt at(g, h, gpart, hpart, derive_seed(options.seed, 0xe1, t));
        bool ok = at.greedy(phase1, typical_ratio);
        for (std::size_t i = 0; ok && i < k; ++i)
            if (seen_a[i]) {
                const auto j = std::find_if(rprime.begin(), rprime.end(), [&](auto e) { return e.first == i; })->second;
                ok = at.complete_class(Side::A, static_cast<std::uint32_t>(i)) && at.complete_class(Side::B, j);
            }
        for (std::size_t i = 0; ok && i < k; ++i) {
            if (!seen_a[i])
                ok = at.complete_class(Side::A, static_cast<std::uint32_t>(i));
            if (ok && !seen_b[i])
                ok = at.complete_class(Side::B, static_cast<std::uint32_t>(i));
        }
        if (!ok) {
            stuck = at.stuck;
            hall = at.hall;
            why = at.why;
            continue;
        }
        Embedding emb{std::move(at.map_a), std::move(at.map_b), std::move(at.phase_a), std::move(at.phase_b)};
        if (auto check = verify_embedding(g, h, emb); !check)
            throw StageError("embed", "internal error: produced embedding fails verification: " + check.detail);
        if (stats) {
            stats->attempts = t + 1;
            stats->greedy_vertices = static_cast<std::size_t>(
                std::count(emb.phase_a.begin(), emb.phase_a.end(), EmbedPhase::greedy) +
                std::count(emb.phase_b.begin(), emb.phase_b.end(), EmbedPhase::greedy));
            stats->matching_vertices = h.size_a() + h.size_b() - stats->greedy_vertices;
        }
        return emb;
    }
    throw EmbeddingFailed(stuck, std::move(hall),
                          "all " + std::to_string(attempts) + " attempts failed; last: " + why);
}

PipelineResult embed_bipartite(const BipartiteGraph & g, const BipartiteGraph & h, const PipelineConfig & config)
{
    const auto started = std::chrono::steady_clock::now();
    if (!g.balanced() || !h.balanced())
        throw PreconditionError("embed_bipartite: G and H must be balanced");
    if (g.size_a() != h.size_a())
        throw PreconditionError("embed_bipartite: G and H must have the same number of vertices");
    if (h.max_degree() > config.Delta)
        throw PreconditionError("embed_bipartite: max degree of H is " + std::to_string(h.max_degree()) +
                                " > Delta = " + std::to_string(config.Delta));
    const std::size_t n = g.size_a();

    PipelineResult out;
    PipelineReport & rep = out.report;
    rep.config = config;
    rep.n = n;
    rep.ell_requested = config.ell;

    const std::optional<std::size_t> big_k =
        config.mode == ScheduleMode::practical ? std::optional<std::size_t>(config.overrides.kmax.value_or(8 * config.k0))
                                               : std::nullopt;
    rep.schedule = derive_parameter_schedule(config.gamma, config.Delta, config.epsilon, config.k0, config.mode,
                                             config.overrides, big_k);
    const ParameterSchedule & sched = rep.schedule;

    LemmaGOptions gopt;
    gopt.certify.strategy = config.strategy;
    gopt.certify.budget = config.budget;
    gopt.certify.seed = derive_seed(config.seed, 0x91);
    gopt.hamilton.seed = derive_seed(config.seed, 0x4c);
    const LemmaGState state = lemma_g_phase1(g, sched, gopt);
    const std::size_t k = state.k;
    rep.k = k;
    rep.n_i = state.n_i;
    rep.refinements = state.refinements;
    rep.reduced_edges = state.reduced.edges.size();
    rep.reduced_min_degree = state.reduced_min_degree;
    rep.reduced_cycle = state.cycle;
    rep.moved_low_degree = state.moved_low_degree;
    rep.trimmed = state.trimmed;
    rep.absorbed_gains = state.absorbed_gains;
    rep.size_hypothesis_held =
        std::all_of(state.n_i.begin(), state.n_i.end(), [&](std::size_t ni) { return 8 * ni <= n; });

    const BandwidthLabelling lab = bandwidth_labelling(h, config.labelling_mode, config.labelling);
    rep.bandwidth = lab.bandwidth;
    const std::size_t beta_n = config.beta_n.value_or(std::max<std::size_t>(lab.bandwidth, 1));
    if (beta_n < lab.bandwidth)
        throw PreconditionError("embed_bipartite: beta_n = " + std::to_string(beta_n) + " is below the bandwidth " +
                                std::to_string(lab.bandwidth));
    rep.beta_n = beta_n;
    const std::size_t ell_max = (2 * n) / ((2 * k + 1) * beta_n);
    rep.ell_effective = std::min(config.ell, ell_max);
    if (rep.ell_effective == 0)
        throw StageError("pieces", "no piece count fits (2k + 1) beta_n = " + std::to_string((2 * k + 1) * beta_n) +
                                       " into 2n = " + std::to_string(2 * n));
    const PiecePartition pieces = partition_pieces(h, lab, rep.ell_effective);

    std::vector<ClassEdge> r, rprime;
    for (std::uint32_t i = 0; i < k; ++i) {
        r.emplace_back(i, i);
        if (k > 1)
            r.emplace_back(i, static_cast<std::uint32_t>((i + 1) % k));
        rprime.emplace_back(i, i);
    }

    auto reject = [&](const std::string & stage, const std::string & message) {
        rep.rejected_attempts.push_back({stage, message});
    };

    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(config.attempts, 1); ++attempt) {
        rep.attempts_used = attempt + 1;
        BalancingAssignment phi;
        try {
            BalanceOptions bo;
            bo.max_retries = config.balance_retries;
            bo.seed = derive_seed(config.seed, 0xba, attempt);
            bo.enforce_size_hypothesis = config.mode == ScheduleMode::faithful;
            phi = balance_assignment(state.n_i, pieces.x, pieces.y, sched.xi_lh, bo);
        } catch (const BalanceFailed & e) {
            reject("balance", e.what());
            continue;
        }
        const CycleHomomorphism hom = build_cycle_homomorphism(h, lab, pieces, phi.phi, beta_n, k);
        const HomomorphismReport hrep = verify_cycle_homomorphism(h, hom, state.n_i, sched.xi_lh);
        if (!hrep.all()) {
            reject("homomorphism", "clause check failed");
            continue;
        }
        const auto a = hom.preimage_a();
        const auto b = hom.preimage_b();
        bool thin = false;
        for (std::size_t i = 0; i < k; ++i)
            if (Rational(Integer(a[i])) < config.min_cluster_fraction * Integer(state.n_i[i]) ||
                Rational(Integer(b[i])) < config.min_cluster_fraction * Integer(state.n_i[i]))
                thin = true;
        if (thin) {
            reject("balance", "some a_i or b_i falls below the cluster floor");
            continue;
        }

        LemmaGPartition gp2;
        try {
            gp2 = lemma_g_phase2(g, state, a, b, gopt);
        } catch (const StageError & e) {
            reject(e.stage(), e.what());
            continue;
        } catch (const PreconditionError & e) {
            reject("redistribute", e.what());
            continue;
        }
        if (!gp2.all_certified()) {
            reject("certify", "a cycle pair failed certification at the final parameters");
            continue;
        }

        const HPartition hp = HPartition::from_homomorphism(hom);
        std::vector<std::size_t> ta(k), tb(k);
        for (std::size_t i = 0; i < k; ++i) {
            ta[i] = gp2.partition.a[i].size();
            tb[i] = gp2.partition.b[i].size();
        }
        CompatibilityReport compat = compatibility_report(h, hp, ta, tb, r, rprime, sched.epsilon);
        const bool need_iii = config.mode == ScheduleMode::faithful;
        if (!compat.clause_i || !compat.sizes_exact || !compat.clause_ii || (need_iii && !compat.clause_iii)) {
            reject("compatibility", compat.first_violation.empty() ? "class sizes differ" : compat.first_violation);
            continue;
        }

        EmbedOptions eo;
        eo.params = sched.final_params();
        eo.seed = derive_seed(config.seed, 0xeb, attempt);
        eo.retries = config.embed_retries;
        eo.require_clause_iii = need_iii;
        eo.order = lab.order;
        EmbedStats es;
        Embedding emb;
        try {
            emb = embed_compatible(g, h, gp2.partition, hp, r, rprime, eo, &es);
        } catch (const EmbeddingFailed & e) {
            reject("embed", e.what());
            continue;
        }
        if (auto check = verify_embedding(g, h, emb); !check)
            throw StageError("verify", check.detail);

        rep.phi = std::move(phi);
        rep.homomorphism = hrep;
        rep.a = a;
        rep.b = b;
        rep.redistribution_iterations = gp2.redistribution.iterations;
        rep.redistribution_moves = gp2.redistribution.vertex_moves;
        rep.certified_pairs = gp2.super_certificates.size() + gp2.regular_certificates.size();
        rep.compatibility = std::move(compat);
        rep.embed = es;
        rep.verified = true;
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out.embedding = std::move(emb);
        return out;
    }
    const auto & last = rep.rejected_attempts.back();
    throw StageError("pipeline", "no attempt produced an embedding after " + std::to_string(rep.attempts_used) +
                                     " tries; last rejection [" + last.stage + "] " + last.message);
}

} // namespace bipemb
