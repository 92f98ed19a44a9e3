#include "bipemb/regularity.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <string>

#include "bipemb/rng.hpp"

namespace bipemb {

void RegularityParams::validate() const
{
    if (epsilon <= 0 || epsilon > 1)
        throw PreconditionError("epsilon must lie in (0, 1], got " + bipemb::to_string(epsilon));
    if (d < 0 || d > 1)
        throw PreconditionError("d must lie in [0, 1], got " + bipemb::to_string(d));
}

const char * to_string(Strategy s) noexcept
{
    switch (s) {
    case Strategy::exhaustive: return "exhaustive";
    case Strategy::sampled: return "sampled";
    case Strategy::guided: return "guided";
    }
    return "?";
}

const char * to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::certified_regular: return "certified-regular";
    case Verdict::certified_irregular: return "certified-irregular";
    case Verdict::below_density: return "below-density";
    case Verdict::certified_super_regular: return "certified-super-regular";
    case Verdict::failed_super_regular: return "failed-super-regular";
    }
    return "?";
}

namespace {

/// Smallest integer s with s ≥ ε·size.
std::size_t min_subset_size(const Rational & epsilon, std::size_t size)
{
    const Integer c = ceil(Rational(epsilon * Integer(size)));
    return std::max<std::size_t>(1, c.convert_to<std::size_t>());
}

/// Deviation test |e/(a·s) − E/N| > ε in integers: |e·N − E·a·s| / (a·s·N) > ε.
class DeviationTest {
public:
    DeviationTest(std::uint64_t base_edges, std::uint64_t base_pairs, const Rational & epsilon)
        : base_edges_(base_edges), base_pairs_(base_pairs), epsilon_(epsilon)
    {
    }

    bool exceeds(std::uint64_t edges, std::uint64_t pairs) const
    {
        const auto lhs = static_cast<uint128>(edges) * base_pairs_;
        const auto rhs = static_cast<uint128>(base_edges_) * pairs;
        const auto diff = lhs > rhs ? lhs - rhs : rhs - lhs;
        const auto denom = static_cast<uint128>(pairs) * base_pairs_;
        if ((diff >> 62) == 0 && (denom >> 62) == 0)
            return epsilon_.exceeded_by(static_cast<std::uint64_t>(diff), static_cast<std::uint64_t>(denom));
        return deviation(edges, pairs) > epsilon_.value();
    }

    Rational deviation(std::uint64_t edges, std::uint64_t pairs) const
    {
        Rational r = Rational(Integer(edges), Integer(pairs)) - Rational(Integer(base_edges_), Integer(base_pairs_));
        return r < 0 ? Rational(-r) : r;
    }

private:
    std::uint64_t base_edges_;
    std::uint64_t base_pairs_;
    FastRatio epsilon_;
};

Integer binomial_tail(std::size_t n, std::size_t from)
{
    Integer total = 0, c = 1; // c = C(n, s)
    for (std::size_t s = 0; s <= n; ++s) {
        if (s >= from)
            total += c;
        c = c * Integer(n - s) / Integer(s + 1);
    }
    return total;
}

struct Context {
    const BipartiteGraph & g;
    const VertexSet & u;
    const VertexSet & w;
    std::vector<std::uint32_t> u_list;
    std::vector<std::uint32_t> w_list;
    std::size_t su;
    std::size_t sw;
    DeviationTest test;
};

IrregularityWitness make_witness(const Context & ctx, std::span<const std::uint32_t> u_idx,
                                 std::span<const std::uint32_t> w_idx, std::uint64_t edges)
{
    IrregularityWitness wit{VertexSet::of(ctx.u.side(), ctx.u.universe(), u_idx),
                            VertexSet::of(ctx.w.side(), ctx.w.universe(), w_idx), {}};
    wit.deviation = ctx.test.deviation(edges, static_cast<std::uint64_t>(u_idx.size()) * w_idx.size());
    return wit;
}

/// Exhaustive search: enumerate subsets P' of the smaller side; for each size t of the other
/// side the extreme edge counts come from its top-t / bottom-t vertices by degree into P'.
std::optional<IrregularityWitness> exhaustive_search(const Context & ctx, std::uint64_t cap, std::size_t & checked)
{
    const bool p_is_u = ctx.u_list.size() <= ctx.w_list.size();
    const auto & p_list = p_is_u ? ctx.u_list : ctx.w_list;
    const auto & q_list = p_is_u ? ctx.w_list : ctx.u_list;
    const std::size_t sp = p_is_u ? ctx.su : ctx.sw;
    const std::size_t sq = p_is_u ? ctx.sw : ctx.su;
    const Side p_side = p_is_u ? ctx.u.side() : ctx.w.side();

    const Integer pairs = binomial_tail(p_list.size(), sp) * binomial_tail(q_list.size(), sq);
    if (p_list.size() > 62 || pairs > Integer(cap))
        throw PreconditionError("exhaustive certification refused: " + pairs.str() +
                                " qualifying subset pairs exceed the enumeration cap " + std::to_string(cap));
    checked = pairs.convert_to<std::size_t>();

    std::vector<std::uint64_t> masks(q_list.size(), 0);
    for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
        const auto & nb = ctx.g.neighbours({opposite(p_side), q_list[qi]});
        for (std::size_t pi = 0; pi < p_list.size(); ++pi)
            if (nb.test(p_list[pi]))
                masks[qi] |= std::uint64_t{1} << pi;
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> counts(q_list.size()); // (count, q local index)
    std::vector<std::uint64_t> prefix(q_list.size() + 1, 0);
    const std::size_t np = p_list.size();
    for (std::size_t s = sp; s <= np; ++s) {
        std::uint64_t subset = (s == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << s) - 1);
        const std::uint64_t limit = std::uint64_t{1} << np;
        while (subset < limit) {
            for (std::size_t qi = 0; qi < q_list.size(); ++qi)
                counts[qi] = {static_cast<std::uint32_t>(std::popcount(masks[qi] & subset)), static_cast<std::uint32_t>(qi)};
            std::stable_sort(counts.begin(), counts.end(),
                             [](const auto & x, const auto & y) { return x.first > y.first; });
            for (std::size_t i = 0; i < counts.size(); ++i)
                prefix[i + 1] = prefix[i] + counts[i].first;
            const std::uint64_t total = prefix[counts.size()];
            for (std::size_t t = sq; t <= q_list.size(); ++t) {
                const std::uint64_t top = prefix[t];
                const std::uint64_t bottom = total - prefix[q_list.size() - t];
                const std::uint64_t size = static_cast<std::uint64_t>(s) * t;
                for (int side = 0; side < 2; ++side) {
                    const std::uint64_t e = side == 0 ? top : bottom;
                    if (!ctx.test.exceeds(e, size))
                        continue;
                    std::vector<std::uint32_t> p_sub, q_sub;
                    for (std::size_t pi = 0; pi < np; ++pi)
                        if ((subset >> pi) & 1U)
                            p_sub.push_back(p_list[pi]);
                    for (std::size_t i = 0; i < t; ++i) {
                        const auto & entry = side == 0 ? counts[i] : counts[q_list.size() - t + i];
                        q_sub.push_back(q_list[entry.second]);
                    }
                    std::sort(q_sub.begin(), q_sub.end());
                    return p_is_u ? make_witness(ctx, p_sub, q_sub, e) : make_witness(ctx, q_sub, p_sub, e);
                }
            }
            // Gosper's hack: next subset with the same popcount
            const std::uint64_t c = subset & (~subset + 1);
            const std::uint64_t r = subset + c;
            if (r == 0)
                break;
            subset = (((r ^ subset) >> 2) / c) | r;
        }
    }
    return std::nullopt;
}

std::uint64_t edges_between(const Context & ctx, std::span<const std::uint32_t> u_idx, const DynBitset & w_bits)
{
    std::uint64_t e = 0;
    for (auto ui : u_idx)
        e += ctx.g.neighbours({ctx.u.side(), ui}).intersect_count(w_bits);
    return e;
}

std::optional<IrregularityWitness> uniform_search(const Context & ctx, std::size_t samples, Rng & rng,
                                                  std::size_t & used)
{
    std::vector<std::uint32_t> pool_u = ctx.u_list, pool_w = ctx.w_list;
    DynBitset w_bits(ctx.w.universe());
    for (std::size_t t = 0; t < samples; ++t) {
        ++used;
        partial_shuffle(pool_u, ctx.su, rng);
        partial_shuffle(pool_w, ctx.sw, rng);
        w_bits.clear();
        for (std::size_t i = 0; i < ctx.sw; ++i)
            w_bits.set(pool_w[i]);
        const std::span<const std::uint32_t> u_sub(pool_u.data(), ctx.su);
        const auto e = edges_between(ctx, u_sub, w_bits);
        if (ctx.test.exceeds(e, static_cast<std::uint64_t>(ctx.su) * ctx.sw)) {
            std::vector<std::uint32_t> us(u_sub.begin(), u_sub.end());
            std::vector<std::uint32_t> ws(pool_w.begin(), pool_w.begin() + static_cast<std::ptrdiff_t>(ctx.sw));
            std::sort(us.begin(), us.end());
            std::sort(ws.begin(), ws.end());
            return make_witness(ctx, us, ws, e);
        }
    }
    return std::nullopt;
}

/// Given a fixed subset `fixed` of one side, the densest / sparsest `take`-subset of the
/// other side `free_list` is its top / bottom vertices by degree into `fixed`.
std::optional<IrregularityWitness> probe(const Context & ctx, bool fixed_is_w, const DynBitset & fixed)
{
    const auto & free_list = fixed_is_w ? ctx.u_list : ctx.w_list;
    const Side free_side = fixed_is_w ? ctx.u.side() : ctx.w.side();
    const std::size_t take = fixed_is_w ? ctx.su : ctx.sw;
    const std::size_t fixed_size = fixed.count();
    if (fixed_size < (fixed_is_w ? ctx.sw : ctx.su))
        return std::nullopt;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> deg(free_list.size());
    for (std::size_t i = 0; i < free_list.size(); ++i)
        deg[i] = {static_cast<std::uint32_t>(ctx.g.neighbours({free_side, free_list[i]}).intersect_count(fixed)),
                  free_list[i]};
    std::stable_sort(deg.begin(), deg.end(), [](const auto & x, const auto & y) { return x.first > y.first; });

    const auto fixed_idx = fixed.indices();
    std::vector<std::uint32_t> fixed_vec(fixed_idx.begin(), fixed_idx.end());
    for (int side = 0; side < 2; ++side) {
        std::uint64_t e = 0;
        std::vector<std::uint32_t> chosen;
        for (std::size_t i = 0; i < take; ++i) {
            const auto & entry = side == 0 ? deg[i] : deg[deg.size() - take + i];
            e += entry.first;
            chosen.push_back(entry.second);
        }
        if (ctx.test.exceeds(e, static_cast<std::uint64_t>(take) * fixed_size)) {
            std::sort(chosen.begin(), chosen.end());
            return fixed_is_w ? make_witness(ctx, chosen, fixed_vec, e) : make_witness(ctx, fixed_vec, chosen, e);
        }
    }
    return std::nullopt;
}

std::optional<IrregularityWitness> guided_search(const Context & ctx, std::size_t max_probes, std::size_t & used)
{
    const std::size_t rounds = std::max(ctx.u_list.size(), ctx.w_list.size());
    for (std::size_t r = 0; r < rounds && used < max_probes; ++r) {
        for (int from_u = 1; from_u >= 0; --from_u) {
            const auto & list = from_u ? ctx.u_list : ctx.w_list;
            if (r >= list.size() || used >= max_probes)
                continue;
            ++used;
            const Side side = from_u ? ctx.u.side() : ctx.w.side();
            const VertexSet & other = from_u ? ctx.w : ctx.u;
            DynBitset nb = ctx.g.neighbours({side, list[r]});
            nb &= other.bits();
            DynBitset rest = other.bits();
            rest.subtract(nb);
            // probe with a neighbourhood on the W side fixes W' = N(u) ∩ W
            if (auto wit = probe(ctx, from_u != 0, nb))
                return wit;
            if (auto wit = probe(ctx, from_u != 0, rest))
                return wit;
        }
    }
    return std::nullopt;
}

void require_pair(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w)
{
    if (u.empty() || w.empty())
        throw PreconditionError("regularity check on an empty vertex set");
    if (u.side() == w.side())
        throw PreconditionError("regularity check on two sets of the same side");
    if (u.universe() != g.side_size(u.side()) || w.universe() != g.side_size(w.side()))
        throw PreconditionError("vertex set universe does not match graph side size");
}

} // namespace

PairCertificate check_regular_pair(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w,
                                   const RegularityParams & params, const CertifyOptions & options)
{
    params.validate();
    require_pair(g, u, w);

    const std::uint64_t base_edges = edge_count_between(g, u, w);
    const std::uint64_t base_pairs = static_cast<std::uint64_t>(u.size()) * w.size();
    Context ctx{g,
                u,
                w,
                u.to_vector(),
                w.to_vector(),
                min_subset_size(params.epsilon, u.size()),
                min_subset_size(params.epsilon, w.size()),
                DeviationTest(base_edges, base_pairs, params.epsilon)};

    PairCertificate cert;
    cert.u = u;
    cert.w = w;
    cert.params = params;
    cert.strategy = options.strategy;
    cert.base_density = Rational(Integer(base_edges), Integer(base_pairs));

    std::size_t used = 0;
    switch (options.strategy) {
    case Strategy::exhaustive:
        cert.witness = exhaustive_search(ctx, options.enumeration_cap, used);
        break;
    case Strategy::sampled: {
        Rng rng(options.seed);
        cert.witness = uniform_search(ctx, options.budget, rng, used);
        break;
    }
    case Strategy::guided: {
        cert.witness = guided_search(ctx, options.budget / 2, used);
        if (!cert.witness) {
            Rng rng(options.seed);
            cert.witness = uniform_search(ctx, options.budget - used, rng, used);
        }
        break;
    }
    }
    cert.samples_used = used;

    if (cert.witness)
        cert.verdict = Verdict::certified_irregular;
    else if (cert.base_density < params.d)
        cert.verdict = Verdict::below_density;
    else
        cert.verdict = Verdict::certified_regular;
    return cert;
}

PairCertificate check_super_regular_pair(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w,
                                         const RegularityParams & params, const CertifyOptions & options)
{
    PairCertificate cert = check_regular_pair(g, u, w, params, options);
    const bool regular = cert.verdict == Verdict::certified_regular;

    auto first_low = [&](const VertexSet & from, const VertexSet & into) -> std::optional<VertexId> {
        std::optional<VertexId> low;
        from.bits().for_each([&](std::size_t i) {
            if (low)
                return;
            const VertexId v{from.side(), static_cast<std::uint32_t>(i)};
            if (below(degree_into(g, v, into), into.size(), params.d))
                low = v;
        });
        return low;
    };
    cert.low_degree_vertex = first_low(u, w);
    if (!cert.low_degree_vertex)
        cert.low_degree_vertex = first_low(w, u);

    cert.verdict = (regular && !cert.low_degree_vertex) ? Verdict::certified_super_regular
                                                        : Verdict::failed_super_regular;
    return cert;
}

TypicalReport typical_vertices(const BipartiteGraph & g, const VertexSet & a, const VertexSet & b,
                               const VertexSet & b_prime, const RegularityParams & params)
{
    params.validate();
    if (a.side() == b.side() || b.side() != b_prime.side())
        throw PreconditionError("typical_vertices: A must be opposite to B and B'");

    TypicalReport report{VertexSet(a.side(), a.universe()), true};
    DynBitset outside = b_prime.bits();
    outside.subtract(b.bits());
    report.precondition_met = outside.none() && at_least(b_prime.size(), b.size(), params.epsilon);

    const Rational threshold = params.d - params.epsilon;
    a.bits().for_each([&](std::size_t i) {
        const VertexId v{a.side(), static_cast<std::uint32_t>(i)};
        if (at_least(degree_into(g, v, b_prime), b_prime.size(), threshold))
            report.typical.insert(static_cast<std::uint32_t>(i));
    });
    return report;
}

RegularityParams rebound_after_perturbation(const RegularityParams & params, const Rational & alpha,
                                            const Rational & beta)
{
    if (alpha < 0 || beta < 0)
        throw PreconditionError("rebound_after_perturbation: alpha and beta must be non-negative");
    RegularityParams out;
    out.epsilon = params.epsilon + 3 * (sqrt_upper(alpha) + sqrt_upper(beta));
    if (out.epsilon > 1)
        out.epsilon = 1;
    out.d = params.d - 2 * (alpha + beta);
    if (out.d < 0)
        out.d = 0;
    return out;
}

// ---------------------------------------------------------------------------------------------
// ClusterPartition / ReducedGraph

void ClusterPartition::validate(const BipartiteGraph & g) const
{
    if (a.size() != k || b.size() != k)
        throw PreconditionError("partition: expected " + std::to_string(k) + " clusters per side");
    for (Side s : {Side::A, Side::B}) {
        const auto & clusters = s == Side::A ? a : b;
        const auto & exceptional = s == Side::A ? a0 : b0;
        DynBitset seen(g.side_size(s));
        std::size_t total = 0;
        auto absorb = [&](const VertexSet & set) {
            if (set.side() != s || set.universe() != g.side_size(s))
                throw PreconditionError(std::string("partition: class on wrong side or universe for side ") + side_name(s));
            if (seen.intersect_count(set.bits()) != 0)
                throw PreconditionError(std::string("partition: overlapping classes on side ") + side_name(s));
            seen |= set.bits();
            total += set.size();
        };
        for (const auto & c : clusters)
            absorb(c);
        absorb(exceptional);
        if (total != g.side_size(s))
            throw PreconditionError(std::string("partition: classes do not cover side ") + side_name(s));
    }
}

bool ClusterPartition::is_equipartition() const
{
    if (k == 0)
        return true;
    const auto size = a.front().size();
    for (std::size_t i = 0; i < k; ++i)
        if (a[i].size() != size || b[i].size() != size)
            return false;
    return true;
}

std::optional<std::size_t> ClusterPartition::cluster_of(VertexId v) const
{
    const auto & clusters = v.side == Side::A ? a : b;
    for (std::size_t i = 0; i < clusters.size(); ++i)
        if (clusters[i].contains(v.index))
            return i;
    return std::nullopt;
}

bool ReducedGraph::has_edge(std::size_t i, std::size_t j) const
{
    return std::find(edges.begin(), edges.end(), std::pair<std::uint32_t, std::uint32_t>(
                                                     static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j))) !=
           edges.end();
}

BipartiteGraph ReducedGraph::as_graph() const
{
    return BipartiteGraph::build(k, k, edges);
}

ReducedGraph maximal_reduced_graph(const BipartiteGraph & g, const ClusterPartition & partition,
                                   const RegularityParams & params, const CertifyOptions & options)
{
    params.validate();
    partition.validate(g);
    ReducedGraph r;
    r.k = partition.k;
    r.params = params;
    r.certificates.reserve(r.k * r.k);
    for (std::size_t i = 0; i < r.k; ++i)
        for (std::size_t j = 0; j < r.k; ++j) {
            CertifyOptions opts = options;
            opts.seed = derive_seed(options.seed, i, j);
            auto cert = check_regular_pair(g, partition.a[i], partition.b[j], params, opts);
            if (cert.verdict == Verdict::certified_regular)
                r.edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            r.certificates.push_back(std::move(cert));
        }
    return r;
}

// ---------------------------------------------------------------------------------------------
// build_regular_partition

namespace {

ClusterPartition contiguous_equipartition(const BipartiteGraph & g, std::size_t k)
{
    const std::size_t n = g.size_a();
    const std::size_t size = n / k;
    ClusterPartition p;
    p.k = k;
    p.a0 = VertexSet(Side::A, n);
    p.b0 = VertexSet(Side::B, n);
    for (std::size_t i = 0; i < k; ++i) {
        VertexSet ca(Side::A, n), cb(Side::B, n);
        for (std::size_t v = i * size; v < (i + 1) * size; ++v) {
            ca.insert(static_cast<std::uint32_t>(v));
            cb.insert(static_cast<std::uint32_t>(v));
        }
        p.a.push_back(std::move(ca));
        p.b.push_back(std::move(cb));
    }
    for (std::size_t v = k * size; v < n; ++v) {
        p.a0.insert(static_cast<std::uint32_t>(v));
        p.b0.insert(static_cast<std::uint32_t>(v));
    }
    return p;
}

/// Splits every cluster in two halves of equal size; clusters with an irregular pair are
/// ordered by degree into the witness subset on the other side first.
ClusterPartition refine(const BipartiteGraph & g, const ClusterPartition & p, const ReducedGraph & certs)
{
    const std::size_t half = p.a.front().size() / 2;
    ClusterPartition out;
    out.k = 2 * p.k;
    out.a0 = p.a0;
    out.b0 = p.b0;

    for (Side s : {Side::A, Side::B}) {
        const auto & clusters = s == Side::A ? p.a : p.b;
        auto & target = s == Side::A ? out.a : out.b;
        auto & exceptional = s == Side::A ? out.a0 : out.b0;
        for (std::size_t i = 0; i < p.k; ++i) {
            const VertexSet * guide = nullptr;
            for (std::size_t j = 0; j < p.k && !guide; ++j) {
                const auto & cert = s == Side::A ? certs.certificate(i, j) : certs.certificate(j, i);
                if (cert.witness)
                    guide = s == Side::A ? &cert.witness->w_sub : &cert.witness->u_sub;
            }
            auto members = clusters[i].to_vector();
            if (guide) {
                std::vector<std::size_t> deg(g.side_size(s), 0);
                for (auto v : members)
                    deg[v] = g.neighbours({s, v}).intersect_count(guide->bits());
                std::stable_sort(members.begin(), members.end(),
                                 [&](std::uint32_t x, std::uint32_t y) { return deg[x] > deg[y]; });
            }
            VertexSet first(s, g.side_size(s)), second(s, g.side_size(s));
            for (std::size_t t = 0; t < members.size(); ++t) {
                if (t < half)
                    first.insert(members[t]);
                else if (t < 2 * half)
                    second.insert(members[t]);
                else
                    exceptional.insert(members[t]);
            }
            target.push_back(std::move(first));
            target.push_back(std::move(second));
        }
    }
    return out;
}

} // namespace

PartitionBuild build_regular_partition(const BipartiteGraph & g, const RegularityParams & params, std::size_t k0,
                                       std::size_t kmax, const CertifyOptions & options)
{
    params.validate();
    if (!g.balanced())
        throw PreconditionError("build_regular_partition: host graph must be balanced");
    if (k0 == 0 || k0 > kmax)
        throw PreconditionError("build_regular_partition: need 1 <= k0 <= kmax");
    const std::size_t n = g.size_a();
    if (n < kmax)
        throw PreconditionError("build_regular_partition: need n >= kmax (n = " + std::to_string(n) +
                                ", kmax = " + std::to_string(kmax) + ")");

    PartitionBuild current;
    current.partition = contiguous_equipartition(g, k0);
    for (;;) {
        CertifyOptions opts = options;
        opts.seed = derive_seed(options.seed, current.refinements);
        current.reduced = maximal_reduced_graph(g, current.partition, params, opts);
        current.regular_pairs = static_cast<std::size_t>(std::count_if(
            current.reduced.certificates.begin(), current.reduced.certificates.end(),
            [](const PairCertificate & c) { return c.epsilon_regular(); }));

        const std::size_t k = current.partition.k;
        const Rational exceptional_bound = params.epsilon * Integer(n);
        const bool exceptional_ok = !(Rational(Integer(current.partition.a0.size())) > exceptional_bound) &&
                                    !(Rational(Integer(current.partition.b0.size())) > exceptional_bound);
        if (!exceptional_ok)
            throw PartitionNotCertified(current, "exceptional set exceeds epsilon * n after refinement");
        if (at_least(current.regular_pairs, k * k, Rational(1) - params.epsilon))
            return current;
        if (2 * k > kmax || current.partition.a.front().size() < 2)
            throw PartitionNotCertified(current, "only " + std::to_string(current.regular_pairs) + " of " +
                                                     std::to_string(k * k) + " pairs certified with k = " +
                                                     std::to_string(k) + "; refining would exceed kmax");
        current.partition = refine(g, current.partition, current.reduced);
        ++current.refinements;
    }
}

// ---------------------------------------------------------------------------------------------
// super_regularize

SuperRegularizeResult super_regularize(const BipartiteGraph & g, const ClusterPartition & partition,
                                       const ReducedGraph & reduced,
                                       std::span<const std::pair<std::uint32_t, std::uint32_t>> rstar,
                                       const SuperRegularizeOptions & options)
{
    options.weakened.validate();
    partition.validate(g);
    const std::size_t k = partition.k;
    if (reduced.k != k)
        throw PreconditionError("super_regularize: reduced graph and partition disagree on k");

    std::vector<std::size_t> deg_a(k, 0), deg_b(k, 0);
    std::vector<std::vector<std::size_t>> partners_a(k), partners_b(k);
    for (const auto & [i, j] : rstar) {
        if (i >= k || j >= k || !reduced.has_edge(i, j))
            throw PreconditionError("super_regularize: R* edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                    ") is not an edge of R");
        partners_a[i].push_back(j);
        partners_b[j].push_back(i);
        if (++deg_a[i] > options.max_degree || ++deg_b[j] > options.max_degree)
            throw PreconditionError("super_regularize: R* exceeds the maximum degree bound");
    }

    SuperRegularizeResult result;
    result.partition = partition;
    auto & p = result.partition;
    const std::size_t n = g.size_a();
    const Rational first_threshold = reduced.params.d - reduced.params.epsilon;

    auto check_bound = [&](const std::string & culprit) {
        const Rational bound = options.exceptional_fraction * Integer(n);
        if (Rational(Integer(p.a0.size())) > bound || Rational(Integer(p.b0.size())) > bound)
            throw StageError("super-regularize", "exceptional sets (" + std::to_string(p.a0.size()) + ", " +
                                                     std::to_string(p.b0.size()) + ") exceed " +
                                                     bipemb::to_string(bound) + " after pruning pair " + culprit);
    };

    for (std::size_t pass = 0;; ++pass) {
        const Rational & threshold = pass == 0 ? first_threshold : options.weakened.d;
        std::vector<VertexId> low;
        std::size_t worst_pair = 0, worst_count = 0;
        for (std::size_t e = 0; e < rstar.size(); ++e) {
            const auto [i, j] = rstar[e];
            std::size_t count = 0;
            for (Side s : {Side::A, Side::B}) {
                const VertexSet & from = s == Side::A ? p.a[i] : p.b[j];
                const VertexSet & into = s == Side::A ? p.b[j] : p.a[i];
                from.bits().for_each([&](std::size_t v) {
                    const VertexId id{s, static_cast<std::uint32_t>(v)};
                    if (below(degree_into(g, id, into), into.size(), threshold)) {
                        low.push_back(id);
                        ++count;
                    }
                });
            }
            if (count > worst_count) {
                worst_count = count;
                worst_pair = e;
            }
        }
        std::sort(low.begin(), low.end());
        low.erase(std::unique(low.begin(), low.end()), low.end());
        for (const auto & v : low) {
            auto & clusters = v.side == Side::A ? p.a : p.b;
            for (auto & c : clusters)
                if (c.contains(v.index))
                    c.erase(v.index);
            (v.side == Side::A ? p.a0 : p.b0).insert(v.index);
        }
        result.moved_low_degree += low.size();

        // re-equalise: trim every cluster to the smallest size, weakest vertices first
        std::size_t target = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < k; ++i)
            target = std::min({target, p.a[i].size(), p.b[i].size()});
        std::size_t trimmed = 0;
        for (Side s : {Side::A, Side::B}) {
            auto & clusters = s == Side::A ? p.a : p.b;
            const auto & partners = s == Side::A ? partners_a : partners_b;
            for (std::size_t i = 0; i < k; ++i) {
                if (clusters[i].size() <= target)
                    continue;
                auto members = clusters[i].to_vector();
                std::vector<Rational> strength(members.size(), Rational(1));
                for (std::size_t t = 0; t < members.size(); ++t)
                    for (auto j : partners[i]) {
                        const VertexSet & into = s == Side::A ? p.b[j] : p.a[j];
                        if (into.empty())
                            continue;
                        const Rational frac(Integer(degree_into(g, {s, members[t]}, into)), Integer(into.size()));
                        strength[t] = std::min(strength[t], frac);
                    }
                std::vector<std::size_t> order(members.size());
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t x, std::size_t y) { return strength[x] < strength[y]; });
                const std::size_t excess = clusters[i].size() - target;
                for (std::size_t t = 0; t < excess; ++t) {
                    clusters[i].erase(members[order[t]]);
                    (s == Side::A ? p.a0 : p.b0).insert(members[order[t]]);
                }
                trimmed += excess;
            }
        }
        result.trimmed += trimmed;

        if (!low.empty() || trimmed > 0) {
            const auto [wi, wj] = rstar.empty() ? std::pair<std::uint32_t, std::uint32_t>{0, 0} : rstar[worst_pair];
            check_bound("(A_" + std::to_string(wi + 1) + ", B_" + std::to_string(wj + 1) + ")");
        }
        if (target == 0)
            throw StageError("super-regularize", "pruning emptied a cluster");
        if (pass > 0 && low.empty() && trimmed == 0)
            break;
    }

    for (std::size_t e = 0; e < rstar.size(); ++e) {
        const auto [i, j] = rstar[e];
        CertifyOptions opts = options.certify;
        opts.seed = derive_seed(options.certify.seed, 0x5e, e);
        auto cert = check_super_regular_pair(g, p.a[i], p.b[j], options.weakened, opts);
        if (cert.verdict != Verdict::certified_super_regular)
            throw StageError("super-regularize", "pair (A_" + std::to_string(i + 1) + ", B_" + std::to_string(j + 1) +
                                                     ") failed re-certification: " + to_string(cert.verdict));
        result.certificates.push_back(std::move(cert));
    }
    return result;
}

} // namespace bipemb
