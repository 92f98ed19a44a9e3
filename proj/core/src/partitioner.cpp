#include "bipemb/partitioner.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bipemb/error.hpp"
#include "bipemb/rng.hpp"

namespace bipemb {

const char * to_string(ScheduleMode m) noexcept
{
    return m == ScheduleMode::faithful ? "faithful" : "practical";
}

bool ParameterSchedule::all_checks_hold() const
{
    return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck & c) { return c.holds; });
}

ParameterSchedule derive_parameter_schedule(const Rational & gamma, std::size_t Delta, const Rational & epsilon,
                                            std::size_t k0, ScheduleMode mode, const ScheduleOverrides & overrides,
                                            std::optional<std::size_t> K0)
{
    if (gamma <= 0 || gamma >= Rational(1, 2))
        throw PreconditionError("gamma must lie in (0, 1/2), got " + to_string(gamma));
    if (Delta == 0 || k0 == 0)
        throw PreconditionError("Delta and k0 must be positive");

    ParameterSchedule s;
    s.mode = mode;
    s.gamma = gamma;
    s.Delta = Delta;
    s.k0 = k0;

    if (mode == ScheduleMode::practical) {
        const Rational e = overrides.epsilon.value_or(epsilon);
        const Rational d = overrides.d.value_or(Rational(3, 10));
        RegularityParams{e, d}.validate();
        s.epsilon = e;
        s.d_lg = s.d_prime = s.d_dprime = s.d_hat = d;
        s.eps_prime = s.eps_dprime = s.eps_hat = e;
        s.alpha = 0;
        s.k0_prime = k0;
        s.K0 = K0.value_or(overrides.kmax.value_or(8 * k0));
        s.xi_lg = overrides.xi_lg.value_or(Rational(1, 4));
        s.xi_lh = overrides.xi_lh.value_or(Rational(1, 4));
        if (s.K0 < k0)
            throw PreconditionError("kmax must be at least k0");
        return s;
    }

    if (gamma >= Rational(1, 20))
        throw PreconditionError("faithful mode needs gamma < 1/20, got " + to_string(gamma));
    if (epsilon <= 0 || epsilon > gamma * gamma / 1000)
        throw PreconditionError("faithful mode needs 0 < epsilon <= gamma^2/1000, got " + to_string(epsilon));

    s.epsilon = epsilon;
    s.d_lg = gamma * gamma / 100;
    s.eps_prime = epsilon * epsilon * epsilon * gamma * gamma * gamma;
    s.d_prime = epsilon + gamma * gamma;
    s.eps_dprime = s.eps_prime / (1 - 2 * s.eps_prime);
    s.d_dprime = s.d_prime - 4 * s.eps_prime;
    s.alpha = s.eps_dprime / (gamma * (1 - s.eps_dprime));
    s.eps_hat = s.eps_dprime + 6 * sqrt_upper(s.alpha, 128);
    s.d_hat = s.d_dprime - 4 * s.alpha;

    auto add = [&](std::string name, bool holds) { s.checks.push_back({std::move(name), holds}); };
    {
        // ε'' + 6√α ≤ ε/10  ⇔  r := ε/10 − ε'' ≥ 0 and r² ≥ 36α
        const Rational r = epsilon / 10 - s.eps_dprime;
        add("eps_hat <= eps/10", r >= 0 && r * r >= 36 * s.alpha);
    }
    add("d_hat - eps >= 2 d_lg", s.d_hat - epsilon >= 2 * s.d_lg);
    const Rational slack = gamma - s.d_prime - s.eps_dprime;
    add("gamma - d' - eps'' > 0", slack > 0);
    add("(1/2 + gamma - eps'')/(1 - d'') >= 1/2 + 2 gamma/3",
        (Rational(1, 2) + gamma - s.eps_dprime) / (1 - s.d_dprime) >= Rational(1, 2) + 2 * gamma / 3);
    add("d''/(1 - d'') <= gamma/6", s.d_dprime / (1 - s.d_dprime) <= gamma / 6);

    if (slack > 0)
        s.k0_prime = std::max<std::size_t>(k0, ceil(Rational(1 / slack)).convert_to<std::size_t>());
    else
        s.k0_prime = k0;
    add("(gamma - d' - eps'') k0' >= 1", slack * Integer(s.k0_prime) >= 1);

    s.K0 = K0.value_or(s.k0_prime);
    if (s.K0 < s.k0_prime)
        throw PreconditionError("K0 must be at least k0' = " + std::to_string(s.k0_prime));
    const Integer big_k(s.K0);
    const Rational a = epsilon / (1000 * big_k);
    const Rational b = s.d_lg / (100 * big_k * big_k);
    s.xi_lg = std::min(Rational(a * a), Rational(b * b));
    // ξ_lg is a rational square, so √ξ_lg is exact
    const Rational root = *exact_sqrt(s.xi_lg);
    add("100 K0 sqrt(xi_lg) <= eps/10", 100 * big_k * root <= epsilon / 10);
    add("100 K0^2 sqrt(xi_lg) <= d_lg", 100 * big_k * big_k * root <= s.d_lg);
    s.xi_lh = s.xi_lg * epsilon / (100 * Integer(Delta) * big_k * big_k);

    for (const auto & c : s.checks)
        if (!c.holds)
            throw StageError("schedule", "faithful inequality violated: " + c.name);
    return s;
}

std::vector<std::size_t> candidate_index_set(const BipartiteGraph & g, std::uint32_t x, std::uint32_t y,
                                             const ClusterPartition & partition, const Rational & d)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < partition.k; ++i) {
        const auto & bi = partition.b[i];
        const auto & ai = partition.a[i];
        if (at_least(degree_into(g, {Side::A, x}, bi), bi.size(), d) &&
            at_least(degree_into(g, {Side::B, y}, ai), ai.size(), d))
            out.push_back(i);
    }
    return out;
}

AbsorbResult absorb_exceptional_vertices(const BipartiteGraph & g, const ClusterPartition & partition,
                                         const Rational & d_dprime, const Rational & gamma)
{
    partition.validate(g);
    if (partition.a0.size() != partition.b0.size())
        throw PreconditionError("absorb: |A_0| = " + std::to_string(partition.a0.size()) + " differs from |B_0| = " +
                                std::to_string(partition.b0.size()));
    (void)gamma; // bound ⌈|A_0|/(γk)⌉ is a property of the instance, checked by callers

    AbsorbResult result;
    result.partition = partition;
    result.gains.assign(partition.k, 0);
    const auto xs = partition.a0.to_vector();
    const auto ys = partition.b0.to_vector();
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const auto candidates = candidate_index_set(g, xs[t], ys[t], partition, d_dprime);
        if (candidates.empty())
            throw StageError("absorb", "I(x, y) is empty for exceptional pair (A" + std::to_string(xs[t]) + ", B" +
                                           std::to_string(ys[t]) + ")");
        const auto best = *std::min_element(candidates.begin(), candidates.end(), [&](std::size_t p, std::size_t q) {
            return result.gains[p] < result.gains[q];
        });
        result.partition.a[best].insert(xs[t]);
        result.partition.b[best].insert(ys[t]);
        result.partition.a0.erase(xs[t]);
        result.partition.b0.erase(ys[t]);
        ++result.gains[best];
        result.pairs.push_back({xs[t], ys[t], best});
    }
    return result;
}

bool RedistributeResult::all_certified() const
{
    auto ok = [](const std::vector<PairCertificate> & certs) {
        return std::all_of(certs.begin(), certs.end(), [](const PairCertificate & c) { return c.regular(); });
    };
    return ok(super_certificates) && ok(regular_certificates);
}

namespace {

struct CycleCertificates {
    std::vector<PairCertificate> super;
    std::vector<PairCertificate> regular;
};

CycleCertificates certify_cycle_structure(const BipartiteGraph & g, const ClusterPartition & p,
                                          const RegularityParams & params, const CertifyOptions & options,
                                          std::uint64_t salt)
{
    CycleCertificates out;
    for (std::size_t i = 0; i < p.k; ++i) {
        CertifyOptions opts = options;
        opts.seed = derive_seed(options.seed, salt, 2 * i);
        out.super.push_back(check_super_regular_pair(g, p.a[i], p.b[i], params, opts));
        opts.seed = derive_seed(options.seed, salt, 2 * i + 1);
        out.regular.push_back(check_regular_pair(g, p.a[i], p.b[(i + 1) % p.k], params, opts));
    }
    return out;
}

/// Moves `sources` vertices of one side along the cycle until every cluster reaches its target.
/// `step` is +1 for A (i → i+1) and k−1 for B (i → i−1).
void redistribute_side(const BipartiteGraph & g, std::vector<VertexSet> & moving, const std::vector<VertexSet> & partners,
                       const std::vector<std::size_t> & target, std::size_t step, const Rational & d, Side side,
                       RedistributeResult & result)
{
    const std::size_t k = moving.size();
    // the partner of moving[i] in its super-regular pair is partners[i]
    auto eligible = [&](std::uint32_t v, std::size_t from, std::size_t to) {
        const VertexId id{side, v};
        if (below(degree_into(g, id, partners[to]), partners[to].size(), d))
            return false;
        const std::size_t remaining = moving[from].size() - 1;
        bool keeps = true;
        partners[from].bits().for_each([&](std::size_t w) {
            if (!keeps)
                return;
            const VertexId wid{opposite(side), static_cast<std::uint32_t>(w)};
            std::size_t deg = degree_into(g, wid, moving[from]);
            if (g.neighbours(wid).test(v))
                --deg;
            if (below(deg, remaining, d))
                keeps = false;
        });
        return keeps;
    };

    for (;;) {
        std::size_t source = k;
        for (std::size_t i = 0; i < k; ++i)
            if (moving[i].size() > target[i]) {
                source = i;
                break;
            }
        if (source == k)
            return;
        ++result.iterations;
        std::size_t cur = source;
        for (std::size_t hops = 0;; ++hops) {
            if (hops > k)
                throw StageError("redistribute", "walk did not reach a sink");
            const std::size_t next = (cur + step) % k;
            std::optional<std::uint32_t> pick;
            moving[cur].bits().for_each([&](std::size_t v) {
                if (!pick && eligible(static_cast<std::uint32_t>(v), cur, next))
                    pick = static_cast<std::uint32_t>(v);
            });
            if (!pick)
                throw StageError("redistribute", std::string("no eligible vertex to move out of ") + side_name(side) +
                                                     "_" + std::to_string(cur + 1) + " into " + side_name(side) +
                                                     "_" + std::to_string(next + 1));
            const bool sink = moving[next].size() < target[next];
            moving[cur].erase(*pick);
            moving[next].insert(*pick);
            ++result.vertex_moves;
            if (sink)
                break;
            cur = next;
        }
    }
}

std::vector<std::size_t> targets_from(const std::vector<VertexSet> & clusters, std::span<const std::int64_t> deltas)
{
    std::vector<std::size_t> t(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const auto size = static_cast<std::int64_t>(clusters[i].size()) + deltas[i];
        if (size < 1)
            throw PreconditionError("redistribute: cluster " + std::to_string(i + 1) + " would become empty");
        t[i] = static_cast<std::size_t>(size);
    }
    return t;
}

} // namespace

RedistributeResult redistribute_cluster_sizes(const BipartiteGraph & g, const ClusterPartition & partition,
                                              std::span<const std::int64_t> deltas_a,
                                              std::span<const std::int64_t> deltas_b, const Rational & xi,
                                              const RegularityParams & params, const RedistributeOptions & options)
{
    params.validate();
    partition.validate(g);
    const std::size_t k = partition.k;
    const std::size_t n = g.size_a();
    if (deltas_a.size() != k || deltas_b.size() != k)
        throw PreconditionError("redistribute: need one delta per cluster");
    if (std::accumulate(deltas_a.begin(), deltas_a.end(), std::int64_t{0}) != 0 ||
        std::accumulate(deltas_b.begin(), deltas_b.end(), std::int64_t{0}) != 0)
        throw PreconditionError("redistribute: deltas must sum to zero on each side");
    if (xi <= 0)
        throw PreconditionError("redistribute: xi must be positive");
    const Rational cap = xi * Integer(n);
    for (std::size_t i = 0; i < k; ++i)
        if (Rational(deltas_a[i]) > cap || Rational(deltas_b[i]) > cap)
            throw PreconditionError("redistribute: delta of cluster " + std::to_string(i + 1) + " exceeds xi*n = " +
                                    to_string(cap));
    if (options.enforce_xi_bound) {
        if (xi > Rational(1, 20 * Integer(k * k)))
            throw PreconditionError("redistribute: xi exceeds 1/(20k^2)");
        for (std::size_t i = 0; i < k; ++i)
            if (2 * k * partition.a[i].size() < n || 2 * k * partition.b[i].size() < n)
                throw PreconditionError("redistribute: cluster " + std::to_string(i + 1) + " smaller than n/(2k)");
    }

    RedistributeResult result;
    result.partition = partition;
    auto & p = result.partition;
    const auto target_a = targets_from(p.a, deltas_a);
    const auto target_b = targets_from(p.b, deltas_b);
    redistribute_side(g, p.a, p.b, target_a, 1, params.d, Side::A, result);
    redistribute_side(g, p.b, p.a, target_b, k - 1, params.d, Side::B, result);

    // (ε' + 100k√ξ, d' − 100k²√ξ − ε'), √ξ rounded up so both bounds stay conservative
    const Rational root = sqrt_upper(xi);
    result.output_params.epsilon = std::min(Rational(1), Rational(params.epsilon + 100 * Integer(k) * root));
    result.output_params.d =
        std::max(Rational(0), Rational(params.d - 100 * Integer(k * k) * root - params.epsilon));
    if (options.certify_output) {
        auto certs = certify_cycle_structure(g, p, result.output_params, options.certify, 0xad);
        result.super_certificates = std::move(certs.super);
        result.regular_certificates = std::move(certs.regular);
    }
    return result;
}

// ---------------------------------------------------------------------------------------------
// host partition: phase 1 (regular partition, Hamilton cycle in R) and phase 2 (cluster sizes)

namespace {

std::size_t min_degree_of(const BipartiteGraph & r) { return r.size_a() == 0 ? 0 : r.min_degree(); }

/// Cluster permutation that reads the cycle as A_1 B_2 A_2 ... B_k A_k B_1: with the cycle
/// rotated to start on side A as a_0 b_0 a_1 b_1 ..., a_t becomes A-cluster t and b_t becomes
/// B-cluster t+1 (mod k).
void relabel_along_cycle(const HamiltonCycle & cycle, std::size_t k, std::vector<std::size_t> & new_a,
                         std::vector<std::size_t> & new_b)
{
    auto order = cycle.order;
    if (order.front().side != Side::A)
        std::rotate(order.begin(), order.begin() + 1, order.end());
    new_a.assign(k, 0);
    new_b.assign(k, 0);
    for (std::size_t t = 0; t < k; ++t) {
        new_a[order[2 * t].index] = t;
        new_b[order[2 * t + 1].index] = (t + 1) % k;
    }
}

} // namespace

LemmaGState lemma_g_phase1(const BipartiteGraph & g, const ParameterSchedule & schedule, const LemmaGOptions & options)
{
    if (!g.balanced())
        throw PreconditionError("lemma_g_phase1: host graph must be balanced");
    const std::size_t n = g.size_a();
    const Rational needed = (Rational(1, 2) + schedule.gamma) * Integer(n);
    if (Rational(Integer(g.min_degree())) < needed)
        throw PreconditionError("lemma_g_phase1: min degree " + std::to_string(g.min_degree()) +
                                " below (1/2 + gamma) n = " + to_string(needed));

    LemmaGState state;
    state.schedule = schedule;

    CertifyOptions certify = options.certify;
    const std::size_t kmax = std::min(schedule.K0, n);
    PartitionBuild build = build_regular_partition(g, schedule.partition_params(), schedule.k0_prime, kmax, certify);
    const std::size_t k = build.partition.k;
    state.k = k;
    state.refinements = build.refinements;

    const BipartiteGraph r = build.reduced.as_graph();
    state.reduced_min_degree = min_degree_of(r);
    if (2 * state.reduced_min_degree < k + 2)
        throw StageError("reduced-graph", "min degree of the reduced graph is " +
                                              std::to_string(state.reduced_min_degree) + ", need k/2 + 1 with k = " +
                                              std::to_string(k));

    HamiltonOptions ham = options.hamilton;
    ham.seed = derive_seed(options.hamilton.seed, 0x4a);
    state.cycle = find_hamilton_cycle(r, ham);

    std::vector<std::size_t> new_a, new_b;
    relabel_along_cycle(state.cycle, k, new_a, new_b);
    ClusterPartition ordered = build.partition;
    ReducedGraph reduced;
    reduced.k = k;
    reduced.params = build.reduced.params;
    reduced.certificates.resize(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        ordered.a[new_a[i]] = build.partition.a[i];
        ordered.b[new_b[i]] = build.partition.b[i];
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            reduced.certificates[new_a[i] * k + new_b[j]] = build.reduced.certificate(i, j);
    for (const auto & [i, j] : build.reduced.edges)
        reduced.edges.emplace_back(static_cast<std::uint32_t>(new_a[i]), static_cast<std::uint32_t>(new_b[j]));
    std::sort(reduced.edges.begin(), reduced.edges.end());

    std::vector<std::pair<std::uint32_t, std::uint32_t>> rstar;
    for (std::uint32_t i = 0; i < k; ++i) {
        rstar.emplace_back(i, i);
        if (k > 1)
            rstar.emplace_back(i, static_cast<std::uint32_t>((i + 1) % k));
    }
    std::sort(rstar.begin(), rstar.end());
    rstar.erase(std::unique(rstar.begin(), rstar.end()), rstar.end());

    SuperRegularizeOptions sro;
    sro.weakened = schedule.super_params();
    sro.max_degree = 2;
    sro.exceptional_fraction = schedule.eps_dprime;
    sro.certify = certify;
    sro.certify.seed = derive_seed(certify.seed, 0x5c);
    auto sr = super_regularize(g, ordered, reduced, rstar, sro);
    state.moved_low_degree = sr.moved_low_degree;
    state.trimmed = sr.trimmed;

    auto absorbed = absorb_exceptional_vertices(g, sr.partition, schedule.d_dprime, schedule.gamma);
    state.partition = std::move(absorbed.partition);
    state.absorbed_gains = std::move(absorbed.gains);
    state.reduced = std::move(reduced);

    for (std::size_t i = 0; i < k; ++i) {
        if (state.partition.a[i].size() != state.partition.b[i].size())
            throw StageError("absorb", "cluster pair " + std::to_string(i + 1) + " unbalanced after absorption");
        state.n_i.push_back(state.partition.a[i].size());
    }

    auto certs = certify_cycle_structure(g, state.partition, schedule.absorbed_params(), certify, 0xab);
    for (std::size_t i = 0; i < k; ++i) {
        if (!certs.super[i].regular())
            throw StageError("certify", "(A_" + std::to_string(i + 1) + ", B_" + std::to_string(i + 1) +
                                            ") not super-regular after absorption: " + to_string(certs.super[i].verdict));
        if (!certs.regular[i].regular())
            throw StageError("certify", "(A_" + std::to_string(i + 1) + ", B_" + std::to_string((i + 1) % k + 1) +
                                            ") not regular after absorption: " + to_string(certs.regular[i].verdict));
    }
    state.super_certificates = std::move(certs.super);
    state.regular_certificates = std::move(certs.regular);
    return state;
}

bool LemmaGPartition::all_certified() const
{
    auto ok = [](const std::vector<PairCertificate> & certs) {
        return std::all_of(certs.begin(), certs.end(), [](const PairCertificate & c) { return c.regular(); });
    };
    return ok(super_certificates) && ok(regular_certificates);
}

LemmaGPartition lemma_g_phase2(const BipartiteGraph & g, const LemmaGState & state, std::span<const std::size_t> a,
                               std::span<const std::size_t> b, const LemmaGOptions & options)
{
    const std::size_t k = state.k;
    const std::size_t n = g.size_a();
    if (a.size() != k || b.size() != k)
        throw PreconditionError("lemma_g_phase2: need k targets per side");
    if (std::accumulate(a.begin(), a.end(), std::size_t{0}) != n ||
        std::accumulate(b.begin(), b.end(), std::size_t{0}) != n)
        throw PreconditionError("lemma_g_phase2: targets must sum to n on each side");
    const Rational slack = state.schedule.xi_lg * Integer(n);
    std::vector<std::int64_t> da(k), db(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (Rational(Integer(a[i])) > Integer(state.n_i[i]) + slack ||
            Rational(Integer(b[i])) > Integer(state.n_i[i]) + slack)
            throw PreconditionError("lemma_g_phase2: target of cluster " + std::to_string(i + 1) +
                                    " exceeds n_i + xi_lg n");
        da[i] = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(state.n_i[i]);
        db[i] = static_cast<std::int64_t>(b[i]) - static_cast<std::int64_t>(state.n_i[i]);
    }

    RedistributeOptions ro;
    ro.enforce_xi_bound = state.schedule.mode == ScheduleMode::faithful;
    ro.certify_output = false;
    ro.certify = options.certify;
    LemmaGPartition out;
    out.redistribution =
        redistribute_cluster_sizes(g, state.partition, da, db, state.schedule.xi_lg, state.schedule.absorbed_params(), ro);
    out.partition = out.redistribution.partition;
    auto certs = certify_cycle_structure(g, out.partition, state.schedule.final_params(), options.certify, 0xf2);
    out.super_certificates = std::move(certs.super);
    out.regular_certificates = std::move(certs.regular);
    return out;
}

} // namespace bipemb
