// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bipemb/embedder.hpp"
#include "bipemb/error.hpp"
#include "bipemb/generators.hpp"
#include "bipemb/hamilton.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/partitioner.hpp"
#include "bipemb/regularity.hpp"
#include "bipemb/rng.hpp"
#include "oracles.hpp"

using namespace bipemb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

BipartiteGraph random_graph(std::size_t n, double p, Rng & rng)
{
    std::vector<Edge> e;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (uniform_unit(rng) < p)
                e.emplace_back(a, b);
    return BipartiteGraph::build(n, n, e);
}

// 1. end-to-end embedding of C_1024 into random hosts with γ = 0.3
Outcome criterion1()
{
    const std::size_t n = 512;
    std::size_t ok = 0;
    double worst = 0;
    std::vector<std::string> failures;
    auto target = hamilton_cycle_target(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto started = Clock::now();
        auto g = random_min_degree_host(n, Rational(3, 10), seed);
        if (10 * g.min_degree() < 8 * n) {
            failures.push_back("seed " + std::to_string(seed) + ": host min degree too small");
            continue;
        }
        PipelineConfig c;
        c.gamma = Rational(3, 10);
        c.Delta = 2;
        c.overrides.epsilon = Rational(1, 4);
        c.overrides.d = Rational(3, 10);
        c.k0 = 8;
        c.ell = 64;
        c.seed = seed;
        c.labelling_mode = LabellingMode::given;
        c.labelling = target.order;
        try {
            auto res = embed_bipartite(g, target.graph, c);
            const double secs = since(started);
            worst = std::max(worst, secs);
            if (oracle::valid_subgraph_map(g, target.graph, res.embedding.map_a, res.embedding.map_b) && secs < 120)
                ++ok;
            else
                failures.push_back("seed " + std::to_string(seed) + ": invalid map or too slow");
        } catch (const Error & e) {
            worst = std::max(worst, since(started));
            failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
        }
    }
    std::string detail = std::to_string(ok) + "/20 verified, slowest run " + fmt(worst) + " s";
    for (const auto & f : failures)
        detail += "; " + f;
    return {ok >= 18 && worst < 120, detail};
}

// 2. zero false positives on tiny instances
Outcome criterion2()
{
    std::size_t pipeline_returned = 0, direct_returned = 0, violations = 0, oracle_found = 0, direct_missed = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t n = 3 + seed % 4;
        auto g = random_min_degree_host(n, Rational(1, static_cast<long>(n)), seed, Rational(0));
        auto target = hamilton_cycle_target(n);
        const auto & h = target.graph;
        const bool exists = oracle::find_subgraph(g, h).has_value();
        oracle_found += exists ? 1 : 0;

        PipelineConfig c;
        c.gamma = Rational(1, static_cast<long>(n));
        c.k0 = 1;
        c.ell = 1;
        c.seed = seed;
        c.attempts = 5;
        c.labelling_mode = LabellingMode::given;
        c.labelling = target.order;
        c.overrides.kmax = 1;
        try {
            auto res = embed_bipartite(g, h, c);
            ++pipeline_returned;
            if (!oracle::valid_subgraph_map(g, h, res.embedding.map_a, res.embedding.map_b))
                ++violations;
        } catch (const Error &) {
            // refusing is allowed; fabricating is not
        }

        // the embedding stage alone, one cluster pair holding everything
        ClusterPartition gp = planted_partition(1, n);
        HPartition hp{1, std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
        const std::vector<ClassEdge> r{{0, 0}};
        EmbedOptions o;
        o.params = {Rational(1, 4), Rational(0)};
        o.seed = seed;
        try {
            auto e = embed_compatible(g, h, gp, hp, r, r, o);
            ++direct_returned;
            if (!oracle::valid_subgraph_map(g, h, e.map_a, e.map_b))
                ++violations;
            if (!exists)
                ++violations;
        } catch (const EmbeddingFailed &) {
            if (exists)
                ++direct_missed;
        }
    }
    std::string detail = "200 instances, " + std::to_string(violations) + " violations; pipeline returned " +
                         std::to_string(pipeline_returned) + ", embedding stage returned " +
                         std::to_string(direct_returned) + " (oracle found " + std::to_string(oracle_found) +
                         ", stage missed " + std::to_string(direct_missed) + ")";
    return {violations == 0, detail};
}

// 3. Hamilton cycles above the degree bound, and exact agreement with the oracle on small graphs
Outcome criterion3()
{
    std::size_t found = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto g = random_min_degree_host(50, Rational(1, 50), seed, Rational(0));
        if (g.min_degree() < 26)
            continue;
        try {
            HamiltonOptions o;
            o.seed = seed;
            auto c = find_hamilton_cycle(g, o);
            if (verify_cycle(g, c))
                ++found;
        } catch (const HamiltonNotFound &) {
        }
    }
    std::size_t agree = 0, positives = 0;
    const std::size_t small = 240;
    for (std::uint64_t seed = 0; seed < small; ++seed) {
        Rng rng(derive_seed(seed, 0x3c));
        const std::size_t n = 2 + seed % 9;
        auto g = random_graph(n, 0.3 + 0.1 * static_cast<double>(seed % 4), rng);
        bool mine = false;
        try {
            HamiltonOptions o;
            o.seed = seed;
            mine = static_cast<bool>(verify_cycle(g, find_hamilton_cycle(g, o)));
        } catch (const HamiltonNotFound &) {
        }
        const bool truth = oracle::hamiltonian(g);
        positives += truth ? 1 : 0;
        agree += mine == truth ? 1 : 0;
    }
    return {found == 100 && agree == small, std::to_string(found) + "/100 cycles found and verified at n = 50; " +
                                                std::to_string(agree) + "/" + std::to_string(small) +
                                                " small instances agree with the oracle (" +
                                                std::to_string(positives) + " Hamiltonian)"};
}

// 4. balancing assignment on adversarial alternating pieces
Outcome criterion4()
{
    const std::size_t k = 8, n = 8000, ell = 200;
    const std::vector<std::size_t> targets(k, 1000);
    std::vector<std::size_t> x(ell), y(ell);
    for (std::size_t j = 0; j < ell; ++j) {
        x[j] = j % 2 ? 0 : 2 * n / ell;
        y[j] = 2 * n / ell - x[j];
    }
    std::size_t ok = 0, bad = 0, max_retries = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        BalanceOptions o;
        o.seed = seed;
        o.max_retries = 50;
        try {
            auto phi = balance_assignment(targets, x, y, Rational(1, 20), o);
            // ā_i < n_i + n/20  ⇔  20 ā_i < 20 n_i + n, recomputed from φ alone
            bool holds = phi.phi.size() == ell;
            for (std::size_t i = 0; holds && i < k; ++i) {
                std::size_t a = 0, b = 0;
                for (std::size_t j = 0; j < ell; ++j)
                    if (phi.phi[j] == i) {
                        a += x[j];
                        b += y[j];
                    }
                holds = 20 * a < 20 * targets[i] + n && 20 * b < 20 * targets[i] + n;
            }
            if (holds)
                ++ok;
            else
                ++bad;
            max_retries = std::max(max_retries, phi.retries_used);
        } catch (const BalanceFailed &) {
        }
    }
    return {ok >= 99 && bad == 0, std::to_string(ok) + "/100 seeds succeeded within 50 retries, " + std::to_string(bad) +
                                      " returned assignments violate the bound, most retries " +
                                      std::to_string(max_retries)};
}

// 5. the cycle homomorphism on random admissible inputs
Outcome criterion5()
{
    std::size_t built = 0, hom_ok = 0, s_ok = 0, h2_match = 0, h3_match = 0, h2_true = 0;
    const std::size_t total = 500;
    for (std::uint64_t seed = 0; seed < total; ++seed) {
        Rng rng(derive_seed(seed, 0x55));
        const std::size_t k = 2 + uniform_below(rng, 7);
        const std::size_t ell = 1 + uniform_below(rng, 6);
        const std::size_t kind = uniform_below(rng, 3);
        const std::size_t window = 1 + 2 * uniform_below(rng, 2);
        const std::size_t beta = std::max<std::size_t>(kind == 0 ? 2 : kind == 1 ? 3 : window, 1) +
                                 uniform_below(rng, 2);
        const std::size_t need = ell * (2 * k + 1) * beta; // 2n must give pieces of at least (2k+1)·beta
        std::size_t n = (need + 1) / 2 + uniform_below(rng, 30);
        if (kind == 1 && n % 2)
            ++n;
        Target t = kind == 0 ? hamilton_cycle_target(n)
                 : kind == 1 ? c4_union_target(n)
                             : random_local_target(n, window, 3, seed);
        auto l = bandwidth_labelling(t.graph, LabellingMode::given, t.order);
        if (l.bandwidth > beta)
            continue;
        auto pieces = partition_pieces(t.graph, l, ell);
        std::vector<std::size_t> phi(ell);
        for (auto & c : phi)
            c = uniform_below(rng, k);
        std::vector<std::size_t> targets(k, n / k);
        targets[0] += n - (n / k) * k;
        const Rational xi(1 + static_cast<long>(uniform_below(rng, 20)), 40);

        CycleHomomorphism hom;
        try {
            hom = build_cycle_homomorphism(t.graph, l, pieces, phi, beta, k);
        } catch (const Error &) {
            continue;
        }
        ++built;
        auto rep = verify_cycle_homomorphism(t.graph, hom, targets, xi);

        // independent recomputation
        bool is_hom = true;
        for (auto [a, b] : t.graph.edges()) {
            const std::size_t diff = (hom.f_b[b] + k - hom.f_a[a]) % k;
            is_hom = is_hom && (diff == 0 || diff == 1);
        }
        hom_ok += is_hom && rep.homomorphism ? 1 : 0;
        std::size_t s = 0;
        for (std::size_t pos = 0; pos < l.order.size(); ++pos)
            s += pos - pieces.starts[pieces.piece_of(pos)] < 2 * k * beta ? 1 : 0;
        s_ok += s == 2 * k * ell * beta && hom.s_size() == s ? 1 : 0;
        bool h2 = true;
        for (auto [a, b] : t.graph.edges())
            if (!hom.s_a.contains(a) && !hom.s_b.contains(b) && hom.f_a[a] != hom.f_b[b])
                h2 = false;
        h2_match += h2 == rep.h2 ? 1 : 0;
        h2_true += h2 ? 1 : 0;
        std::vector<std::size_t> ca(k, 0), cb(k, 0);
        for (auto c : hom.f_a)
            ++ca[c];
        for (auto c : hom.f_b)
            ++cb[c];
        bool h3 = true;
        for (std::size_t i = 0; i < k; ++i)
            h3 = h3 && Rational(Integer(ca[i])) < Integer(targets[i]) + xi * Integer(n) &&
                 Rational(Integer(cb[i])) < Integer(targets[i]) + xi * Integer(n);
        h3_match += h3 == rep.h3 ? 1 : 0;
    }
    const bool pass = built == total && hom_ok == total && s_ok == total && h2_match == total && h3_match == total &&
                      h2_true == total;
    return {pass, std::to_string(built) + "/" + std::to_string(total) + " inputs built; homomorphism " +
                      std::to_string(hom_ok) + ", |S| = 2kl*beta_n " + std::to_string(s_ok) + ", (H2) agrees " +
                      std::to_string(h2_match) + " (holds " + std::to_string(h2_true) + "), (H3) agrees " +
                      std::to_string(h3_match)};
}

struct AdjustStats {
    std::size_t runs = 0, sizes_ok = 0, moves_ok = 0, certified = 0, nonzero = 0;
    RegularityParams output;
};

AdjustStats adjust_suite(const Rational & xi, std::size_t runs)
{
    const std::size_t k = 4, m = 500, n = k * m;
    auto g = planted_cycle_host(k, m, 0.5, 2);
    auto p = planted_partition(k, m);
    const RegularityParams input{Rational(1, 10), Rational(3, 10)};
    const std::int64_t cap = (xi * Integer(n)).convert_to<double>() >= 1
                                 ? static_cast<std::int64_t>(floor(Rational(xi * Integer(n))).convert_to<long long>())
                                 : 0;
    AdjustStats st;
    for (std::uint64_t seed = 0; seed < runs; ++seed) {
        Rng rng(derive_seed(seed, 0xad));
        auto deltas = [&] {
            std::vector<std::int64_t> d(k, 0);
            for (int t = 0; t < 40 && cap > 0; ++t) {
                const auto i = uniform_below(rng, k), j = uniform_below(rng, k);
                if (i != j && d[i] < cap && d[j] > -cap) {
                    ++d[i];
                    --d[j];
                }
            }
            return d;
        };
        const auto da = deltas(), db = deltas();
        st.nonzero += std::any_of(da.begin(), da.end(), [](auto v) { return v != 0; }) ? 1 : 0;
        RedistributeOptions o;
        o.certify.strategy = Strategy::sampled;
        o.certify.budget = 2000;
        o.certify.seed = seed;
        ++st.runs;
        try {
            auto r = redistribute_cluster_sizes(g, p, da, db, xi, input, o);
            st.output = r.output_params;
            bool sizes = true;
            for (std::size_t i = 0; i < k; ++i)
                sizes = sizes && static_cast<std::int64_t>(r.partition.a[i].size()) == static_cast<std::int64_t>(m) + da[i] &&
                        static_cast<std::int64_t>(r.partition.b[i].size()) == static_cast<std::int64_t>(m) + db[i];
            st.sizes_ok += sizes ? 1 : 0;
            st.moves_ok += Rational(Integer(r.iterations)) <= xi * Integer(k * n) ? 1 : 0;
            st.certified += r.all_certified() && r.super_certificates.size() == k && r.regular_certificates.size() == k ? 1 : 0;
        } catch (const Error & e) {
            std::cerr << "  adjust run " << seed << " failed: " << e.what() << '\n';
        }
    }
    return st;
}

// 6. cluster-size redistribution on planted pairs
Outcome criterion6()
{
    auto lit = adjust_suite(Rational(1, 10000), 50);
    auto wide = adjust_suite(Rational(1, 320), 50);
    auto show = [](const AdjustStats & s) {
        return "sizes " + std::to_string(s.sizes_ok) + "/" + std::to_string(s.runs) + ", moves within bound " +
               std::to_string(s.moves_ok) + ", recertified " + std::to_string(s.certified) + ", nonzero deltas " +
               std::to_string(s.nonzero) + ", rebounded (" + to_string(s.output.epsilon) + ", " + to_string(s.output.d) +
               ")";
    };
    auto ok = [](const AdjustStats & s) {
        return s.runs == 50 && s.sizes_ok == 50 && s.moves_ok == 50 && s.certified == 50;
    };
    return {ok(lit) && ok(wide), "xi = 1e-4: " + show(lit) + "; xi = 1/320: " + show(wide)};
}

// 7. perturbation arithmetic against the closed forms
Outcome criterion7()
{
    Rng rng(7);
    auto rnd = [&](long lo, long hi) { return lo + static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))); };
    std::size_t exact = 0, conservative = 0;
    const std::size_t total = 100;
    for (std::size_t t = 0; t < total; ++t) {
        const Rational eps(rnd(1, 99), 100 + rnd(0, 900));
        const Rational d(rnd(0, 1000), 1000);
        const Rational ra(rnd(0, 30), rnd(31, 400));
        const Rational rb(rnd(0, 30), rnd(31, 400));
        const Rational alpha = ra * ra, beta = rb * rb;
        auto r = rebound_after_perturbation({eps, d}, alpha, beta);
        const Rational e_want = std::min(Rational(1), Rational(eps + 3 * (ra + rb)));
        const Rational d_want = std::max(Rational(0), Rational(d - 2 * (alpha + beta)));
        exact += r.epsilon == e_want && r.d == d_want ? 1 : 0;

        // non-square inputs: the rounded root must never understate ε
        const Rational a2 = Rational(rnd(1, 50), 1000) + Rational(1, 7919);
        auto q = rebound_after_perturbation({eps, d}, a2, 0);
        const Rational excess = (q.epsilon - eps) / 3;
        conservative += q.epsilon == 1 || (excess * excess >= a2 && q.d == std::max(Rational(0), Rational(d - 2 * a2)))
                            ? 1
                            : 0;
    }
    return {exact == total && conservative == total,
            std::to_string(exact) + "/100 exact on square inputs, " + std::to_string(conservative) +
                "/100 conservative on non-square inputs"};
}

// 8. candidate index sets on hosts meeting the degree condition
Outcome criterion8()
{
    const Rational gamma(1, 10);
    const Rational d_dprime(1, 100); // d''/(1 - d'') <= gamma/6
    std::size_t hosts = 0, pairs = 0, violations = 0, smallest = ~std::size_t{0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto g = random_min_degree_host(256, gamma, seed, Rational(0));
        CertifyOptions o;
        o.seed = seed;
        ClusterPartition part;
        try {
            part = build_regular_partition(g, {Rational(1, 4), Rational(3, 10)}, 4, 32, o).partition;
        } catch (const PartitionNotCertified & e) {
            part = e.best().partition;
        }
        ++hosts;
        Rng rng(derive_seed(seed, 0x88));
        for (int t = 0; t < 100; ++t) {
            const auto x = static_cast<std::uint32_t>(uniform_below(rng, 256));
            const auto y = static_cast<std::uint32_t>(uniform_below(rng, 256));
            const auto idx = candidate_index_set(g, x, y, part, d_dprime);
            ++pairs;
            smallest = std::min(smallest, idx.size());
            if (Rational(Integer(idx.size())) < gamma * Integer(part.k))
                ++violations;
        }
    }
    return {violations == 0 && pairs == 2000, std::to_string(hosts) + " hosts, " + std::to_string(pairs) + " pairs, " +
                                                  std::to_string(violations) + " violations, smallest |I(x,y)| " +
                                                  std::to_string(smallest)};
}

// 9. faithful constants
Outcome criterion9()
{
    std::size_t ok = 0;
    std::string detail;
    for (long den : {100L, 50L, 25L}) {
        const Rational gamma(1, den);
        const Rational eps = gamma * gamma / 1000;
        try {
            auto s = derive_parameter_schedule(gamma, 2, eps, 2, ScheduleMode::faithful);
            // recompute every constant from the closed forms
            const Rational d_lg = gamma * gamma / 100;
            const Rational e1 = eps * eps * eps * gamma * gamma * gamma;
            const Rational d1 = eps + gamma * gamma;
            const Rational e2 = e1 / (1 - 2 * e1);
            const Rational d2 = d1 - 4 * e1;
            const Rational alpha = e2 / (gamma * (1 - e2));
            const Rational d_hat = d2 - 4 * alpha;
            bool good = s.d_lg == d_lg && s.eps_prime == e1 && s.d_prime == d1 && s.eps_dprime == e2 &&
                        s.d_dprime == d2 && s.d_hat == d_hat && s.all_checks_hold();
            // ε̂ is an upper bound for ε'' + 6√α, and it is at most ε/10
            const Rational root_part = (s.eps_hat - e2) / 6;
            good = good && root_part * root_part >= alpha && s.eps_hat <= eps / 10;
            good = good && d_hat - eps >= 2 * d_lg;
            good = good && gamma - d1 - e2 > 0 && (gamma - d1 - e2) * Integer(s.k0_prime) >= 1;
            ok += good ? 1 : 0;
            detail += "gamma 1/" + std::to_string(den) + (good ? " ok" : " FAILED") + " (k0' = " +
                      std::to_string(s.k0_prime) + ", " + std::to_string(s.checks.size()) + " checks); ";
        } catch (const Error & e) {
            detail += "gamma 1/" + std::to_string(den) + ": " + e.what() + "; ";
        }
    }
    return {ok == 3, detail};
}

} // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto started = Clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception & e) {
            o = {false, std::string("unexpected exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt(since(started))
                  << " s) " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
