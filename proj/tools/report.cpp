#include "report.hpp"

#include <fstream>

#include "bipemb/error.hpp"

namespace bipemb::cli {

std::string rational_json(const Rational & r)
{
    return to_string(r);
}

Json vertex_json(VertexId v)
{
    return Json::array({side_name(v.side), v.index});
}

VertexId vertex_from_json(const Json & j)
{
    if (!j.is_array() || j.size() != 2)
        throw Error("vertex must be [side, index]");
    const auto side = j[0].get<std::string>();
    if (side != "A" && side != "B")
        throw Error("vertex side must be \"A\" or \"B\"");
    return {side == "A" ? Side::A : Side::B, j[1].get<std::uint32_t>()};
}

Json vertex_set_json(const VertexSet & s)
{
    return s.to_vector();
}

Json certificate_json(const PairCertificate & c)
{
    Json j;
    j["verdict"] = to_string(c.verdict);
    j["strategy"] = to_string(c.strategy);
    j["epsilon"] = rational_json(c.params.epsilon);
    j["d"] = rational_json(c.params.d);
    j["u_size"] = c.u.size();
    j["w_size"] = c.w.size();
    j["density"] = rational_json(c.base_density);
    j["samples"] = c.samples_used;
    if (c.witness) {
        j["witness"] = {{"u", vertex_set_json(c.witness->u_sub)},
                        {"w", vertex_set_json(c.witness->w_sub)},
                        {"deviation", rational_json(c.witness->deviation)}};
    }
    if (c.low_degree_vertex)
        j["low_degree_vertex"] = vertex_json(*c.low_degree_vertex);
    return j;
}

Json partition_json(const ClusterPartition & p)
{
    Json j;
    j["kind"] = "partition";
    j["k"] = p.k;
    Json a = Json::array(), b = Json::array();
    for (const auto & s : p.a)
        a.push_back(vertex_set_json(s));
    for (const auto & s : p.b)
        b.push_back(vertex_set_json(s));
    j["a"] = a;
    j["b"] = b;
    j["a0"] = vertex_set_json(p.a0);
    j["b0"] = vertex_set_json(p.b0);
    return j;
}

ClusterPartition partition_from_json(const Json & j, std::size_t na, std::size_t nb)
{
    ClusterPartition p;
    p.k = j.at("k").get<std::size_t>();
    auto read = [](const Json & arr, Side side, std::size_t size) {
        std::vector<std::uint32_t> ids = arr.get<std::vector<std::uint32_t>>();
        for (auto i : ids)
            if (i >= size)
                throw Error("partition index out of range");
        return VertexSet::of(side, size, ids);
    };
    for (const auto & s : j.at("a"))
        p.a.push_back(read(s, Side::A, na));
    for (const auto & s : j.at("b"))
        p.b.push_back(read(s, Side::B, nb));
    p.a0 = read(j.at("a0"), Side::A, na);
    p.b0 = read(j.at("b0"), Side::B, nb);
    if (p.a.size() != p.k || p.b.size() != p.k)
        throw Error("partition must list k clusters per side");
    return p;
}

Json reduced_json(const ReducedGraph & r)
{
    Json j;
    j["k"] = r.k;
    j["epsilon"] = rational_json(r.params.epsilon);
    j["d"] = rational_json(r.params.d);
    Json edges = Json::array();
    for (auto [i, k] : r.edges)
        edges.push_back({i, k});
    j["edges"] = edges;
    return j;
}

Json schedule_json(const ParameterSchedule & s)
{
    Json j;
    j["mode"] = to_string(s.mode);
    j["gamma"] = rational_json(s.gamma);
    j["Delta"] = s.Delta;
    j["epsilon"] = rational_json(s.epsilon);
    j["k0"] = s.k0;
    j["k0_prime"] = s.k0_prime;
    j["K0"] = s.K0;
    j["d_lg"] = rational_json(s.d_lg);
    j["eps_prime"] = rational_json(s.eps_prime);
    j["d_prime"] = rational_json(s.d_prime);
    j["eps_dprime"] = rational_json(s.eps_dprime);
    j["d_dprime"] = rational_json(s.d_dprime);
    j["alpha"] = rational_json(s.alpha);
    j["eps_hat"] = rational_json(s.eps_hat);
    j["d_hat"] = rational_json(s.d_hat);
    j["xi_lg"] = rational_json(s.xi_lg);
    j["xi_lh"] = rational_json(s.xi_lh);
    Json checks = Json::array();
    for (const auto & c : s.checks)
        checks.push_back({{"name", c.name}, {"holds", c.holds}});
    j["checks"] = checks;
    return j;
}

Json cycle_json(const HamiltonCycle & c)
{
    Json j;
    j["kind"] = "hamilton-cycle";
    Json order = Json::array();
    for (auto v : c.order)
        order.push_back(vertex_json(v));
    j["order"] = order;
    return j;
}

HamiltonCycle cycle_from_json(const Json & j)
{
    if (j.at("kind") != "hamilton-cycle")
        throw Error("not a hamilton-cycle artifact");
    HamiltonCycle c;
    for (const auto & v : j.at("order"))
        c.order.push_back(vertex_from_json(v));
    return c;
}

Json balance_json(const BalancingAssignment & b)
{
    Json j;
    j["kind"] = "balance";
    j["phi"] = b.phi;
    j["a_bar"] = b.a_bar;
    j["b_bar"] = b.b_bar;
    j["s"] = b.s;
    Json d = Json::array();
    for (const auto & x : b.d)
        d.push_back(rational_json(x));
    j["d"] = d;
    j["retries_used"] = b.retries_used;
    return j;
}

Json homomorphism_json(const CycleHomomorphism & h)
{
    Json j;
    j["kind"] = "homomorphism";
    j["k"] = h.k;
    j["f_a"] = h.f_a;
    j["f_b"] = h.f_b;
    j["s_a"] = vertex_set_json(h.s_a);
    j["s_b"] = vertex_set_json(h.s_b);
    return j;
}

CycleHomomorphism homomorphism_from_json(const Json & j, std::size_t na, std::size_t nb)
{
    if (j.at("kind") != "homomorphism")
        throw Error("not a homomorphism artifact");
    CycleHomomorphism h;
    h.k = j.at("k").get<std::size_t>();
    h.f_a = j.at("f_a").get<std::vector<std::uint32_t>>();
    h.f_b = j.at("f_b").get<std::vector<std::uint32_t>>();
    auto sa = j.at("s_a").get<std::vector<std::uint32_t>>();
    auto sb = j.at("s_b").get<std::vector<std::uint32_t>>();
    for (auto i : sa)
        if (i >= na)
            throw Error("linking vertex out of range");
    for (auto i : sb)
        if (i >= nb)
            throw Error("linking vertex out of range");
    h.s_a = VertexSet::of(Side::A, na, sa);
    h.s_b = VertexSet::of(Side::B, nb, sb);
    return h;
}

Json homomorphism_report_json(const HomomorphismReport & r)
{
    Json j;
    j["homomorphism"] = r.homomorphism;
    if (r.bad_edge)
        j["bad_edge"] = {r.bad_edge->first, r.bad_edge->second};
    j["h1"] = r.h1;
    j["s_size"] = r.s_size;
    j["h1_bound"] = rational_json(r.h1_bound);
    j["h2"] = r.h2;
    if (r.h2_violation)
        j["h2_violation"] = {r.h2_violation->first, r.h2_violation->second};
    j["h3"] = r.h3;
    j["preimage_a"] = r.preimage_a;
    j["preimage_b"] = r.preimage_b;
    if (r.h3_violation)
        j["h3_violation"] = *r.h3_violation;
    return j;
}

Json compatibility_json(const CompatibilityReport & c)
{
    Json j;
    j["size_a"] = c.size_a;
    j["size_b"] = c.size_b;
    j["target_a"] = c.target_a;
    j["target_b"] = c.target_b;
    j["s_a"] = vertex_set_json(c.s_a);
    j["s_b"] = vertex_set_json(c.s_b);
    j["t_a"] = vertex_set_json(c.t_a);
    j["t_b"] = vertex_set_json(c.t_b);
    j["clause_i"] = c.clause_i;
    j["sizes_exact"] = c.sizes_exact;
    j["clause_ii"] = c.clause_ii;
    j["clause_iii"] = c.clause_iii;
    j["pass"] = c.pass();
    if (!c.first_violation.empty())
        j["first_violation"] = c.first_violation;
    return j;
}

namespace {

Json phases(const std::vector<EmbedPhase> & p)
{
    Json out = Json::array();
    for (auto x : p)
        out.push_back(x == EmbedPhase::greedy ? "greedy" : "matching");
    return out;
}

std::vector<EmbedPhase> phases_from(const Json & j)
{
    std::vector<EmbedPhase> out;
    for (const auto & x : j) {
        const auto s = x.get<std::string>();
        if (s != "greedy" && s != "matching")
            throw Error("unknown embedding phase '" + s + "'");
        out.push_back(s == "greedy" ? EmbedPhase::greedy : EmbedPhase::matching);
    }
    return out;
}

} // namespace

Json embedding_json(const Embedding & e)
{
    Json j;
    j["kind"] = "embedding";
    j["map_a"] = e.map_a;
    j["map_b"] = e.map_b;
    j["phase_a"] = phases(e.phase_a);
    j["phase_b"] = phases(e.phase_b);
    return j;
}

Embedding embedding_from_json(const Json & j)
{
    if (!j.is_object() || j.value("kind", "") != "embedding")
        throw Error("not an embedding artifact");
    Embedding e;
    e.map_a = j.at("map_a").get<std::vector<std::uint32_t>>();
    e.map_b = j.at("map_b").get<std::vector<std::uint32_t>>();
    if (j.contains("phase_a"))
        e.phase_a = phases_from(j.at("phase_a"));
    if (j.contains("phase_b"))
        e.phase_b = phases_from(j.at("phase_b"));
    return e;
}

Json pipeline_report_json(const PipelineReport & r, bool timings)
{
    Json j;
    j["kind"] = "pipeline-report";
    Json cfg;
    cfg["mode"] = to_string(r.config.mode);
    cfg["gamma"] = rational_json(r.config.gamma);
    cfg["Delta"] = r.config.Delta;
    cfg["epsilon"] = rational_json(r.config.overrides.epsilon.value_or(r.config.epsilon));
    if (r.config.overrides.d)
        cfg["d"] = rational_json(*r.config.overrides.d);
    cfg["k0"] = r.config.k0;
    cfg["ell"] = r.config.ell;
    cfg["seed"] = r.config.seed;
    cfg["attempts"] = r.config.attempts;
    cfg["strategy"] = to_string(r.config.strategy);
    cfg["budget"] = r.config.budget;
    j["config"] = cfg;
    j["schedule"] = schedule_json(r.schedule);
    j["n"] = r.n;
    j["k"] = r.k;
    j["n_i"] = r.n_i;
    j["refinements"] = r.refinements;
    j["reduced_edges"] = r.reduced_edges;
    j["reduced_min_degree"] = r.reduced_min_degree;
    j["reduced_cycle"] = cycle_json(r.reduced_cycle);
    j["moved_low_degree"] = r.moved_low_degree;
    j["trimmed"] = r.trimmed;
    j["absorbed_gains"] = r.absorbed_gains;
    j["bandwidth"] = r.bandwidth;
    j["beta_n"] = r.beta_n;
    j["ell_requested"] = r.ell_requested;
    j["ell_effective"] = r.ell_effective;
    j["size_hypothesis_held"] = r.size_hypothesis_held;
    j["attempts_used"] = r.attempts_used;
    j["phi"] = balance_json(r.phi);
    j["homomorphism"] = homomorphism_report_json(r.homomorphism);
    j["a"] = r.a;
    j["b"] = r.b;
    j["redistribution"] = {{"iterations", r.redistribution_iterations}, {"moves", r.redistribution_moves}};
    j["certified_pairs"] = r.certified_pairs;
    j["compatibility"] = compatibility_json(r.compatibility);
    j["embed"] = {{"greedy_vertices", r.embed.greedy_vertices},
                  {"matching_vertices", r.embed.matching_vertices},
                  {"attempts", r.embed.attempts}};
    Json rejected = Json::array();
    for (const auto & n : r.rejected_attempts)
        rejected.push_back({{"stage", n.stage}, {"message", n.message}});
    j["rejected_attempts"] = rejected;
    j["verified"] = r.verified;
    if (timings)
        j["seconds"] = r.seconds;
    return j;
}

Json read_json(const std::filesystem::path & path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error & e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path & path, const Json & j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace bipemb::cli
