#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bipemb/embedder.hpp"
#include "bipemb/error.hpp"
#include "bipemb/generators.hpp"
#include "bipemb/hamilton.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/io.hpp"
#include "bipemb/partitioner.hpp"
#include "bipemb/regularity.hpp"
#include "report.hpp"

using namespace bipemb;
using cli::Json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify = 1;
constexpr int exit_usage = 2;

// Options every subcommand accepts.
struct Common {
    std::uint64_t seed = 0;
    std::string mode = "practical";
    std::string out;

    ScheduleMode schedule_mode() const { return mode == "faithful" ? ScheduleMode::faithful : ScheduleMode::practical; }
};

void add_common(CLI::App * cmd, Common & c)
{
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--mode", c.mode, "faithful | practical")->check(CLI::IsMember({"faithful", "practical"}));
    cmd->add_option("--out", c.out, "output file (stdout when omitted)");
}

void emit(const Common & c, const Json & j)
{
    if (c.out.empty())
        std::cout << j.dump(2) << '\n';
    else
        cli::write_json(c.out, j);
}

Rational rational_arg(const std::string & text, const char * what)
{
    try {
        return parse_rational(text);
    } catch (const ParseError &) {
        throw PreconditionError(std::string("--") + what + ": not a number: '" + text + "'");
    }
}

Strategy strategy_arg(const std::string & s)
{
    if (s == "exhaustive")
        return Strategy::exhaustive;
    if (s == "guided")
        return Strategy::guided;
    return Strategy::sampled;
}

// "1000x8" or "10,20,30".
std::vector<std::size_t> sizes_arg(const std::string & text)
{
    std::vector<std::size_t> out;
    if (auto x = text.find('x'); x != std::string::npos) {
        const auto value = std::stoul(text.substr(0, x));
        const auto count = std::stoul(text.substr(x + 1));
        out.assign(count, value);
        return out;
    }
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');)
        out.push_back(std::stoul(part));
    if (out.empty())
        throw PreconditionError("empty size list");
    return out;
}

// "lo:hi" half-open index range on one side.
VertexSet range_arg(const std::string & text, Side side, std::size_t size)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw PreconditionError("range must be lo:hi, got '" + text + "'");
    const auto lo = std::stoul(text.substr(0, colon));
    const auto hi = std::stoul(text.substr(colon + 1));
    if (lo >= hi || hi > size)
        throw PreconditionError("range '" + text + "' is empty or out of bounds");
    VertexSet s(side, size);
    for (auto i = lo; i < hi; ++i)
        s.insert(static_cast<std::uint32_t>(i));
    return s;
}

Target make_target(const std::string & kind, std::size_t n, std::size_t w, std::size_t h, std::size_t window,
                   std::size_t Delta, std::uint64_t seed)
{
    if (kind == "hamilton-cycle")
        return hamilton_cycle_target(n);
    if (kind == "ladder")
        return ladder_target(n);
    if (kind == "moebius-ladder")
        return moebius_ladder_target(n);
    if (kind == "grid")
        return grid_target(w, h);
    if (kind == "random-local")
        return random_local_target(n, window, Delta, seed);
    if (kind == "c4-union")
        return c4_union_target(n);
    throw PreconditionError("unknown target kind '" + kind + "'");
}

struct EmbedArgs {
    std::string gamma = "0.2";
    std::size_t Delta = 2;
    std::string epsilon = "0.25";
    std::string d = "0.3";
    std::size_t k0 = 8;
    std::size_t ell = 64;
    std::optional<std::size_t> kmax;
    std::optional<std::size_t> beta_n;
    std::size_t attempts = 50;
    std::string strategy = "sampled";
    std::size_t budget = 2000;
    std::string labelling;

    void add(CLI::App * cmd)
    {
        cmd->add_option("--gamma", gamma, "minimum-degree margin γ");
        cmd->add_option("--Delta", Delta, "maximum degree of the target");
        cmd->add_option("--epsilon", epsilon, "regularity ε");
        cmd->add_option("--d", d, "density threshold (practical mode)");
        cmd->add_option("--k0", k0, "initial cluster count");
        cmd->add_option("--ell", ell, "number of pieces ℓ");
        cmd->add_option("--kmax", kmax, "largest cluster count (default 8·k0)");
        cmd->add_option("--beta-n", beta_n, "linking block length (default: labelling bandwidth)");
        cmd->add_option("--attempts", attempts, "assignment resamples");
        cmd->add_option("--strategy", strategy, "exhaustive | sampled | guided")
            ->check(CLI::IsMember({"exhaustive", "sampled", "guided"}));
        cmd->add_option("--budget", budget, "certification samples per pair");
        cmd->add_option("--labelling", labelling, "labelling file for the target (Cuthill-McKee when omitted)");
    }

    PipelineConfig config(const Common & c, std::size_t n) const
    {
        PipelineConfig cfg;
        cfg.mode = c.schedule_mode();
        cfg.gamma = rational_arg(gamma, "gamma");
        cfg.Delta = Delta;
        cfg.epsilon = rational_arg(epsilon, "epsilon");
        if (cfg.mode == ScheduleMode::practical) {
            cfg.overrides.epsilon = cfg.epsilon;
            cfg.overrides.d = rational_arg(d, "d");
            cfg.overrides.kmax = kmax;
        }
        cfg.k0 = k0;
        cfg.ell = ell;
        cfg.beta_n = beta_n;
        cfg.seed = c.seed;
        cfg.attempts = attempts;
        cfg.strategy = strategy_arg(strategy);
        cfg.budget = budget;
        if (!labelling.empty()) {
            cfg.labelling_mode = LabellingMode::given;
            cfg.labelling = load_labelling(labelling, n);
        }
        return cfg;
    }
};

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"bipemb: spanning bounded-bandwidth subgraphs of dense bipartite graphs"};
    app.require_subcommand(1);

    // gen-host
    Common gh_c;
    std::string gh_kind = "random", gh_gamma = "0.2", gh_slack = "0.05";
    std::size_t gh_n = 64, gh_k = 2, gh_m = 4;
    auto * gh = app.add_subcommand("gen-host", "generate a host graph (.bg)");
    add_common(gh, gh_c);
    gh->add_option("--kind", gh_kind, "random | planted-blocks")->check(CLI::IsMember({"random", "planted-blocks"}));
    gh->add_option("--n", gh_n, "vertices per side (random)");
    gh->add_option("--gamma", gh_gamma, "δ ≥ (1/2 + γ)n");
    gh->add_option("--slack", gh_slack, "edge probability above 1/2 + γ");
    gh->add_option("--k", gh_k, "blocks (planted)");
    gh->add_option("--m", gh_m, "block side (planted)");
    gh->callback([&] {
        BipartiteGraph g = gh_kind == "random"
                               ? random_min_degree_host(gh_n, rational_arg(gh_gamma, "gamma"), gh_c.seed,
                                                        rational_arg(gh_slack, "slack"))
                               : planted_blocks_host(gh_k, gh_m);
        if (gh_c.out.empty())
            write_graph(std::cout, g);
        else
            save_graph(gh_c.out, g);
    });

    // gen-target
    Common gt_c;
    std::string gt_kind = "hamilton-cycle", gt_labelling;
    std::size_t gt_n = 64, gt_w = 4, gt_h = 4, gt_window = 5, gt_Delta = 3;
    auto * gt = app.add_subcommand("gen-target", "generate a target graph (.bg) and its labelling");
    add_common(gt, gt_c);
    gt->add_option("--kind", gt_kind)->check(
        CLI::IsMember({"hamilton-cycle", "ladder", "moebius-ladder", "grid", "random-local", "c4-union"}));
    gt->add_option("--n", gt_n, "vertices per side");
    gt->add_option("--width", gt_w, "grid width");
    gt->add_option("--height", gt_h, "grid height");
    gt->add_option("--window", gt_window, "random-local window");
    gt->add_option("--Delta", gt_Delta, "random-local maximum degree");
    gt->add_option("--labelling", gt_labelling, "write the labelling here");
    gt->callback([&] {
        auto t = make_target(gt_kind, gt_n, gt_w, gt_h, gt_window, gt_Delta, gt_c.seed);
        if (gt_c.out.empty())
            write_graph(std::cout, t.graph);
        else
            save_graph(gt_c.out, t.graph);
        if (!gt_labelling.empty())
            save_labelling(gt_labelling, t.order);
        std::cerr << "bandwidth " << t.bandwidth << " max-degree " << t.graph.max_degree() << '\n';
    });

    // regularity check | partition
    auto * reg = app.add_subcommand("regularity", "certify pairs or build a regular partition");
    reg->require_subcommand(1);
    Common rc_c;
    std::string rc_graph, rc_u, rc_w, rc_eps = "0.25", rc_d = "0", rc_strategy = "sampled";
    std::size_t rc_budget = 2000;
    bool rc_super = false;
    auto * rc = reg->add_subcommand("check", "certify one pair (U, W)");
    add_common(rc, rc_c);
    rc->add_option("--graph", rc_graph)->required();
    rc->add_option("--u", rc_u, "A-range lo:hi")->required();
    rc->add_option("--w", rc_w, "B-range lo:hi")->required();
    rc->add_option("--epsilon", rc_eps);
    rc->add_option("--d", rc_d);
    rc->add_option("--strategy", rc_strategy)->check(CLI::IsMember({"exhaustive", "sampled", "guided"}));
    rc->add_option("--budget", rc_budget);
    rc->add_flag("--super", rc_super, "also check the minimum-degree condition");
    rc->callback([&] {
        auto g = load_graph(rc_graph);
        const RegularityParams p{rational_arg(rc_eps, "epsilon"), rational_arg(rc_d, "d")};
        CertifyOptions o;
        o.strategy = strategy_arg(rc_strategy);
        o.budget = rc_budget;
        o.seed = rc_c.seed;
        const auto u = range_arg(rc_u, Side::A, g.size_a());
        const auto w = range_arg(rc_w, Side::B, g.size_b());
        auto cert = rc_super ? check_super_regular_pair(g, u, w, p, o) : check_regular_pair(g, u, w, p, o);
        emit(rc_c, cli::certificate_json(cert));
    });

    Common rp_c;
    std::string rp_graph, rp_eps = "0.25", rp_d = "0.3", rp_strategy = "sampled";
    std::size_t rp_k0 = 8, rp_kmax = 64, rp_budget = 2000;
    auto * rp = reg->add_subcommand("partition", "witness-driven regular partition and reduced graph");
    add_common(rp, rp_c);
    rp->add_option("--graph", rp_graph)->required();
    rp->add_option("--epsilon", rp_eps);
    rp->add_option("--d", rp_d);
    rp->add_option("--k0", rp_k0);
    rp->add_option("--kmax", rp_kmax);
    rp->add_option("--strategy", rp_strategy)->check(CLI::IsMember({"exhaustive", "sampled", "guided"}));
    rp->add_option("--budget", rp_budget);
    rp->callback([&] {
        auto g = load_graph(rp_graph);
        CertifyOptions o;
        o.strategy = strategy_arg(rp_strategy);
        o.budget = rp_budget;
        o.seed = rp_c.seed;
        auto b = build_regular_partition(g, {rational_arg(rp_eps, "epsilon"), rational_arg(rp_d, "d")}, rp_k0,
                                         rp_kmax, o);
        Json j;
        j["kind"] = "regular-partition";
        j["refinements"] = b.refinements;
        j["regular_pairs"] = b.regular_pairs;
        j["partition"] = cli::partition_json(b.partition);
        j["reduced"] = cli::reduced_json(b.reduced);
        emit(rp_c, j);
    });

    // hamilton
    Common hm_c;
    std::string hm_graph, hm_alg = "auto";
    std::size_t hm_budget = 0;
    auto * hm = app.add_subcommand("hamilton", "find a Hamilton cycle");
    add_common(hm, hm_c);
    hm->add_option("--graph", hm_graph)->required();
    hm->add_option("--algorithm", hm_alg)->check(CLI::IsMember({"auto", "rotation", "exhaustive"}));
    hm->add_option("--restarts", hm_budget, "restart budget (default 50n)");
    hm->callback([&] {
        auto g = load_graph(hm_graph);
        HamiltonOptions o;
        o.seed = hm_c.seed;
        o.restart_budget = hm_budget;
        o.mode = hm_alg == "rotation"     ? HamiltonMode::rotation_extension
                 : hm_alg == "exhaustive" ? HamiltonMode::exhaustive_small
                                          : HamiltonMode::automatic;
        emit(hm_c, cli::cycle_json(find_hamilton_cycle(g, o)));
    });

    // balance
    Common bl_c;
    std::string bl_ni, bl_pieces, bl_xi = "0.05";
    std::size_t bl_retries = 50;
    auto * bl = app.add_subcommand("balance", "sample a balancing assignment of pieces to clusters");
    add_common(bl, bl_c);
    bl->add_option("--ni", bl_ni, "cluster sizes: 1000x8 or 10,20,...")->required();
    bl->add_option("--pieces", bl_pieces, "pieces file (x y per line)")->required();
    bl->add_option("--xi", bl_xi);
    bl->add_option("--retries", bl_retries);
    bl->callback([&] {
        const auto ni = sizes_arg(bl_ni);
        std::ifstream in(bl_pieces);
        if (!in)
            throw Error("cannot open " + bl_pieces);
        const auto p = read_pieces(in);
        BalanceOptions o;
        o.seed = bl_c.seed;
        o.max_retries = bl_retries;
        o.enforce_size_hypothesis = bl_c.schedule_mode() == ScheduleMode::faithful;
        const Rational xi = rational_arg(bl_xi, "xi");
        auto b = balance_assignment(ni, p.x, p.y, xi, o);
        Json j = cli::balance_json(b);
        j["bounds_hold"] = balance_bounds_hold(b, ni, xi);
        emit(bl_c, j);
    });

    // homomorphism
    Common hh_c;
    std::string hh_target, hh_labelling, hh_ni, hh_xi = "0.25";
    std::size_t hh_ell = 8;
    std::optional<std::size_t> hh_beta;
    auto * hh = app.add_subcommand("homomorphism", "build and verify the cycle homomorphism of a target");
    add_common(hh, hh_c);
    hh->add_option("--target", hh_target)->required();
    hh->add_option("--labelling", hh_labelling, "labelling file (Cuthill-McKee when omitted)");
    hh->add_option("--ni", hh_ni, "cluster sizes, e.g. 8x8 (k = count)")->required();
    hh->add_option("--ell", hh_ell);
    hh->add_option("--beta-n", hh_beta);
    hh->add_option("--xi", hh_xi);
    hh->callback([&] {
        auto h = load_graph(hh_target);
        const auto ni = sizes_arg(hh_ni);
        auto lab = hh_labelling.empty()
                       ? bandwidth_labelling(h, LabellingMode::cuthill_mckee)
                       : bandwidth_labelling(h, LabellingMode::given, load_labelling(hh_labelling, h.size_a()));
        const auto pieces = partition_pieces(h, lab, hh_ell);
        const Rational xi = rational_arg(hh_xi, "xi");
        BalanceOptions o;
        o.seed = hh_c.seed;
        o.enforce_size_hypothesis = hh_c.schedule_mode() == ScheduleMode::faithful;
        auto phi = balance_assignment(ni, pieces.x, pieces.y, xi, o);
        auto hom = build_cycle_homomorphism(h, lab, pieces, phi.phi, hh_beta.value_or(std::max<std::size_t>(lab.bandwidth, 1)),
                                            ni.size());
        Json j = cli::homomorphism_json(hom);
        j["bandwidth"] = lab.bandwidth;
        j["phi"] = cli::balance_json(phi);
        j["report"] = cli::homomorphism_report_json(verify_cycle_homomorphism(h, hom, ni, xi));
        emit(hh_c, j);
    });

    // embed
    Common em_c;
    EmbedArgs em_a;
    std::string em_host, em_target, em_report;
    bool em_timings = false;
    auto * em = app.add_subcommand("embed", "embed a target into a host");
    add_common(em, em_c);
    em_a.add(em);
    em->add_option("--host", em_host)->required();
    em->add_option("--target", em_target)->required();
    em->add_option("--report", em_report, "write the full run report here");
    em->add_flag("--timings", em_timings, "include wall-clock timings in the report");
    em->callback([&] {
        auto g = load_graph(em_host);
        auto h = load_graph(em_target);
        auto res = embed_bipartite(g, h, em_a.config(em_c, h.size_a()));
        emit(em_c, cli::embedding_json(res.embedding));
        if (!em_report.empty())
            cli::write_json(em_report, cli::pipeline_report_json(res.report, em_timings));
    });

    // verify
    Common vf_c;
    std::string vf_graph, vf_host, vf_target, vf_embedding, vf_cycle, vf_hom, vf_labelling;
    auto * vf = app.add_subcommand("verify", "re-validate a serialized artifact");
    add_common(vf, vf_c);
    vf->add_option("--graph", vf_graph, "graph for --cycle, or a .bg file to parse");
    vf->add_option("--host", vf_host);
    vf->add_option("--target", vf_target);
    vf->add_option("--embedding", vf_embedding);
    vf->add_option("--cycle", vf_cycle);
    vf->add_option("--homomorphism", vf_hom);
    vf->add_option("--labelling", vf_labelling);
    int verify_status = exit_ok;
    vf->callback([&] {
        Json out;
        auto fail = [&](const std::string & what) {
            out["ok"] = false;
            out["detail"] = what;
            verify_status = exit_verify;
        };
        try {
            if (!vf_embedding.empty()) {
                auto g = load_graph(vf_host);
                auto h = load_graph(vf_target);
                auto check = verify_embedding(g, h, cli::embedding_from_json(cli::read_json(vf_embedding)));
                out["artifact"] = "embedding";
                if (check)
                    out["ok"] = true;
                else
                    fail(check.detail);
            } else if (!vf_cycle.empty()) {
                auto g = load_graph(vf_graph);
                auto check = verify_cycle(g, cli::cycle_from_json(cli::read_json(vf_cycle)));
                out["artifact"] = "hamilton-cycle";
                if (check)
                    out["ok"] = true;
                else
                    fail(check.detail);
            } else if (!vf_hom.empty()) {
                auto h = load_graph(vf_target);
                auto hom = cli::homomorphism_from_json(cli::read_json(vf_hom), h.size_a(), h.size_b());
                out["artifact"] = "homomorphism";
                bool ok = hom.f_a.size() == h.size_a() && hom.f_b.size() == h.size_b();
                std::string detail = ok ? "" : "map does not cover V(H)";
                for (auto [a, b] : h.edges()) {
                    if (!ok)
                        break;
                    if (hom.f_a[a] >= hom.k || hom.f_b[b] >= hom.k || !is_cycle_edge(hom.k, hom.f_a[a], hom.f_b[b])) {
                        ok = false;
                        detail = "edge (x" + std::to_string(a) + ", y" + std::to_string(b) + ") is not mapped to a cycle edge";
                    }
                }
                if (ok)
                    out["ok"] = true;
                else
                    fail(detail);
            } else if (!vf_labelling.empty()) {
                auto h = load_graph(vf_target);
                auto order = load_labelling(vf_labelling, h.size_a());
                out["artifact"] = "labelling";
                out["ok"] = true;
                out["bandwidth"] = labelling_bandwidth(h, order);
            } else if (!vf_graph.empty()) {
                auto g = load_graph(vf_graph);
                out["artifact"] = "graph";
                out["ok"] = true;
                out["min_degree"] = g.min_degree();
                out["max_degree"] = g.max_degree();
                out["edges"] = g.edge_count();
            } else {
                throw CLI::ValidationError("verify needs one of --embedding, --cycle, --homomorphism, --labelling, --graph");
            }
        } catch (const ParseError & e) {
            fail(std::string("malformed artifact: ") + e.what());
        } catch (const Json::exception & e) {
            fail(std::string("malformed artifact: ") + e.what());
        } catch (const PreconditionError & e) {
            fail(std::string("invalid artifact: ") + e.what());
        }
        emit(vf_c, out);
    });

    // experiment
    Common ex_c;
    EmbedArgs ex_a;
    std::string ex_target = "hamilton-cycle";
    std::size_t ex_n = 128, ex_seeds = 10, ex_window = 5;
    bool ex_timings = false;
    auto * ex = app.add_subcommand("experiment", "batch of embed runs over consecutive seeds");
    add_common(ex, ex_c);
    ex_a.add(ex);
    ex->add_option("--n", ex_n, "vertices per side");
    ex->add_option("--target-kind", ex_target)->check(
        CLI::IsMember({"hamilton-cycle", "ladder", "moebius-ladder", "random-local", "c4-union"}));
    ex->add_option("--window", ex_window, "random-local window");
    ex->add_option("--seeds", ex_seeds, "number of runs; seeds are --seed, --seed + 1, ...");
    ex->add_flag("--timings", ex_timings, "include wall-clock timings");
    ex->callback([&] {
        Json runs = Json::array();
        std::size_t ok = 0;
        std::map<std::string, std::size_t> failures;
        double total = 0, worst = 0;
        for (std::size_t t = 0; t < ex_seeds; ++t) {
            Common c = ex_c;
            c.seed = ex_c.seed + t;
            Json run;
            run["seed"] = c.seed;
            const auto started = std::chrono::steady_clock::now();
            try {
                auto g = random_min_degree_host(ex_n, rational_arg(ex_a.gamma, "gamma"), c.seed);
                auto target = make_target(ex_target, ex_n, 0, 0, ex_window, ex_a.Delta, c.seed);
                PipelineConfig cfg = ex_a.config(c, ex_n);
                if (ex_a.labelling.empty()) {
                    cfg.labelling_mode = LabellingMode::given;
                    cfg.labelling = target.order;
                }
                auto res = embed_bipartite(g, target.graph, cfg);
                run["verified"] = res.report.verified;
                run["k"] = res.report.k;
                run["attempts_used"] = res.report.attempts_used;
                ++ok;
            } catch (const StageError & e) {
                run["verified"] = false;
                run["stage"] = e.stage();
                run["error"] = e.what();
                ++failures[e.stage()];
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            total += secs;
            worst = std::max(worst, secs);
            if (ex_timings)
                run["seconds"] = secs;
            runs.push_back(run);
        }
        Json j;
        j["kind"] = "experiment";
        j["n"] = ex_n;
        j["target_kind"] = ex_target;
        j["runs"] = ex_seeds;
        j["successes"] = ok;
        j["success_rate"] = std::to_string(ok) + "/" + std::to_string(ex_seeds);
        Json f = Json::object();
        for (const auto & [stage, count] : failures)
            f[stage] = count;
        j["failures_by_stage"] = f;
        if (ex_timings) {
            j["mean_seconds"] = ex_seeds ? total / static_cast<double>(ex_seeds) : 0.0;
            j["max_seconds"] = worst;
        }
        j["results"] = runs;
        emit(ex_c, j);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    } catch (const ParseError & e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const PreconditionError & e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const StageError & e) {
        std::cerr << "failed: " << e.what() << '\n';
        return exit_verify;
    } catch (const Error & e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return verify_status;
}
