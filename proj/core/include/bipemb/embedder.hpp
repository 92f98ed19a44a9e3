#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/graph.hpp"
#include "bipemb/hamilton.hpp"
#include "bipemb/homomorphism.hpp"
#include "bipemb/partitioner.hpp"
#include "bipemb/rational.hpp"
#include "bipemb/regularity.hpp"

namespace bipemb {

using ClassEdge = std::pair<std::uint32_t, std::uint32_t>; ///< (i, j): class X_i / A_i joined to Y_j / B_j

/// Assignment of the vertices of H to k classes per side: X_i = {x : class_a[x] = i}.
struct HPartition {
    std::size_t k = 0;
    std::vector<std::uint32_t> class_a;
    std::vector<std::uint32_t> class_b;

    static HPartition from_homomorphism(const CycleHomomorphism & hom)
    {
        return {hom.k, hom.f_a, hom.f_b};
    }
};

struct CompatibilityReport {
    std::vector<std::size_t> size_a, size_b;     ///< |X_i|, |Y_i|
    std::vector<std::size_t> target_a, target_b; ///< n_i of the matching G-clusters
    VertexSet s_a, s_b; ///< S on each side of H
    VertexSet t_a, t_b; ///< T = N(S) \ S on each side of H

    bool clause_i = false;       ///< |W_i| ≤ n_i
    bool sizes_exact = false;    ///< |W_i| = n_i (spanning case)
    bool clause_ii = false;      ///< every H-edge lies on an R-edge
    bool clause_iii = false;     ///< |S_i| ≤ ε n_i and |T_i| ≤ ε · min over the R'-component
    std::string first_violation; ///< empty when all clauses pass

    bool pass() const { return clause_i && clause_ii && clause_iii; }
};

/// Definition of ε-compatibility evaluated literally. Classes are A_0..A_{k-1}, B_0..B_{k-1};
/// R and R' list class edges (A_i, B_j).
CompatibilityReport compatibility_report(const BipartiteGraph & h, const HPartition & w,
                                         std::span<const std::size_t> target_a, std::span<const std::size_t> target_b,
                                         std::span<const ClassEdge> r, std::span<const ClassEdge> rprime,
                                         const Rational & epsilon);

enum class EmbedPhase : std::uint8_t { greedy, matching };

struct Embedding {
    std::vector<std::uint32_t> map_a; ///< X-vertex → A-vertex of G
    std::vector<std::uint32_t> map_b; ///< Y-vertex → B-vertex of G
    std::vector<EmbedPhase> phase_a;
    std::vector<EmbedPhase> phase_b;
};

struct EmbeddingCheck {
    bool ok = false;
    std::string detail;

    explicit operator bool() const noexcept { return ok; }
};

/// Injective, side-respecting and edge-preserving, checked exhaustively.
EmbeddingCheck verify_embedding(const BipartiteGraph & g, const BipartiteGraph & h, const Embedding & emb);

/// Thrown when every attempt got stuck. Carries the stuck vertex and, for matching failures,
/// the Hall-violating set of H-vertices.
class EmbeddingFailed : public StageError {
public:
    EmbeddingFailed(std::optional<VertexId> stuck, std::vector<VertexId> hall, const std::string & what)
        : StageError("embed", what), stuck_(stuck), hall_(std::move(hall)) {}

    const std::optional<VertexId> & stuck() const noexcept { return stuck_; }
    const std::vector<VertexId> & hall_violator() const noexcept { return hall_; }

private:
    std::optional<VertexId> stuck_;
    std::vector<VertexId> hall_;
};

struct EmbedOptions {
    RegularityParams params;           ///< ε for the report, d − ε as typical-vertex threshold
    std::uint64_t seed = 0;
    std::size_t retries = 20;          ///< fresh-randomness attempts before failing
    bool require_clause_iii = false;   ///< clause (iii) is reported; enforced only when set
    std::span<const VertexId> order;   ///< phase-1 order; Cuthill–McKee when empty
};

struct EmbedStats {
    std::size_t greedy_vertices = 0;
    std::size_t matching_vertices = 0;
    std::size_t attempts = 0;
};

/// Phase 1 places S ∪ T greedily (bandwidth order) onto vertices of the target cluster that are
/// adjacent to all embedded neighbours, preferring typical vertices. Phase 2 completes every
/// R'-pair by random perfect matchings on the admissibility graph, X-class first. R' must be a
/// matching; |X_i| = |A_i| and |Y_i| = |B_i| are required.
Embedding embed_compatible(const BipartiteGraph & g, const BipartiteGraph & h, const ClusterPartition & gpart,
                           const HPartition & hpart, std::span<const ClassEdge> r, std::span<const ClassEdge> rprime,
                           const EmbedOptions & options = {}, EmbedStats * stats = nullptr);

struct PipelineConfig {
    ScheduleMode mode = ScheduleMode::practical;
    Rational gamma{1, 5};
    std::size_t Delta = 2;
    Rational epsilon{1, 4}; ///< faithful-mode ε; practical mode reads overrides.epsilon first
    ScheduleOverrides overrides;
    std::size_t k0 = 8;
    std::size_t ell = 64;
    std::optional<std::size_t> beta_n;       ///< linking-block length; the labelling's bandwidth when unset
    LabellingMode labelling_mode = LabellingMode::cuthill_mckee;
    std::vector<VertexId> labelling;         ///< used when labelling_mode is given
    std::uint64_t seed = 0;
    std::size_t attempts = 50;               ///< φ resamples when a later stage rejects the assignment
    std::size_t balance_retries = 50;
    Strategy strategy = Strategy::sampled;
    std::size_t budget = 2000;
    std::size_t embed_retries = 20;
    Rational min_cluster_fraction{1, 2};     ///< reject φ when some a_i or b_i < fraction · n_i
};

struct StageNote {
    std::string stage;
    std::string message;
};

struct PipelineReport {
    PipelineConfig config;
    ParameterSchedule schedule;
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::size_t> n_i;
    std::size_t refinements = 0;
    std::size_t reduced_edges = 0;
    std::size_t reduced_min_degree = 0;
    HamiltonCycle reduced_cycle;
    std::size_t moved_low_degree = 0;
    std::size_t trimmed = 0;
    std::vector<std::size_t> absorbed_gains;
    std::size_t bandwidth = 0;
    std::size_t beta_n = 0;
    std::size_t ell_requested = 0;
    std::size_t ell_effective = 0;
    bool size_hypothesis_held = false; ///< n_i ≤ n/8 for all i
    std::size_t attempts_used = 0;
    BalancingAssignment phi;
    HomomorphismReport homomorphism;
    std::vector<std::size_t> a, b;
    std::size_t redistribution_iterations = 0;
    std::size_t redistribution_moves = 0;
    std::size_t certified_pairs = 0;
    CompatibilityReport compatibility;
    EmbedStats embed;
    std::vector<StageNote> rejected_attempts;
    bool verified = false;
    double seconds = 0;
};

struct PipelineResult {
    Embedding embedding;
    PipelineReport report;
};

/// Runs the whole construction: schedule, host partition phase 1, labelling, pieces, φ, f,
/// phase 2 with a_i = |f⁻¹(A_i)|, compatibility, embedding, verification. A returned
/// embedding has always passed verify_embedding. Failures throw StageError.
PipelineResult embed_bipartite(const BipartiteGraph & g, const BipartiteGraph & h, const PipelineConfig & config);

} // namespace bipemb
