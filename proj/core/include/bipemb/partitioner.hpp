#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bipemb/graph.hpp"
#include "bipemb/hamilton.hpp"
#include "bipemb/rational.hpp"
#include "bipemb/regularity.hpp"

namespace bipemb {

enum class ScheduleMode : std::uint8_t { faithful, practical };

const char * to_string(ScheduleMode m) noexcept;

/// Practical-mode values. Unset fields fall back to the defaults documented per field.
struct ScheduleOverrides {
    std::optional<Rational> epsilon; ///< regularity ε of every stage (default 1/4)
    std::optional<Rational> d;       ///< density d of every stage (default 3/10)
    std::optional<Rational> xi_lg;   ///< default 1/4
    std::optional<Rational> xi_lh;   ///< default 1/4
    std::optional<std::size_t> kmax; ///< default 8·k0
};

struct InequalityCheck {
    std::string name;
    bool holds = false;
};

/// Constant chain for the host partition. In faithful mode every field is the closed form
/// evaluated exactly; in practical mode the fields carry user values and `mode` says so.
struct ParameterSchedule {
    ScheduleMode mode = ScheduleMode::practical;
    Rational gamma;
    std::size_t Delta = 2;
    Rational epsilon;
    std::size_t k0 = 8;
    std::size_t k0_prime = 8; ///< least k ≥ k0 with (γ − d' − ε'')k ≥ 1 (faithful), else k0
    std::size_t K0 = 64;      ///< upper cluster count; an input, the regularity lemma's bound is not computable

    Rational d_lg;
    Rational eps_prime, d_prime;
    Rational eps_dprime, d_dprime;
    Rational alpha; ///< ε''/(γ(1 − ε'')), the perturbation fraction after absorption
    Rational eps_hat, d_hat;
    Rational xi_lg, xi_lh;

    std::vector<InequalityCheck> checks; ///< faithful mode only

    bool all_checks_hold() const;

    RegularityParams partition_params() const { return {eps_prime, d_prime}; }
    RegularityParams super_params() const { return {eps_dprime, d_dprime}; }
    RegularityParams absorbed_params() const { return {eps_hat, d_hat}; }
    RegularityParams final_params() const { return {epsilon, d_lg}; }
};

/// Faithful mode requires 0 < γ < 1/20 and ε ≤ γ²/1000 and throws StageError("schedule", ...)
/// naming the first violated inequality. `K0` defaults to k0'.
ParameterSchedule derive_parameter_schedule(const Rational & gamma, std::size_t Delta, const Rational & epsilon,
                                            std::size_t k0, ScheduleMode mode,
                                            const ScheduleOverrides & overrides = {},
                                            std::optional<std::size_t> K0 = std::nullopt);

/// I(x, y): indices i with |N(x) ∩ B_i| ≥ d|B_i| and |N(y) ∩ A_i| ≥ d|A_i|.
std::vector<std::size_t> candidate_index_set(const BipartiteGraph & g, std::uint32_t x, std::uint32_t y,
                                             const ClusterPartition & partition, const Rational & d);

struct AbsorbedPair {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::size_t cluster = 0;
};

struct AbsorbResult {
    ClusterPartition partition;       ///< exceptional sets empty
    std::vector<std::size_t> gains;   ///< vertices gained per cluster index (same on both sides)
    std::vector<AbsorbedPair> pairs;
};

/// Pairs A_0 and B_0 by sorted index and moves each pair into the least-loaded index of
/// I(x, y) computed against the input clusters. Throws StageError("absorb") on empty I(x, y).
AbsorbResult absorb_exceptional_vertices(const BipartiteGraph & g, const ClusterPartition & partition,
                                         const Rational & d_dprime, const Rational & gamma);

struct RedistributeOptions {
    bool enforce_xi_bound = true; ///< require ξ ≤ 1/(20k²) and |A'_i|, |B'_i| ≥ n/(2k)
    bool certify_output = true;
    CertifyOptions certify;
};

struct RedistributeResult {
    ClusterPartition partition;
    std::size_t iterations = 0;   ///< source-to-sink walks, bounded by kξn
    std::size_t vertex_moves = 0; ///< single-vertex moves along all walks
    RegularityParams output_params; ///< (ε' + 100k√ξ, d' − 100k²√ξ − ε'), clamped
    std::vector<PairCertificate> super_certificates;   ///< (A_i, B_i)
    std::vector<PairCertificate> regular_certificates; ///< (A_i, B_{i+1})

    bool all_certified() const;
};

/// Source/sink redistribution. A-vertices move i → i+1, B-vertices i → i−1 (indices mod k).
/// Each move takes the lowest-index vertex with ≥ d'·|next partner| neighbours in the next
/// partner cluster whose removal keeps every vertex of its current partner at ≥ d' relative degree.
RedistributeResult redistribute_cluster_sizes(const BipartiteGraph & g, const ClusterPartition & partition,
                                              std::span<const std::int64_t> deltas_a,
                                              std::span<const std::int64_t> deltas_b, const Rational & xi,
                                              const RegularityParams & params, const RedistributeOptions & options = {});

struct LemmaGOptions {
    CertifyOptions certify;
    HamiltonOptions hamilton;
};

struct LemmaGState {
    ParameterSchedule schedule;
    std::size_t k = 0;
    ClusterPartition partition; ///< ordered along the cycle A_1 B_2 A_2 ... B_k A_k B_1, exceptional sets empty
    std::vector<std::size_t> n_i;
    ReducedGraph reduced;       ///< relabelled to the cycle order
    HamiltonCycle cycle;        ///< Hamilton cycle of the reduced graph, original labels
    std::size_t reduced_min_degree = 0;
    std::size_t refinements = 0;
    std::size_t moved_low_degree = 0;
    std::size_t trimmed = 0;
    std::vector<std::size_t> absorbed_gains;
    std::vector<PairCertificate> super_certificates;   ///< (A_i, B_i)
    std::vector<PairCertificate> regular_certificates; ///< (A_i, B_{i+1})
};

LemmaGState lemma_g_phase1(const BipartiteGraph & g, const ParameterSchedule & schedule,
                           const LemmaGOptions & options = {});

struct LemmaGPartition {
    ClusterPartition partition; ///< |A_i| = a_i, |B_i| = b_i
    RedistributeResult redistribution;
    std::vector<PairCertificate> super_certificates;   ///< (A_i, B_i) at the final parameters
    std::vector<PairCertificate> regular_certificates; ///< (A_i, B_{i+1}) at the final parameters

    bool all_certified() const;
};

/// Requires Σa = Σb = n and a_i, b_i ≤ n_i + ξ_lg·n. Certifies at schedule.final_params().
LemmaGPartition lemma_g_phase2(const BipartiteGraph & g, const LemmaGState & state, std::span<const std::size_t> a,
                               std::span<const std::size_t> b, const LemmaGOptions & options = {});

} // namespace bipemb
