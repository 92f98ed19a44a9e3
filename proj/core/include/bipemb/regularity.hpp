#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/graph.hpp"
#include "bipemb/rational.hpp"

namespace bipemb {

/// (ε, d): a pair is (ε, d)-regular when its density is at least d and every
/// U' ⊆ U, W' ⊆ W with |U'| ≥ ε|U|, |W'| ≥ ε|W| has |d(U',W') − d(U,W)| ≤ ε.
struct RegularityParams {
    Rational epsilon{1, 4};
    Rational d{0};

    /// Throws PreconditionError unless 0 < ε ≤ 1 and 0 ≤ d ≤ 1.
    void validate() const;
};

enum class Strategy : std::uint8_t {
    exhaustive, ///< every qualifying subset pair; ground truth, capped
    sampled,    ///< uniform subset pairs of minimal qualifying size
    guided,     ///< neighbourhood-guided probes, then uniform samples
};

enum class Verdict : std::uint8_t {
    certified_regular,
    certified_irregular,
    below_density, ///< no deviation witness found, but d(U,W) < d
    certified_super_regular,
    failed_super_regular,
};

const char * to_string(Strategy s) noexcept;
const char * to_string(Verdict v) noexcept;

struct IrregularityWitness {
    VertexSet u_sub;
    VertexSet w_sub;
    Rational deviation; ///< |d(U',W') − d(U,W)|
};

struct CertifyOptions {
    Strategy strategy = Strategy::sampled;
    std::size_t budget = 2000;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_cap = std::uint64_t{1} << 22;
};

struct PairCertificate {
    VertexSet u;
    VertexSet w;
    RegularityParams params;
    Verdict verdict = Verdict::certified_irregular;
    Rational base_density;
    std::optional<IrregularityWitness> witness;
    Strategy strategy = Strategy::sampled;
    std::size_t samples_used = 0;
    std::optional<VertexId> low_degree_vertex; ///< super-regular checks only

    /// True when no deviation witness was found (density may still be below d).
    bool epsilon_regular() const noexcept { return !witness.has_value(); }
    bool regular() const noexcept
    {
        return verdict == Verdict::certified_regular || verdict == Verdict::certified_super_regular;
    }
};

/// Certifies (U, W) at `params`. Exhaustive mode throws PreconditionError when the
/// number of qualifying subset pairs exceeds `options.enumeration_cap`.
PairCertificate check_regular_pair(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w,
                                   const RegularityParams & params, const CertifyOptions & options = {});

/// Regular check plus the (always exhaustive) minimum-degree condition.
PairCertificate check_super_regular_pair(const BipartiteGraph & g, const VertexSet & u, const VertexSet & w,
                                         const RegularityParams & params, const CertifyOptions & options = {});

struct TypicalReport {
    VertexSet typical;           ///< vertices of A with ≥ (d − ε)|B'| neighbours in B'
    bool precondition_met = true; ///< |B'| ≥ ε|B| and B' ⊆ B
};

TypicalReport typical_vertices(const BipartiteGraph & g, const VertexSet & a, const VertexSet & b,
                               const VertexSet & b_prime, const RegularityParams & params);

/// Parameters a regular pair keeps after replacing its sides by sets differing in an
/// α- and β-fraction: (ε + 3(√α + √β), d − 2(α + β)), ε capped at 1, d floored at 0.
/// Exact when α and β are squares of rationals; otherwise √ is rounded up on a 2^-40 grid.
RegularityParams rebound_after_perturbation(const RegularityParams & params, const Rational & alpha,
                                            const Rational & beta);

/// Clusters A_1..A_k, B_1..B_k (stored 0-based) plus exceptional sets A_0, B_0.
struct ClusterPartition {
    std::size_t k = 0;
    std::vector<VertexSet> a;
    std::vector<VertexSet> b;
    VertexSet a0;
    VertexSet b0;

    const VertexSet & cluster(Side s, std::size_t i) const { return s == Side::A ? a.at(i) : b.at(i); }

    /// Throws PreconditionError unless the classes partition both sides of g.
    void validate(const BipartiteGraph & g) const;

    /// |A_1| = |B_1| = ... = |A_k| = |B_k|.
    bool is_equipartition() const;

    /// Cluster index of v, or nullopt when v is exceptional.
    std::optional<std::size_t> cluster_of(VertexId v) const;
};

/// Reduced graph on cluster indices; edge (i, j) joins A_i and B_j.
struct ReducedGraph {
    std::size_t k = 0;
    RegularityParams params;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<PairCertificate> certificates; ///< all k*k pairs, row-major (i*k + j)

    bool has_edge(std::size_t i, std::size_t j) const;
    const PairCertificate & certificate(std::size_t i, std::size_t j) const { return certificates.at(i * k + j); }

    /// The reduced graph as a k+k bipartite graph.
    BipartiteGraph as_graph() const;
};

/// Edge (i, j) iff (A_i, B_j) certifies regular with density ≥ d.
ReducedGraph maximal_reduced_graph(const BipartiteGraph & g, const ClusterPartition & partition,
                                   const RegularityParams & params, const CertifyOptions & options = {});

struct PartitionBuild {
    ClusterPartition partition;
    ReducedGraph reduced;
    std::size_t refinements = 0;
    std::size_t regular_pairs = 0; ///< pairs without a deviation witness
};

/// Thrown when the certification threshold is not reached within kmax clusters.
class PartitionNotCertified : public StageError {
public:
    PartitionNotCertified(PartitionBuild best, const std::string & what)
        : StageError("partition", what), best_(std::move(best)) {}

    const PartitionBuild & best() const noexcept { return best_; }

private:
    PartitionBuild best_;
};

/// Witness-driven refinement: start from k0 contiguous equal clusters per side, certify all
/// pairs, and while fewer than (1 − ε)k² pairs are ε-regular split every cluster in two
/// (ordered by degree into its irregularity witness). Throws PartitionNotCertified.
PartitionBuild build_regular_partition(const BipartiteGraph & g, const RegularityParams & params, std::size_t k0,
                                       std::size_t kmax, const CertifyOptions & options = {});

struct SuperRegularizeOptions {
    RegularityParams weakened;       ///< parameters the R*-pairs must satisfy afterwards
    std::size_t max_degree = 2;      ///< Δ(R*) bound
    Rational exceptional_fraction{1}; ///< |A_0|, |B_0| ≤ fraction · n
    CertifyOptions certify;
};

struct SuperRegularizeResult {
    ClusterPartition partition;
    std::size_t moved_low_degree = 0; ///< vertices removed for failing a degree threshold
    std::size_t trimmed = 0;          ///< vertices removed to re-equalise cluster sizes
    std::vector<PairCertificate> certificates; ///< one per R*-edge, in input order
};

/// Moves vertices with too few neighbours across R*-pairs into the exceptional sets, trims
/// clusters to a common size (weakest vertices first, ties by lowest index) and repeats until
/// every R*-pair satisfies the degree condition at `weakened.d`. Throws StageError when an
/// exceptional set outgrows its bound or an R*-pair fails re-certification.
SuperRegularizeResult super_regularize(const BipartiteGraph & g, const ClusterPartition & partition,
                                       const ReducedGraph & reduced,
                                       std::span<const std::pair<std::uint32_t, std::uint32_t>> rstar,
                                       const SuperRegularizeOptions & options);

} // namespace bipemb
