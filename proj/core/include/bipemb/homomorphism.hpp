#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/graph.hpp"
#include "bipemb/rational.hpp"

namespace bipemb {

/// A vertex numbering of H. `order[t]` is the vertex at position t.
struct BandwidthLabelling {
    std::vector<VertexId> order;
    std::size_t bandwidth = 0;

    /// Inverse permutation: positions of A-side and B-side vertices.
    std::vector<std::size_t> positions_a;
    std::vector<std::size_t> positions_b;

    std::size_t position(VertexId v) const { return v.side == Side::A ? positions_a.at(v.index) : positions_b.at(v.index); }
};

enum class LabellingMode : std::uint8_t { given, cuthill_mckee, exact_small };

/// Max |pos(u) − pos(v)| over the edges of h.
std::size_t labelling_bandwidth(const BipartiteGraph & h, std::span<const VertexId> order);

/// `given` validates `order` as a permutation of V(h); `exact_small` (≤ 16 vertices) is optimal.
BandwidthLabelling bandwidth_labelling(const BipartiteGraph & h, LabellingMode mode,
                                       std::span<const VertexId> order = {});

struct PiecePartition {
    std::size_t ell = 0;
    std::vector<std::size_t> starts; ///< first position of each piece
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> x;      ///< |W_i ∩ X|
    std::vector<std::size_t> y;      ///< |W_i ∩ Y|

    std::size_t piece_of(std::size_t position) const;
};

/// ell consecutive intervals of sizes ⌈2n/ℓ⌉ then ⌊2n/ℓ⌋ (larger pieces first).
PiecePartition partition_pieces(const BipartiteGraph & h, const BandwidthLabelling & labelling, std::size_t ell);

struct BalancingAssignment {
    std::vector<std::size_t> phi;   ///< piece j → cluster φ(j), 0-based
    std::vector<std::size_t> a_bar; ///< Σ_{φ(j)=i} x_j
    std::vector<std::size_t> b_bar; ///< Σ_{φ(j)=i} y_j
    std::vector<std::size_t> s;     ///< S_i = |φ⁻¹(i)|
    std::vector<Rational> d;        ///< D_i = Σ_j (ℓ/3n)(x_j − y_j)(1[φ(j)=i] − n_i/n)
    std::size_t retries_used = 0;
};

struct BalanceOptions {
    std::size_t max_retries = 50;
    std::uint64_t seed = 0;
    bool enforce_size_hypothesis = true; ///< n_i ≤ n/8
};

/// Thrown when every sample violated ā_i < n_i + ξn or b̄_i < n_i + ξn.
class BalanceFailed : public StageError {
public:
    BalanceFailed(std::size_t samples, std::vector<std::size_t> violations, const std::string & what)
        : StageError("balance", what), samples_(samples), violations_(std::move(violations)) {}

    std::size_t samples() const noexcept { return samples_; }
    /// Per cluster: number of samples in which its bound failed.
    const std::vector<std::size_t> & violations() const noexcept { return violations_; }

private:
    std::size_t samples_;
    std::vector<std::size_t> violations_;
};

/// Samples φ(j) = i with probability n_i/n independently and keeps the first sample meeting
/// ā_i < n_i + ξn and b̄_i < n_i + ξn for every i.
BalancingAssignment balance_assignment(std::span<const std::size_t> targets, std::span<const std::size_t> x,
                                       std::span<const std::size_t> y, const Rational & xi,
                                       const BalanceOptions & options = {});

/// True iff ā_i < n_i + ξn and b̄_i < n_i + ξn for all i (exact).
bool balance_bounds_hold(const BalancingAssignment & phi, std::span<const std::size_t> targets, const Rational & xi);

struct FailureBound {
    double raw = 0;     ///< 2k·exp(−ξ²ℓ/2) + 2k·exp(−ξ²ℓ/72)
    double clamped = 0; ///< min(raw, 1)
};

FailureBound failure_probability_bound(std::size_t k, const Rational & xi, std::size_t ell);

/// ⌈1000 k⁵ / ξ²⌉
Integer lemma_piece_count(std::size_t k, const Rational & xi);

struct CycleHomomorphism {
    std::size_t k = 0;
    std::vector<std::uint32_t> f_a; ///< X-vertex (A-side of H) → A-cluster index
    std::vector<std::uint32_t> f_b; ///< Y-vertex (B-side of H) → B-cluster index
    VertexSet s_a;                  ///< linking vertices on the X side
    VertexSet s_b;                  ///< linking vertices on the Y side

    std::size_t s_size() const { return s_a.size() + s_b.size(); }
    std::vector<std::size_t> preimage_a() const;
    std::vector<std::size_t> preimage_b() const;
};

/// True iff {A_i, B_j} is an edge of the cycle A_1 B_2 A_2 ... B_k A_k B_1, i.e. (j − i) mod k ∈ {0, 1}.
bool is_cycle_edge(std::size_t k, std::size_t i, std::size_t j);

/// Builds f from the linking blocks L_j^i = [w_i + (j−1)βn, w_i + jβn), j ∈ [2k], with φ(0) := φ(1).
/// Requires bandwidth ≤ beta_n and (2k + 1)·beta_n ≤ smallest piece. The result is verified
/// edge by edge; a failure throws StageError("homomorphism") with the edge and case trace.
CycleHomomorphism build_cycle_homomorphism(const BipartiteGraph & h, const BandwidthLabelling & labelling,
                                           const PiecePartition & pieces, std::span<const std::size_t> phi,
                                           std::size_t beta_n, std::size_t k);

struct HomomorphismReport {
    bool homomorphism = false;
    std::optional<Edge> bad_edge;
    bool h1 = false;
    std::size_t s_size = 0;
    Rational h1_bound; ///< ξ·2k·n
    bool h2 = false;
    std::optional<Edge> h2_violation;
    bool h3 = false;
    std::vector<std::size_t> preimage_a;
    std::vector<std::size_t> preimage_b;
    std::optional<std::size_t> h3_violation; ///< cluster index

    bool all() const { return homomorphism && h1 && h2 && h3; }
};

HomomorphismReport verify_cycle_homomorphism(const BipartiteGraph & h, const CycleHomomorphism & hom,
                                             std::span<const std::size_t> targets, const Rational & xi);

} // namespace bipemb
