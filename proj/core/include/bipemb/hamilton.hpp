#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bipemb/error.hpp"
#include "bipemb/graph.hpp"

namespace bipemb {

/// Alternating vertex sequence v_1 .. v_2n; v_2n is adjacent to v_1.
struct HamiltonCycle {
    std::vector<VertexId> order;
};

enum class HamiltonMode : std::uint8_t {
    automatic,          ///< exhaustive_small when n <= 12, rotation_extension otherwise
    rotation_extension, ///< randomized longest-path rotations with restarts
    exhaustive_small,   ///< subset dynamic programme, ground truth for n <= 12
};

struct HamiltonOptions {
    HamiltonMode mode = HamiltonMode::automatic;
    std::uint64_t seed = 0;
    std::size_t restart_budget = 0; ///< 0 means 50·n restarts
};

/// Thrown when no cycle was found. `hypothesis_met()` tells whether δ(G) ≥ n/2 + 1 held,
/// in which case a cycle exists and the failure is the heuristic's.
class HamiltonNotFound : public StageError {
public:
    HamiltonNotFound(bool hypothesis_met, const std::string & what)
        : StageError("hamilton", what), hypothesis_met_(hypothesis_met) {}

    bool hypothesis_met() const noexcept { return hypothesis_met_; }

private:
    bool hypothesis_met_;
};

HamiltonCycle find_hamilton_cycle(const BipartiteGraph & g, const HamiltonOptions & options = {});

struct CycleCheck {
    bool ok = false;
    std::string detail; ///< first violated condition, empty when ok

    explicit operator bool() const noexcept { return ok; }
};

CycleCheck verify_cycle(const BipartiteGraph & g, const HamiltonCycle & cycle);

} // namespace bipemb
