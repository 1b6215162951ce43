#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hcache/delay.hpp"
#include "hcache/lp.hpp"
#include "hcache/model.hpp"

namespace hcache {

// Entries are integral within this tolerance; anything closer gets snapped.
inline constexpr double kIntegralityTol = 1e-9;

struct FractionalEdge {
    int file;    // 0-based
    int helper;  // 1..H
};

// Cycle or leaf-to-leaf path in the bipartite file/helper graph of fractional
// entries, split into the two alternating matchings the rounding step shifts
// mass between. eps1/eps2 bound the shift so every entry stays in [0,1].
struct AugmentingStructure {
    enum class Kind { kCycle, kPath };
    Kind kind = Kind::kPath;
    std::vector<FractionalEdge> edges;  // consecutive edges share a vertex
    std::vector<int> m1, m2;            // alternating positions into `edges`
    double eps1 = 0.0;                  // feasible shift toward M1 - eps
    double eps2 = 0.0;                  // feasible shift toward M1 + eps
};

std::vector<FractionalEdge> fractional_edges(const CodedPlacement& x);

// Deterministic search: a simple cycle if the fractional subgraph has one
// (DFS from the lowest-indexed vertex, neighbors ascending), otherwise a
// maximal path between two degree-1 vertices; nullopt when no edges remain.
std::optional<AugmentingStructure> find_cycle_or_path(const CodedPlacement& x);

struct PipageStepReport {
    double chosen_epsilon = 0.0;
    double g_before = 0.0;
    double g_after = 0.0;
    int edges_made_integral = 0;
};

// Moves mass along the structure to whichever endpoint scores better under g
// (ties toward +eps2), snaps near-integral entries, and checks feasibility
// and that g did not decrease. At least one edge becomes integral.
PipageStepReport pipage_step(const SpecialCaseInstance& sc, CodedPlacement& x,
                             const AugmentingStructure& alpha);

struct PipageTrace {
    std::vector<PipageStepReport> steps;
};

// Rounds a feasible fractional solution to an integral placement without
// decreasing g, in at most F*H steps.
UncodedPlacement pipage_round(const SpecialCaseInstance& sc, CodedPlacement fractional,
                              PipageTrace* trace = nullptr);

struct LpPipageResult {
    LpStatus status = LpStatus::kInfeasible;
    UncodedPlacement placement;
    double lp_objective = 0.0;     // coverage-relaxation optimum
    double rounded_value = 0.0;    // objective of the integral placement
    PipageTrace trace;
};

// Coverage LP + rounding for the uniform-delay special case; the integral
// output is within 1 - (1 - 1/d)^d of the integer optimum, d the largest
// number of helpers any user sees.
LpPipageResult lp_pipage_solve(const SpecialCaseInstance& sc);

// The guarantee factor 1 - (1 - 1/d)^d, taken as 1 - 1/e when d is not
// bounded (d <= 0).
double pipage_guarantee(int d);

}  // namespace hcache
