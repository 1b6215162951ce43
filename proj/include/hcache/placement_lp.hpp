#pragma once

#include <cstdint>
#include <string>

#include "hcache/delay.hpp"
#include "hcache/lp.hpp"
#include "hcache/model.hpp"

namespace hcache {

// Coverage relaxation for the uniform-delay special case:
//   maximize sum_{f,u} P_f wtilde_u t_{f,u}
//   s.t. t_{f,u} <= sum_{h in H(u), h != 0} rho_{f,h},  sum_f rho_{f,h} <= M,
//        rho, t in [0,1].
// Variable layout: rho_{f,h} at f*H + (h-1), then t_{f,u} at F*H + f*U + u,
// (U+H)*F variables in total.
LinearProgram build_coverage_lp(const SpecialCaseInstance& sc);

// Fractional-placement delay minimization:
//   minimize sum_{u,f} P_f z_{u,f}
//   s.t. z_{u,f} >= omega_(j)u - sum_{i<j} rho_{f,(i)u} (omega_(j)u - omega_(i)u)
//        for every stop position j, sum_f rho_{f,h} <= M, rho in [0,1], z >= 0.
// Variable layout: rho_{f,h} at f*H + (h-1), then z_{u,f} at F*H + u*F + f.
LinearProgram build_coded_lp(const ProblemInstance& instance);

int coverage_lp_rho_index(const ProblemInstance& instance, int f, int h);
int coded_lp_rho_index(const ProblemInstance& instance, int f, int h);

enum class CodedBackend {
    kAuto,           // direct simplex when the tableau stays desk-sized
    kSimplex,        // build_coded_lp + solve_lp
    kDecomposition,  // per-file column generation, for scenario-scale instances
};

struct CodedSolveResult {
    LpStatus status = LpStatus::kInfeasible;
    CodedPlacement placement;
    double objective = 0.0;      // coded_objective(placement), recomputed directly
    double lp_objective = 0.0;   // solver-reported optimum
    double bound_gap = 0.0;      // upper bound minus lower bound certificate
    std::string backend;
    std::uint64_t iterations = 0;
};

struct CodedSolveOptions {
    CodedBackend backend = CodedBackend::kAuto;
    double decomposition_rel_gap = 1e-8;
    int decomposition_max_rounds = 2000;
};

// Optimal fractional placement. The direct route solves the LP above and
// checks that the auxiliary variables are tight against the recomputed
// objective (1e-6). The decomposition route prices per-file allocation
// columns against cache-capacity duals and terminates on a duality-gap
// certificate; it is validated against the direct route in tests.
CodedSolveResult solve_coded(const ProblemInstance& instance, CodedSolveOptions options = {});

// Total expected delay if every file used the same helper allocation `rho_row`
// (rho_row[h-1] for helper h). Used to cost decomposition columns exactly.
double total_delay_for_allocation(const ProblemInstance& instance,
                                  const std::vector<double>& rho_row);

}  // namespace hcache
