#pragma once

#include <vector>

#include "hcache/model.hpp"

namespace hcache {

// Expected per-bit delay for user u under placement X: each file is served
// by the lowest-delay neighbor caching it, the base station otherwise.
// Implemented as a first-hit scan over the user's sorted neighborhood.
double uncoded_user_delay(const ProblemInstance& instance, const UncodedPlacement& x, int u);

// Total delay savings sum_u (omega_0u - D_u). Nonnegative for feasible X.
double uncoded_objective(const ProblemInstance& instance, const UncodedPlacement& x);

// Uniform-helper-delay restriction: every non-BS edge carries exactly omega1
// and every user strictly prefers helpers to the base station.
struct SpecialCaseInstance {
    const ProblemInstance* instance = nullptr;
    double omega1 = 0.0;
    std::vector<double> wtilde;  // omega_0u - omega1, all > 0

    const ProblemInstance& base() const { return *instance; }
};

bool is_special_case(const ProblemInstance& instance);
// Throws std::invalid_argument when the uniform-delay invariant fails.
SpecialCaseInstance make_special_case(const ProblemInstance& instance);

// sum_u wtilde_u * sum_{f in union of u's neighbor caches} P_f.
double special_case_value(const SpecialCaseInstance& sc, const UncodedPlacement& x);

// Product-form objective extended to fractional arguments in [0,1]^(F x H):
//   sum_{u,f} P_f wtilde_u (1 - prod_{h in H(u), h != 0} (1 - rho_{f,h})).
// Equals special_case_value on binary input.
double special_case_g(const SpecialCaseInstance& sc, const CodedPlacement& rho);

// Coverage surrogate sum_{f,u} P_f wtilde_u min{1, sum_{h in H(u), h != 0} rho_{f,h}}.
double coverage_surrogate(const SpecialCaseInstance& sc, const CodedPlacement& rho);

// Expected per-bit delay for (u, f) under fractional placement rho, as the
// max over stop positions j of
//   omega_(j)u - sum_{i<j} rho_{f,(i)u} (omega_(j)u - omega_(i)u).
double coded_user_file_delay(const ProblemInstance& instance, const CodedPlacement& rho,
                             int u, int f);

// Same quantity evaluated piecewise: parity fractions are drained from the
// sorted neighbors until a whole file's worth is reached, the base station
// absorbing any remainder. Kept as an independent route for testing.
double coded_user_file_delay_piecewise(const ProblemInstance& instance, const CodedPlacement& rho,
                                       int u, int f);

// Expected per-bit delay of user u, sum_f P_f * coded delay(u, f).
double coded_user_delay(const ProblemInstance& instance, const CodedPlacement& rho, int u);

// Total expected delay sum_u sum_f P_f D_u^f. Minimized quantity; for binary
// placements it complements uncoded_objective to sum_u omega_0u.
double coded_objective(const ProblemInstance& instance, const CodedPlacement& rho);

// sum_u omega_0u, the BS-only total delay (and the savings/delay pivot).
double bs_only_total_delay(const ProblemInstance& instance);

}  // namespace hcache
