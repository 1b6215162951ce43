#pragma once

#include <cstdint>
#include <vector>

#include "hcache/model.hpp"

namespace hcache {

// One accepted greedy step: element (f, h), its marginal value, and the
// objective after placing it.
struct GreedyStep {
    int file = 0;    // 0-based
    int helper = 0;  // 1..H
    double marginal = 0.0;
    double objective_after = 0.0;
};

struct GreedyTrace {
    std::vector<GreedyStep> steps;
    std::uint64_t marginal_evaluations = 0;
    bool stopped_on_zero_marginal = false;

    double final_objective() const {
        return steps.empty() ? 0.0 : steps.back().objective_after;
    }
};

struct GreedyResult {
    UncodedPlacement placement;
    GreedyTrace trace;
};

// Objective gain from adding (f, h) to X, computed incrementally over the
// users of h. Rejects elements already placed or exceeding the cache cap.
double marginal_value(const ProblemInstance& instance, const UncodedPlacement& x, int f, int h);

// Greedy submodular maximization over the per-helper cache caps: repeatedly
// place the (file, helper) element of highest marginal value, ties broken by
// lowest file then lowest helper index, stopping when the best marginal hits
// zero or every cache is full. Lazy evaluation: stale marginals are upper
// bounds, so only the queue head needs refreshing.
GreedyResult greedy_place(const ProblemInstance& instance);

// Full-scan variant, one marginal evaluation per feasible element per
// iteration. Same tie rule, same output; kept as the reference the lazy
// implementation is checked against.
GreedyResult greedy_place_naive(const ProblemInstance& instance);

}  // namespace hcache
