#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hcache/model.hpp"

namespace hcache {

struct OracleBudgetError : std::runtime_error {
    explicit OracleBudgetError(const std::string& what, double size)
        : std::runtime_error(what), enumeration_size(size) {}
    double enumeration_size;
};

struct ExactResult {
    double optimal_value = 0.0;
    std::vector<UncodedPlacement> optimal_placements;  // up to 16
    std::uint64_t maximizer_count = 0;
    std::uint64_t enumerated = 0;
};

// Number of placements exact_uncoded would enumerate (product over helpers of
// subsets of positive-popularity files of size <= M).
double exact_enumeration_size(const ProblemInstance& instance);

// Exhaustive maximization of the delay-savings objective over all feasible
// binary placements. Files with zero popularity are skipped; refuses when the
// enumeration exceeds `budget` placements.
ExactResult exact_uncoded(const ProblemInstance& instance, double budget = 1e7);

// Best (lowest) coded objective over the grid {0, step, 2*step, ...} ^ (F*H)
// restricted to feasible column sums. One-sided oracle: the coded LP optimum
// can only be lower.
double exact_coded_grid(const ProblemInstance& instance, double step, double budget = 1e7);

// Bipartite cover input for the reduction: ground elements 0..ground_size-1
// (the users) and one neighborhood per covering set (the helpers).
struct BipartiteCover {
    int ground_size = 0;
    std::vector<std::vector<int>> neighborhoods;
};

struct ReductionInstance {
    ProblemInstance instance;
    double threshold;  // placement value reaching this certifies a double cover
};

// Builds the 2-library placement instance whose optimal value reaches the
// threshold exactly when the cover graph admits two disjoint covers:
// two files with probabilities (1/(1+eps), eps/(1+eps)), unit cache size,
// unit delay advantage for every user.
ReductionInstance build_hlp_from_2dsc(const BipartiteCover& cover, double epsilon = 0.5);

// Exhaustive check for two disjoint covering subsets whose union is all
// neighborhoods. Requires at most 20 sets.
bool brute_2dsc(const BipartiteCover& cover);

}  // namespace hcache
