#include "hcache/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hcache/delay.hpp"

namespace hcache {

namespace {

std::vector<int> positive_files(const ProblemInstance& instance) {
    std::vector<int> files;
    for (int f = 0; f < instance.file_count(); ++f) {
        if (instance.popularity().probs[f] > 0.0) files.push_back(f);
    }
    return files;
}

double subsets_up_to(int n, int k) {
    double total = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= std::min(n, k); ++i) {
        total += binom;
        binom = binom * (n - i) / (i + 1);
    }
    return total;
}

}  // namespace

double exact_enumeration_size(const ProblemInstance& instance) {
    const int fp = static_cast<int>(positive_files(instance).size());
    double per_helper = subsets_up_to(fp, instance.cache_size());
    double total = 1.0;
    for (int h = 1; h <= instance.helper_count(); ++h) total *= per_helper;
    return total;
}

ExactResult exact_uncoded(const ProblemInstance& instance, double budget) {
    double size = exact_enumeration_size(instance);
    if (size > budget) {
        throw OracleBudgetError("exact_uncoded: enumeration size " + std::to_string(size) +
                                    " exceeds budget " + std::to_string(budget),
                                size);
    }

    const std::vector<int> files = positive_files(instance);
    const int H = instance.helper_count();
    const int M = instance.cache_size();

    ExactResult result;
    result.optimal_value = -std::numeric_limits<double>::infinity();
    UncodedPlacement placement(instance.file_count(), H);

    auto consider = [&](const UncodedPlacement& x) {
        ++result.enumerated;
        double value = uncoded_objective(instance, x);
        if (value > result.optimal_value + 1e-12) {
            result.optimal_value = value;
            result.maximizer_count = 0;
            result.optimal_placements.clear();
        }
        if (value >= result.optimal_value - 1e-12) {
            ++result.maximizer_count;
            if (result.optimal_placements.size() < 16) result.optimal_placements.push_back(x);
        }
    };

    // Per helper, walk subsets of size <= M of the positive files; helpers
    // nest recursively.
    std::vector<int> chosen;
    auto enumerate_helper = [&](auto&& self, int h) -> void {
        if (h > H) {
            consider(placement);
            return;
        }
        auto subsets = [&](auto&& subset_self, int from, int remaining) -> void {
            self(self, h + 1);  // current subset complete as-is
            if (remaining == 0) return;
            for (std::size_t i = from; i < files.size(); ++i) {
                placement.set(files[i], h, true);
                subset_self(subset_self, static_cast<int>(i) + 1, remaining - 1);
                placement.set(files[i], h, false);
            }
        };
        subsets(subsets, 0, M);
    };
    enumerate_helper(enumerate_helper, 1);
    return result;
}

double exact_coded_grid(const ProblemInstance& instance, double step, double budget) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw std::invalid_argument("exact_coded_grid: step must be in (0, 1]");
    }
    const int F = instance.file_count();
    const int H = instance.helper_count();
    const int levels = static_cast<int>(std::ceil(1.0 / step - 1e-9)) + 1;
    double size = std::pow(static_cast<double>(levels), static_cast<double>(F) * H);
    if (size > budget) {
        throw OracleBudgetError("exact_coded_grid: grid size " + std::to_string(size) +
                                    " exceeds budget " + std::to_string(budget),
                                size);
    }

    CodedPlacement rho(F, H);
    double best = bs_only_total_delay(instance) + 1.0;
    std::vector<double> column_sum(H + 1, 0.0);

    auto walk = [&](auto&& self, int cell) -> void {
        if (cell == F * H) {
            best = std::min(best, coded_objective(instance, rho));
            return;
        }
        const int f = cell / H;
        const int h = cell % H + 1;
        for (int level = 0; level < levels; ++level) {
            double v = std::min(1.0, level * step);
            if (column_sum[h] + v > instance.cache_size() + 1e-12) break;
            rho.set(f, h, v);
            column_sum[h] += v;
            self(self, cell + 1);
            column_sum[h] -= v;
            rho.set(f, h, 0.0);
            if (v == 1.0) break;  // levels may overshoot 1 when step divides unevenly
        }
    };
    walk(walk, 0);
    return best;
}

ReductionInstance build_hlp_from_2dsc(const BipartiteCover& cover, double epsilon) {
    if (cover.ground_size < 1) throw std::invalid_argument("reduction: empty ground set");
    if (cover.neighborhoods.empty()) throw std::invalid_argument("reduction: no covering sets");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("reduction: epsilon must be in (0, 1)");
    }
    const int H = static_cast<int>(cover.neighborhoods.size());
    const int U = cover.ground_size;

    std::vector<std::pair<int, int>> edges;
    for (int b = 0; b < H; ++b) {
        for (int a : cover.neighborhoods[b]) {
            if (a < 0 || a >= U) throw std::invalid_argument("reduction: element out of range");
            edges.push_back({b + 1, a});
        }
    }
    ConnectivityGraph graph(H, U, std::move(edges));

    DelayMatrix delays(H, U);
    const double omega1 = 1.0;
    for (int u = 0; u < U; ++u) delays.at(kBaseStation, u) = omega1 + 1.0;  // unit advantage
    delays.omega_infinity = omega_infinity_for(delays);
    for (int h = 1; h <= H; ++h) {
        for (int u = 0; u < U; ++u) {
            delays.at(h, u) = graph.has_edge(h, u) ? omega1 : delays.omega_infinity;
        }
    }

    Popularity popularity;
    popularity.probs = {1.0 / (1.0 + epsilon), epsilon / (1.0 + epsilon)};

    ProblemInstance instance(FileLibrary(2, 1), popularity, std::move(graph), std::move(delays),
                             /*cache_size=*/1);
    return {std::move(instance), static_cast<double>(U)};
}

bool brute_2dsc(const BipartiteCover& cover) {
    const int n = static_cast<int>(cover.neighborhoods.size());
    if (n > 20) throw std::invalid_argument("brute_2dsc: more than 20 sets");
    const int ground = cover.ground_size;

    std::vector<std::uint32_t> masks;  // ground_size <= 32 enforced below
    if (ground > 32) throw std::invalid_argument("brute_2dsc: ground set larger than 32");
    for (const auto& nb : cover.neighborhoods) {
        std::uint32_t m = 0;
        for (int a : nb) {
            if (a < 0 || a >= ground) throw std::invalid_argument("brute_2dsc: element out of range");
            m |= 1u << a;
        }
        masks.push_back(m);
    }
    const std::uint32_t all = ground == 32 ? 0xffffffffu : (1u << ground) - 1;
    for (std::uint64_t split = 0; split < (1ull << n); ++split) {
        std::uint32_t c1 = 0, c2 = 0;
        for (int b = 0; b < n; ++b) {
            if (split >> b & 1) c1 |= masks[b];
            else c2 |= masks[b];
        }
        if (c1 == all && c2 == all) return true;
    }
    return false;
}

}  // namespace hcache
