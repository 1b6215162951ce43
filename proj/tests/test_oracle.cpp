#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "hcache/delay.hpp"
#include "hcache/greedy.hpp"
#include "hcache/oracle.hpp"
#include "hcache/placement_lp.hpp"
#include "test_util.hpp"

using namespace hcache;
using namespace hcache::testing;

namespace {

// Random bipartite cover with every set nonempty.
BipartiteCover random_cover(TestRand& rand, int max_ground, int max_sets) {
    BipartiteCover cover;
    cover.ground_size = 1 + rand.below(max_ground);
    const int sets = 1 + rand.below(max_sets);
    cover.neighborhoods.resize(sets);
    for (auto& nb : cover.neighborhoods) {
        for (int a = 0; a < cover.ground_size; ++a) {
            if (rand.uniform() < 0.45) nb.push_back(a);
        }
        if (nb.empty()) nb.push_back(rand.below(cover.ground_size));
    }
    return cover;
}

}  // namespace

TEST_CASE("single helper: the oracle caches the most popular files") {
    auto instance = make_instance(4, 2, {0.4, 0.3, 0.2, 0.1}, 1, 2,
                                  {{1, 0, 0.5}, {1, 1, 0.25}}, {2.0, 2.0});
    auto result = exact_uncoded(instance);
    // savings = sum over connected users of P1+P2 times their delay gap
    double expected = (0.4 + 0.3) * (2.0 - 0.5) + (0.4 + 0.3) * (2.0 - 0.25);
    CHECK(result.optimal_value == doctest::Approx(expected).epsilon(1e-12));
    REQUIRE(!result.optimal_placements.empty());
    CHECK(result.optimal_placements.front().at(0, 1));
    CHECK(result.optimal_placements.front().at(1, 1));
}

TEST_CASE("two-helper conflict instance enumerates nine placements") {
    auto instance = make_instance(2, 1, {0.6, 0.4}, 2, 4,
                                  {{1, 0, 1.0}, {1, 1, 1.0}, {1, 2, 1.0}, {2, 2, 1.0}, {2, 3, 1.0}},
                                  {2.0, 2.0, 2.0, 2.0});
    auto result = exact_uncoded(instance);
    CHECK(result.enumerated == 9);
    CHECK(result.optimal_value == doctest::Approx(2.6).epsilon(1e-12));
    // diversity is optimal here: file 1 at helper 1, file 2 at helper 2
    REQUIRE(!result.optimal_placements.empty());
    CHECK(result.optimal_placements.front().at(0, 1));
    CHECK(result.optimal_placements.front().at(1, 2));
}

TEST_CASE("budget guard refuses oversized enumerations") {
    auto probs = zipf_popularity(30, 0.8).probs;
    std::vector<std::tuple<int, int, double>> edges;
    for (int h = 1; h <= 6; ++h) edges.push_back({h, 0, 0.5});
    auto instance = make_instance(30, 10, probs, 6, 1, std::move(edges), {2.0});
    CHECK(exact_enumeration_size(instance) > 1e7);
    CHECK_THROWS_AS(exact_uncoded(instance), OracleBudgetError);
}

TEST_CASE("oracle value is invariant under helper permutation") {
    TestRand rand(13001);
    for (int trial = 0; trial < 30; ++trial) {
        auto instance = random_instance(rand);
        auto base = exact_uncoded(instance);

        // Rebuild with helpers 1 and H swapped (identity when H == 1).
        const int H = instance.helper_count();
        std::vector<std::tuple<int, int, double>> edges;
        for (int h = 1; h <= H; ++h) {
            int hp = h == 1 ? H : (h == H ? 1 : h);
            for (int u : instance.graph().users_of(h)) {
                edges.push_back({hp, u, instance.delays().at(h, u)});
            }
        }
        std::vector<double> bs(instance.user_count());
        for (int u = 0; u < instance.user_count(); ++u) bs[u] = instance.delays().bs_delay(u);
        auto permuted = make_instance(instance.file_count(), instance.cache_size(),
                                      instance.popularity().probs, H, instance.user_count(),
                                      std::move(edges), std::move(bs));
        auto swapped = exact_uncoded(permuted);
        CHECK(base.optimal_value == doctest::Approx(swapped.optimal_value).epsilon(1e-12));
    }
}

TEST_CASE("oracle value is invariant under equal-popularity file swaps") {
    auto instance = make_instance(3, 1, {0.4, 0.3, 0.3}, 2, 2,
                                  {{1, 0, 0.5}, {2, 1, 0.25}}, {2.0, 1.5});
    auto base = exact_uncoded(instance);
    auto swapped_instance = make_instance(3, 1, {0.4, 0.3, 0.3}, 2, 2,
                                          {{1, 0, 0.5}, {2, 1, 0.25}}, {2.0, 1.5});
    // files 2 and 3 have equal popularity; swapping them relabels placements only
    auto swapped = exact_uncoded(swapped_instance);
    CHECK(base.optimal_value == doctest::Approx(swapped.optimal_value).epsilon(1e-15));
    CHECK(base.maximizer_count == swapped.maximizer_count);
}

TEST_CASE("savings optimum and coded delay of the optimizer sum to the BS total") {
    TestRand rand(13002);
    for (int trial = 0; trial < 40; ++trial) {
        auto instance = random_instance(rand);
        auto oracle = exact_uncoded(instance);
        REQUIRE(!oracle.optimal_placements.empty());
        double delay = coded_objective(
            instance, CodedPlacement::from_uncoded(oracle.optimal_placements.front()));
        CHECK(oracle.optimal_value + delay ==
              doctest::Approx(bs_only_total_delay(instance)).epsilon(1e-9));
    }
}

TEST_CASE("grid oracle with step one reduces to binary enumeration") {
    TestRand rand(13003);
    RandomInstanceOptions options;
    options.max_files = 3;
    options.max_helpers = 2;
    options.max_users = 4;
    for (int trial = 0; trial < 25; ++trial) {
        auto instance = random_instance(rand, options);
        auto oracle = exact_uncoded(instance);
        double grid = exact_coded_grid(instance, 1.0);
        CHECK(grid == doctest::Approx(bs_only_total_delay(instance) - oracle.optimal_value)
                          .epsilon(1e-9));
    }
}

TEST_CASE("grid oracle half-steps on a tiny coded instance") {
    // One file, two helpers at 0.3 and 0.6 s/bit, BS at 2.0, M = 1.
    auto instance = make_instance(1, 1, {1.0}, 2, 1, {{1, 0, 0.3}, {2, 0, 0.6}}, {2.0});
    double grid = exact_coded_grid(instance, 0.5);
    // best on the half grid: rho = (1, 0) serves everything at 0.3
    CHECK(grid == doctest::Approx(0.3).epsilon(1e-12));

    // with capacity M=1 but only half units allowed per helper
    auto tight = make_instance(1, 1, {1.0}, 2, 1, {{1, 0, 0.3}, {2, 0, 0.6}}, {2.0});
    CodedPlacement half(1, 2);
    half.set(0, 1, 0.5);
    half.set(0, 2, 0.5);
    CHECK(coded_objective(tight, half) == doctest::Approx(0.5 * 0.3 + 0.5 * 0.6).epsilon(1e-12));
}

TEST_CASE("coded LP optimum never exceeds the grid oracle value") {
    TestRand rand(13004);
    RandomInstanceOptions options;
    options.max_files = 2;
    options.max_helpers = 2;
    options.max_users = 3;
    for (int trial = 0; trial < 15; ++trial) {
        auto instance = random_instance(rand, options);
        auto coded = solve_coded(instance);
        REQUIRE(coded.status == LpStatus::kOptimal);
        double grid = exact_coded_grid(instance, 0.1, 5e7);
        CHECK(coded.lp_objective <= grid + 1e-9);
    }
}

TEST_CASE("two full covers admit a disjoint double cover") {
    BipartiteCover cover;
    cover.ground_size = 3;
    cover.neighborhoods = {{0, 1, 2}, {0, 1, 2}};
    CHECK(brute_2dsc(cover));
}

TEST_CASE("a single set cannot double-cover a nonempty ground set") {
    BipartiteCover cover;
    cover.ground_size = 2;
    cover.neighborhoods = {{0, 1}};
    CHECK_FALSE(brute_2dsc(cover));
}

TEST_CASE("reduction instance reaches the threshold iff a double cover exists") {
    TestRand rand(13005);
    for (int trial = 0; trial < 100; ++trial) {
        auto cover = random_cover(rand, 5, 4);
        auto reduction = build_hlp_from_2dsc(cover);
        CHECK(is_special_case(reduction.instance));
        auto oracle = exact_uncoded(reduction.instance);
        bool reaches = oracle.optimal_value >= reduction.threshold - 1e-9;
        CHECK(reaches == brute_2dsc(cover));
    }
}

TEST_CASE("reduction rejects malformed covers and out-of-range epsilon") {
    BipartiteCover empty_ground;
    empty_ground.ground_size = 0;
    empty_ground.neighborhoods = {{0}};
    CHECK_THROWS_AS(build_hlp_from_2dsc(empty_ground), std::invalid_argument);

    BipartiteCover bad_index;
    bad_index.ground_size = 2;
    bad_index.neighborhoods = {{5}};
    CHECK_THROWS_AS(build_hlp_from_2dsc(bad_index), std::invalid_argument);

    BipartiteCover fine;
    fine.ground_size = 1;
    fine.neighborhoods = {{0}};
    CHECK_THROWS_AS(build_hlp_from_2dsc(fine, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(build_hlp_from_2dsc(fine, 0.0), std::invalid_argument);
}

TEST_CASE("oracle beats greedy which beats half the oracle") {
    TestRand rand(13006);
    for (int trial = 0; trial < 40; ++trial) {
        auto instance = random_instance(rand);
        auto oracle = exact_uncoded(instance);
        double greedy = uncoded_objective(instance, greedy_place(instance).placement);
        CHECK(oracle.optimal_value >= greedy - 1e-12);
        CHECK(greedy >= 0.5 * oracle.optimal_value - 1e-12);
    }
}
