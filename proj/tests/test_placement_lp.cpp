#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "hcache/delay.hpp"
#include "hcache/oracle.hpp"
#include "hcache/placement_lp.hpp"
#include "test_util.hpp"

using namespace hcache;
using namespace hcache::testing;

TEST_CASE("coverage LP: single file, helper and user") {
    auto instance = make_instance(1, 1, {1.0}, 1, 1, {{1, 0, 1.0}}, {2.0});
    auto sc = make_special_case(instance);
    auto lp = build_coverage_lp(sc);
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.values[coverage_lp_rho_index(instance, 0, 1)] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("coverage LP: one helper, one slot, two files picks the popular one") {
    auto instance = make_instance(2, 1, {0.6, 0.4}, 1, 1, {{1, 0, 1.0}}, {2.0});
    auto sc = make_special_case(instance);
    auto sol = solve_lp(build_coverage_lp(sc));
    REQUIRE(sol.status == LpStatus::kOptimal);
    // wtilde = 1, capacity 1: best mass assignment is all of file 1.
    CHECK(sol.objective_value == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("coverage LP variable count is (U + H) * F") {
    // the documented desk-scale shape: F=50, H=8, U=30 -> 1900 variables
    auto instance = make_instance(50, 10, zipf_popularity(50, 0.8).probs, 8, 30,
                                  {{1, 0, 0.25}, {2, 1, 0.25}}, std::vector<double>(30, 2.0));
    auto sc = make_special_case(instance);
    auto lp = build_coverage_lp(sc);
    CHECK(lp.variable_count() == (30 + 8) * 50);
}

TEST_CASE("coverage LP dominates the integral optimum") {
    TestRand rand(11002);
    RandomInstanceOptions options;
    options.special_case = true;
    for (int trial = 0; trial < 100; ++trial) {
        auto instance = random_instance(rand, options);
        auto sc = make_special_case(instance);
        auto sol = solve_lp(build_coverage_lp(sc));
        REQUIRE(sol.status == LpStatus::kOptimal);
        auto oracle = exact_uncoded(instance);
        CHECK(sol.objective_value >= oracle.optimal_value - 1e-7);
    }
}

TEST_CASE("coverage LP matches a fine grid search on a small toy") {
    // Two files, two helpers, one user seeing both; M = 1.
    auto instance = make_instance(2, 1, {0.7, 0.3}, 2, 1, {{1, 0, 1.0}, {2, 0, 1.0}}, {2.0});
    auto sc = make_special_case(instance);
    auto sol = solve_lp(build_coverage_lp(sc));
    REQUIRE(sol.status == LpStatus::kOptimal);

    // Exhaustive 0.05-grid over the four rho entries with column sums <= 1.
    double best = 0.0;
    const double step = 0.05;
    const int levels = 21;
    for (int a = 0; a < levels; ++a) {
        for (int b = 0; b < levels; ++b) {
            if (a + b > 20) continue;
            for (int c = 0; c < levels; ++c) {
                for (int d = 0; d < levels; ++d) {
                    if (c + d > 20) continue;
                    double rho_f1 = a * step + c * step;  // mass of file 1 at the user
                    double rho_f2 = b * step + d * step;
                    double value = sc.wtilde[0] * (0.7 * std::min(1.0, rho_f1) +
                                                   0.3 * std::min(1.0, rho_f2));
                    best = std::max(best, value);
                }
            }
        }
    }
    CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-3));
}

TEST_CASE("coded LP: zero cache means BS delays") {
    auto instance = make_instance(2, 0, {0.6, 0.4}, 1, 2, {{1, 0, 0.5}, {1, 1, 0.5}}, {2.0, 1.5});
    auto result = solve_coded(instance);
    REQUIRE(result.status == LpStatus::kOptimal);
    CHECK(result.objective == doctest::Approx(3.5).epsilon(1e-9));
}

TEST_CASE("coded LP: everything cached at the best helpers") {
    auto instance = make_instance(2, 2, {0.6, 0.4}, 2, 2,
                                  {{1, 0, 0.5}, {2, 0, 0.3}, {1, 1, 0.5}}, {2.0, 2.0});
    auto result = solve_coded(instance);
    REQUIRE(result.status == LpStatus::kOptimal);
    // user 1: best helper 2 at 0.3; user 2: helper 1 at 0.5
    CHECK(result.objective == doctest::Approx(0.3 + 0.5).epsilon(1e-7));
}

TEST_CASE("coded optimum never exceeds the best binary placement") {
    TestRand rand(11003);
    for (int trial = 0; trial < 100; ++trial) {
        auto instance = random_instance(rand);
        auto coded = solve_coded(instance);
        REQUIRE(coded.status == LpStatus::kOptimal);
        auto oracle = exact_uncoded(instance);
        double best_binary = bs_only_total_delay(instance) - oracle.optimal_value;
        CHECK(coded.objective <= best_binary + 1e-6);
        CHECK(coded.lp_objective <= best_binary + 1e-6);
    }
}

TEST_CASE("coverage LP and coded LP are two views of one optimum on special cases") {
    TestRand rand(11004);
    RandomInstanceOptions options;
    options.special_case = true;
    for (int trial = 0; trial < 60; ++trial) {
        auto instance = random_instance(rand, options);
        auto sc = make_special_case(instance);
        auto coverage = solve_lp(build_coverage_lp(sc));
        REQUIRE(coverage.status == LpStatus::kOptimal);
        auto coded = solve_coded(instance);
        REQUIRE(coded.status == LpStatus::kOptimal);
        CHECK(coverage.objective_value ==
              doctest::Approx(bs_only_total_delay(instance) - coded.lp_objective).epsilon(1e-6));
    }
}

TEST_CASE("z variables are tight at the optimum") {
    TestRand rand(11005);
    for (int trial = 0; trial < 50; ++trial) {
        auto instance = random_instance(rand);
        auto lp = build_coded_lp(instance);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        const int F = instance.file_count();
        const int H = instance.helper_count();
        CodedPlacement rho(F, H);
        for (int f = 0; f < F; ++f) {
            for (int h = 1; h <= H; ++h) {
                rho.set(f, h, std::clamp(sol.values[coded_lp_rho_index(instance, f, h)], 0.0, 1.0));
            }
        }
        for (int u = 0; u < instance.user_count(); ++u) {
            for (int f = 0; f < F; ++f) {
                double z = sol.values[F * H + u * F + f];
                double direct = coded_user_file_delay(instance, rho, u, f);
                CHECK(z == doctest::Approx(direct).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("solve_coded recomputes the LP objective within 1e-6") {
    TestRand rand(11006);
    for (int trial = 0; trial < 50; ++trial) {
        auto instance = random_instance(rand);
        auto result = solve_coded(instance);
        REQUIRE(result.status == LpStatus::kOptimal);
        CHECK(result.objective == doctest::Approx(result.lp_objective).epsilon(1e-6));
        CHECK(result.placement.feasible(instance.cache_size()));
    }
}

TEST_CASE("decomposition backend agrees with the direct simplex") {
    TestRand rand(11007);
    RandomInstanceOptions options;
    options.max_files = 8;
    options.max_helpers = 4;
    options.max_users = 8;
    options.max_cache = 3;
    for (int trial = 0; trial < 40; ++trial) {
        auto instance = random_instance(rand, options);
        CodedSolveOptions direct;
        direct.backend = CodedBackend::kSimplex;
        CodedSolveOptions decomposed;
        decomposed.backend = CodedBackend::kDecomposition;
        auto a = solve_coded(instance, direct);
        auto b = solve_coded(instance, decomposed);
        REQUIRE(a.status == LpStatus::kOptimal);
        REQUIRE(b.status == LpStatus::kOptimal);
        CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-6));
        CHECK(b.bound_gap <= 1e-5 * std::max(1.0, std::abs(b.objective)));
    }
}

TEST_CASE("decomposition handles a medium instance out of simplex reach") {
    // Big enough that the auto heuristic picks the decomposition path.
    TestRand rand(11008);
    RandomInstanceOptions options;
    options.max_files = 40;
    options.max_helpers = 6;
    options.max_users = 20;
    options.max_cache = 6;
    options.edge_probability = 0.3;
    auto instance = random_instance(rand, options);
    auto result = solve_coded(instance);
    REQUIRE(result.status == LpStatus::kOptimal);
    CHECK(result.placement.feasible(instance.cache_size()));
    CHECK(result.objective <= bs_only_total_delay(instance) + 1e-9);
}

TEST_CASE("total_delay_for_allocation matches the per-file evaluation") {
    TestRand rand(11009);
    for (int trial = 0; trial < 40; ++trial) {
        auto instance = random_instance(rand);
        std::vector<double> row(instance.helper_count());
        for (double& v : row) v = rand.uniform();
        CodedPlacement rho(instance.file_count(), instance.helper_count());
        for (int h = 1; h <= instance.helper_count(); ++h) rho.set(0, h, row[h - 1]);
        double expected = 0.0;
        for (int u = 0; u < instance.user_count(); ++u) {
            expected += coded_user_file_delay(instance, rho, u, 0);
        }
        CHECK(total_delay_for_allocation(instance, row) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}
