#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "hcache/model.hpp"
#include "test_util.hpp"

using namespace hcache;
using hcache::testing::make_instance;

TEST_CASE("zipf popularity closed forms") {
    auto uniform = zipf_popularity(2, 0.0);
    CHECK(uniform.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(uniform.probs[1] == doctest::Approx(0.5).epsilon(1e-12));

    auto harmonic = zipf_popularity(2, 1.0);
    CHECK(harmonic.probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(harmonic.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(zipf_popularity(2, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(zipf_popularity(0, 1.0), std::invalid_argument);
}

TEST_CASE("zipf popularity normalizes and is nonincreasing across scales") {
    for (double gamma : {0.0, 0.56, 1.0, 3.0}) {
        for (int f_count : {1, 10, 1000, 1000000}) {
            auto p = zipf_popularity(f_count, gamma);
            CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
            for (int f = 0; f + 1 < f_count; ++f) {
                CHECK(p.probs[f] >= p.probs[f + 1]);
            }
        }
    }
}

TEST_CASE("explicit popularity renormalizes small deviations and rejects large ones") {
    auto p = popularity_from_vector({0.5, 0.5 + 5e-7});
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(popularity_from_vector({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(popularity_from_vector({1.1, -0.1}), std::invalid_argument);
}

TEST_CASE("helper order sorts by delay with BS forced last") {
    SUBCASE("BS-only user") {
        auto instance = make_instance(1, 1, {1.0}, 1, 1, {}, {2.0});
        const auto& order = instance.order(0);
        REQUIRE(order.size() == 1);
        CHECK(order.helper[0] == kBaseStation);
        CHECK(order.delay[0] == 2.0);
    }
    SUBCASE("sorted by delay") {
        auto instance =
            make_instance(1, 1, {1.0}, 2, 1, {{1, 0, 0.5}, {2, 0, 0.3}}, {2.0});
        const auto& order = instance.order(0);
        REQUIRE(order.size() == 3);
        CHECK(order.helper == std::vector<int>{2, 1, 0});
    }
    SUBCASE("delay ties break by helper index, BS always last") {
        auto instance =
            make_instance(1, 1, {1.0}, 2, 1, {{1, 0, 0.5}, {2, 0, 0.5}}, {2.0});
        const auto& order = instance.order(0);
        CHECK(order.helper == std::vector<int>{1, 2, 0});

        // Even a helper tying the BS delay sorts before it.
        auto tied = make_instance(1, 1, {1.0}, 1, 1, {{1, 0, 2.0}}, {2.0});
        CHECK(tied.order(0).helper == std::vector<int>{1, 0});
    }
}

TEST_CASE("helper order delays are monotone on random instances") {
    hcache::testing::TestRand rand(20240101);
    for (int trial = 0; trial < 50; ++trial) {
        auto instance = hcache::testing::random_instance(rand);
        for (int u = 0; u < instance.user_count(); ++u) {
            const auto& order = instance.order(u);
            CHECK(order.helper.back() == kBaseStation);
            for (int j = 0; j + 1 < order.size(); ++j) {
                CHECK(order.delay[j] <= order.delay[j + 1]);
            }
        }
    }
}

TEST_CASE("cache size larger than the library truncates with a warning") {
    auto instance = make_instance(3, 5, {0.5, 0.3, 0.2}, 1, 1, {{1, 0, 0.5}}, {2.0});
    CHECK(instance.cache_size() == 3);
    REQUIRE(instance.warnings().size() == 1);
}

TEST_CASE("validate flags nothing on a well-formed instance") {
    auto instance = make_instance(2, 1, {0.6, 0.4}, 2, 2, {{1, 0, 0.5}, {2, 1, 0.25}}, {2.0, 1.5});
    CHECK(validate(instance).empty());
}

TEST_CASE("validate names BS delay dominance violations") {
    auto instance = make_instance(1, 1, {1.0}, 1, 1, {{1, 0, 3.0}}, {2.0});
    auto violations = validate(instance);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations) found |= v.invariant == "BS delay dominance";
    CHECK(found);
}

TEST_CASE("validate names popularity normalization violations") {
    Popularity bad;
    bad.probs = {0.5, 0.4};  // sums to 0.9
    ConnectivityGraph graph(1, 1, {{1, 0}});
    DelayMatrix delays(1, 1);
    delays.at(0, 0) = 2.0;
    delays.at(1, 0) = 0.5;
    delays.omega_infinity = omega_infinity_for(delays);
    ProblemInstance instance(FileLibrary(2, 1), bad, graph, delays, 1);
    auto violations = validate(instance);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations) found |= v.invariant == "popularity normalization";
    CHECK(found);
}

TEST_CASE("graph adjacency is consistent both ways") {
    ConnectivityGraph graph(3, 4, {{1, 0}, {1, 2}, {2, 2}, {3, 3}});
    CHECK(graph.edge_count() == 4);
    CHECK(graph.users_of(0).size() == 4);  // base station reaches everyone
    for (int h = 1; h <= 3; ++h) {
        for (int u : graph.users_of(h)) {
            bool found = false;
            for (int hh : graph.helpers_of(u)) found |= hh == h;
            CHECK(found);
            CHECK(graph.has_edge(h, u));
        }
    }
    CHECK_FALSE(graph.has_edge(2, 0));
    CHECK(graph.has_edge(kBaseStation, 3));
}

TEST_CASE("placement column sums and feasibility") {
    UncodedPlacement x(3, 2);
    x.set(0, 1, true);
    x.set(1, 1, true);
    CHECK(x.column_sum(1) == 2);
    CHECK(x.column_sum(2) == 0);
    CHECK(x.feasible(2));
    CHECK_FALSE(x.feasible(1));
    CHECK(x.placed_count() == 2);

    CodedPlacement rho(3, 2);
    rho.set(0, 1, 0.7);
    rho.set(1, 1, 0.3 + 5e-8);  // inside the column slack
    CHECK(rho.feasible(1));
    rho.set(2, 1, 0.5);
    CHECK_FALSE(rho.feasible(1));
}

TEST_CASE("instance max degree is the largest non-BS neighborhood") {
    auto instance = make_instance(2, 1, {0.6, 0.4}, 3, 2,
                                  {{1, 0, 0.5}, {2, 0, 0.5}, {3, 0, 0.5}, {1, 1, 0.5}},
                                  {2.0, 2.0});
    CHECK(instance.max_degree() == 3);
}
