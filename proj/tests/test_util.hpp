#pragma once

// Shared helpers for the test suites: hand-rolled instance builders, seeded
// random instance generation, and the literal product-form delay evaluation
// used as the oracle for the first-hit scan.

#include <tuple>
#include <vector>

#include "hcache/delay.hpp"
#include "hcache/model.hpp"
#include "hcache/rng.hpp"

namespace hcache::testing {

struct TestRand {
    CounterRng rng;
    std::uint64_t counter = 0;

    explicit TestRand(std::uint64_t seed) : rng(seed) {}
    double uniform() { return rng.uniform(rng_stream::kTestInstance, counter++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int below(int n) { return static_cast<int>(uniform() * n) % n; }
};

// Instance from explicit parts; non-edges get the sentinel automatically.
inline ProblemInstance make_instance(int file_count, int cache_size, std::vector<double> probs,
                                     int helper_count, int user_count,
                                     std::vector<std::tuple<int, int, double>> edge_delays,
                                     std::vector<double> bs_delays) {
    std::vector<std::pair<int, int>> edges;
    for (auto& [h, u, w] : edge_delays) edges.push_back({h, u});
    ConnectivityGraph graph(helper_count, user_count, edges);
    DelayMatrix delays(helper_count, user_count);
    for (int u = 0; u < user_count; ++u) delays.at(kBaseStation, u) = bs_delays[u];
    delays.omega_infinity = omega_infinity_for(delays);
    for (int h = 1; h <= helper_count; ++h) {
        for (int u = 0; u < user_count; ++u) delays.at(h, u) = delays.omega_infinity;
    }
    for (auto& [h, u, w] : edge_delays) delays.at(h, u) = w;
    return ProblemInstance(FileLibrary(file_count, 1), popularity_from_vector(std::move(probs)),
                           std::move(graph), std::move(delays), cache_size);
}

struct RandomInstanceOptions {
    int max_files = 6;
    int max_helpers = 3;
    int max_users = 6;
    int max_cache = 2;
    bool special_case = false;  // uniform helper delay below all BS delays
    double edge_probability = 0.5;
};

inline ProblemInstance random_instance(TestRand& rand, const RandomInstanceOptions& options = {}) {
    const int F = 1 + rand.below(options.max_files);
    const int H = 1 + rand.below(options.max_helpers);
    const int U = 1 + rand.below(options.max_users);
    const int M = 1 + rand.below(options.max_cache);

    std::vector<double> weights(F);
    double sum = 0.0;
    for (double& w : weights) {
        w = 0.05 + rand.uniform();
        sum += w;
    }
    for (double& w : weights) w /= sum;

    std::vector<std::tuple<int, int, double>> edges;
    std::vector<double> bs_delays(U);
    const double omega1 = 0.25;
    for (int u = 0; u < U; ++u) {
        bs_delays[u] = options.special_case ? rand.uniform(0.5, 2.5) : rand.uniform(1.0, 2.0);
    }
    for (int h = 1; h <= H; ++h) {
        for (int u = 0; u < U; ++u) {
            if (rand.uniform() < options.edge_probability) {
                double w = options.special_case ? omega1 : rand.uniform(0.0, bs_delays[u]);
                edges.push_back({h, u, w});
            }
        }
    }
    return make_instance(F, M, std::move(weights), H, U, std::move(edges), std::move(bs_delays));
}

// Literal expansion of the per-user average delay: sum over sorted positions
// of the position delay times the probability mass served there, with empty
// products equal to one.
inline double product_form_user_delay(const ProblemInstance& instance, const UncodedPlacement& x,
                                      int u) {
    const auto& order = instance.order(u);
    const auto& probs = instance.popularity().probs;
    const int L = order.size();
    double total = 0.0;
    for (int j = 0; j + 1 < L; ++j) {
        double mass = 0.0;
        for (int f = 0; f < instance.file_count(); ++f) {
            double prod = 1.0;
            for (int i = 0; i < j; ++i) prod *= 1.0 - (x.at(f, order.helper[i]) ? 1.0 : 0.0);
            mass += prod * (x.at(f, order.helper[j]) ? 1.0 : 0.0) * probs[f];
        }
        total += order.delay[j] * mass;
    }
    double miss = 0.0;
    for (int f = 0; f < instance.file_count(); ++f) {
        double prod = 1.0;
        for (int i = 0; i + 1 < L; ++i) prod *= 1.0 - (x.at(f, order.helper[i]) ? 1.0 : 0.0);
        miss += prod * probs[f];
    }
    total += order.delay[L - 1] * miss;
    return total;
}

inline UncodedPlacement random_feasible_placement(TestRand& rand, const ProblemInstance& instance,
                                                  double fill = 0.5) {
    UncodedPlacement x(instance.file_count(), instance.helper_count());
    for (int h = 1; h <= instance.helper_count(); ++h) {
        int budget = instance.cache_size();
        for (int f = 0; f < instance.file_count() && budget > 0; ++f) {
            if (rand.uniform() < fill) {
                x.set(f, h, true);
                --budget;
            }
        }
    }
    return x;
}

inline CodedPlacement random_feasible_coded(TestRand& rand, const ProblemInstance& instance) {
    CodedPlacement rho(instance.file_count(), instance.helper_count());
    for (int h = 1; h <= instance.helper_count(); ++h) {
        double budget = instance.cache_size();
        for (int f = 0; f < instance.file_count(); ++f) {
            double v = rand.uniform() * std::min(1.0, budget);
            rho.set(f, h, v);
            budget -= v;
            if (budget <= 0.0) break;
        }
    }
    return rho;
}

}  // namespace hcache::testing
