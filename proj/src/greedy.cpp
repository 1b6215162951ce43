#include "hcache/greedy.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "hcache/delay.hpp"

namespace hcache {

namespace {

// Delay at which user u currently obtains file f (lowest-delay holder, BS
// fallback). The greedy keeps this as a U x F table updated per placement.
double current_source_delay(const ProblemInstance& instance, const UncodedPlacement& x,
                            int u, int f) {
    const auto& order = instance.order(u);
    for (int j = 0; j + 1 < order.size(); ++j) {
        if (x.at(f, order.helper[j])) return order.delay[j];
    }
    return order.delay.back();
}

double marginal_from_sources(const ProblemInstance& instance, const std::vector<double>& source,
                             int f, int h) {
    const double pf = instance.popularity().probs[f];
    double gain = 0.0;
    for (int u : instance.graph().users_of(h)) {
        double cur = source[static_cast<std::size_t>(u) * instance.file_count() + f];
        double w = instance.delays().at(h, u);
        if (cur > w) gain += pf * (cur - w);
    }
    return gain;
}

struct Candidate {
    double marginal;
    int file;
    int helper;
    std::uint64_t stamp;  // iteration at which marginal was computed
};

struct CandidateWorse {
    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.marginal != b.marginal) return a.marginal < b.marginal;
        if (a.file != b.file) return a.file > b.file;
        return a.helper > b.helper;
    }
};

}  // namespace

double marginal_value(const ProblemInstance& instance, const UncodedPlacement& x, int f, int h) {
    if (f < 0 || f >= instance.file_count() || h < 1 || h > instance.helper_count()) {
        throw std::invalid_argument("marginal_value: element out of range");
    }
    if (x.at(f, h)) throw std::invalid_argument("marginal_value: element already placed");
    if (x.column_sum(h) >= instance.cache_size()) {
        throw std::invalid_argument("marginal_value: helper cache already full");
    }
    const double pf = instance.popularity().probs[f];
    double gain = 0.0;
    for (int u : instance.graph().users_of(h)) {
        double cur = current_source_delay(instance, x, u, f);
        double w = instance.delays().at(h, u);
        if (cur > w) gain += pf * (cur - w);
    }
    return gain;
}

GreedyResult greedy_place(const ProblemInstance& instance) {
    const int F = instance.file_count();
    const int H = instance.helper_count();
    const int M = instance.cache_size();

    GreedyResult result;
    result.placement = UncodedPlacement(F, H);
    if (H == 0 || M == 0) return result;

    // source[u * F + f]: delay at which u currently gets f.
    std::vector<double> source(static_cast<std::size_t>(instance.user_count()) * F);
    for (int u = 0; u < instance.user_count(); ++u) {
        double w0 = instance.delays().bs_delay(u);
        for (int f = 0; f < F; ++f) source[static_cast<std::size_t>(u) * F + f] = w0;
    }

    // Initial marginals are valid for iteration 1: nothing is placed yet.
    std::priority_queue<Candidate, std::vector<Candidate>, CandidateWorse> queue;
    for (int f = 0; f < F; ++f) {
        for (int h = 1; h <= H; ++h) {
            if (instance.graph().users_of(h).empty()) continue;  // can never gain
            double m = marginal_from_sources(instance, source, f, h);
            ++result.trace.marginal_evaluations;
            queue.push({m, f, h, 1});
        }
    }

    std::vector<int> column_fill(H + 1, 0);
    double objective = 0.0;
    std::uint64_t iteration = 1;

    while (!queue.empty() && iteration <= static_cast<std::uint64_t>(M) * H) {
        Candidate top = queue.top();
        queue.pop();
        if (column_fill[top.helper] >= M) continue;  // column closed for good
        if (top.stamp != iteration) {
            top.marginal = marginal_from_sources(instance, source, top.file, top.helper);
            ++result.trace.marginal_evaluations;
            top.stamp = iteration;
            queue.push(top);
            continue;
        }
        // Fresh head: true maximum (stale entries only overestimate).
        if (top.marginal <= 0.0) {
            result.trace.stopped_on_zero_marginal = true;
            break;
        }
        result.placement.set(top.file, top.helper, true);
        ++column_fill[top.helper];
        objective += top.marginal;
        result.trace.steps.push_back({top.file, top.helper, top.marginal, objective});
        for (int u : instance.graph().users_of(top.helper)) {
            double& cur = source[static_cast<std::size_t>(u) * F + top.file];
            cur = std::min(cur, instance.delays().at(top.helper, u));
        }
        ++iteration;
    }
    return result;
}

GreedyResult greedy_place_naive(const ProblemInstance& instance) {
    const int F = instance.file_count();
    const int H = instance.helper_count();
    const int M = instance.cache_size();

    GreedyResult result;
    result.placement = UncodedPlacement(F, H);
    if (H == 0 || M == 0) return result;

    std::vector<double> source(static_cast<std::size_t>(instance.user_count()) * F);
    for (int u = 0; u < instance.user_count(); ++u) {
        double w0 = instance.delays().bs_delay(u);
        for (int f = 0; f < F; ++f) source[static_cast<std::size_t>(u) * F + f] = w0;
    }

    std::vector<int> column_fill(H + 1, 0);
    double objective = 0.0;

    for (int step = 0; step < M * H; ++step) {
        double best = 0.0;
        int best_f = -1, best_h = -1;
        for (int f = 0; f < F; ++f) {
            for (int h = 1; h <= H; ++h) {
                if (column_fill[h] >= M || result.placement.at(f, h)) continue;
                double m = marginal_from_sources(instance, source, f, h);
                ++result.trace.marginal_evaluations;
                if (m > best) {
                    best = m;
                    best_f = f;
                    best_h = h;
                }
            }
        }
        if (best_f < 0) {
            result.trace.stopped_on_zero_marginal = true;
            break;
        }
        result.placement.set(best_f, best_h, true);
        ++column_fill[best_h];
        objective += best;
        result.trace.steps.push_back({best_f, best_h, best, objective});
        for (int u : instance.graph().users_of(best_h)) {
            double& cur = source[static_cast<std::size_t>(u) * F + best_f];
            cur = std::min(cur, instance.delays().at(best_h, u));
        }
    }
    return result;
}

}  // namespace hcache
