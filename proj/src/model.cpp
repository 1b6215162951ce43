#include "hcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hcache {

FileLibrary::FileLibrary(int f, long long b) : file_count(f), file_size_bits(b) {
    if (f < 1) throw std::invalid_argument("file_count must be >= 1");
    if (b < 1) throw std::invalid_argument("file_size_bits must be >= 1");
}

double Popularity::sum() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

Popularity zipf_popularity(int file_count, double gamma) {
    if (file_count < 1) throw std::invalid_argument("zipf_popularity: file_count must be >= 1");
    if (gamma < 0.0) throw std::invalid_argument("zipf_popularity: gamma must be >= 0");
    Popularity p;
    p.zipf_gamma = gamma;
    p.probs.resize(file_count);
    long double norm = 0.0L;
    for (int f = 0; f < file_count; ++f) {
        long double w = std::pow(static_cast<long double>(f + 1), -static_cast<long double>(gamma));
        p.probs[f] = static_cast<double>(w);
        norm += w;
    }
    for (double& v : p.probs) v = static_cast<double>(v / static_cast<double>(norm));
    return p;
}

Popularity popularity_from_vector(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("popularity: empty vector");
    for (double v : probs) {
        if (!(v >= 0.0)) throw std::invalid_argument("popularity: negative or NaN entry");
    }
    double s = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(s - 1.0) >= 1e-6) {
        throw std::invalid_argument("popularity: entries sum to " + std::to_string(s) +
                                    ", more than 1e-6 away from 1");
    }
    // Renormalize only when outside the invariant tolerance; vectors that are
    // already normalized pass through bit-identical.
    if (std::abs(s - 1.0) > 1e-9) {
        for (double& v : probs) v /= s;
    }
    Popularity p;
    p.probs = std::move(probs);
    return p;
}

ConnectivityGraph::ConnectivityGraph(int helper_count, int user_count,
                                     std::vector<std::pair<int, int>> edges)
    : helper_count_(helper_count), user_count_(user_count) {
    if (helper_count < 0) throw std::invalid_argument("graph: helper_count must be >= 0");
    if (user_count < 1) throw std::invalid_argument("graph: user_count must be >= 1");
    helpers_of_user_.assign(user_count, {});
    users_of_helper_.assign(helper_count + 1, {});
    std::set<std::pair<int, int>> seen;
    for (auto [h, u] : edges) {
        if (h < 1 || h > helper_count) {
            throw std::invalid_argument("graph: edge helper index " + std::to_string(h) +
                                        " outside 1.." + std::to_string(helper_count));
        }
        if (u < 0 || u >= user_count) {
            throw std::invalid_argument("graph: edge user index out of range");
        }
        if (!seen.insert({h, u}).second) continue;  // duplicates collapse
        helpers_of_user_[u].push_back(h);
        users_of_helper_[h].push_back(u);
    }
    edge_count_ = seen.size();
    for (auto& v : helpers_of_user_) std::sort(v.begin(), v.end());
    for (auto& v : users_of_helper_) std::sort(v.begin(), v.end());
    users_of_helper_[0].resize(user_count);
    std::iota(users_of_helper_[0].begin(), users_of_helper_[0].end(), 0);
}

const std::vector<int>& ConnectivityGraph::users_of(int h) const {
    return users_of_helper_[h];
}

bool ConnectivityGraph::has_edge(int h, int u) const {
    if (h == kBaseStation) return true;
    const auto& v = helpers_of_user_[u];
    return std::binary_search(v.begin(), v.end(), h);
}

std::vector<std::pair<int, int>> ConnectivityGraph::edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int h = 1; h <= helper_count_; ++h) {
        for (int u : users_of_helper_[h]) out.push_back({h, u});
    }
    return out;
}

double omega_infinity_for(const DelayMatrix& delays) {
    double max_bs = 0.0;
    for (int u = 0; u < delays.user_count; ++u) max_bs = std::max(max_bs, delays.bs_delay(u));
    return 1e6 * max_bs;
}

HelperOrder helper_order(const ConnectivityGraph& graph, const DelayMatrix& delays, int u) {
    HelperOrder order;
    const auto& neighbors = graph.helpers_of(u);
    order.helper.reserve(neighbors.size() + 1);
    order.helper.assign(neighbors.begin(), neighbors.end());
    // Stable on the ascending-index input, so delay ties keep index order.
    std::stable_sort(order.helper.begin(), order.helper.end(),
                     [&](int a, int b) { return delays.at(a, u) < delays.at(b, u); });
    order.helper.push_back(kBaseStation);
    order.delay.reserve(order.helper.size());
    for (int h : order.helper) order.delay.push_back(delays.at(h, u));
    return order;
}

ProblemInstance::ProblemInstance(FileLibrary library, Popularity popularity,
                                 ConnectivityGraph graph, DelayMatrix delays, int cache_size)
    : library_(library), popularity_(std::move(popularity)), graph_(std::move(graph)),
      delays_(std::move(delays)), cache_size_(cache_size) {
    if (popularity_.file_count() != library_.file_count) {
        throw std::invalid_argument("instance: popularity size != file_count");
    }
    if (delays_.helper_count != graph_.helper_count() || delays_.user_count != graph_.user_count()) {
        throw std::invalid_argument("instance: delay matrix dimensions do not match graph");
    }
    if (cache_size_ < 0) throw std::invalid_argument("instance: cache_size must be >= 0");
    if (cache_size_ > library_.file_count) {
        warnings_.push_back("cache_size " + std::to_string(cache_size_) +
                            " exceeds file_count; truncated to " +
                            std::to_string(library_.file_count));
        cache_size_ = library_.file_count;
    }
    orders_.reserve(graph_.user_count());
    for (int u = 0; u < graph_.user_count(); ++u) {
        orders_.push_back(helper_order(graph_, delays_, u));
        max_degree_ = std::max(max_degree_, static_cast<int>(graph_.helpers_of(u).size()));
    }
}

std::vector<Violation> validate(const ProblemInstance& instance) {
    std::vector<Violation> out;
    const auto& delays = instance.delays();
    const auto& graph = instance.graph();

    double pop_sum = instance.popularity().sum();
    if (std::abs(pop_sum - 1.0) > 1e-9) {
        out.push_back({"popularity normalization",
                       "entries sum to " + std::to_string(pop_sum)});
    }
    for (int f = 0; f < instance.file_count(); ++f) {
        if (instance.popularity().probs[f] < 0.0) {
            out.push_back({"popularity nonnegativity", "file " + std::to_string(f + 1)});
        }
    }

    double max_bs = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        double w0 = delays.bs_delay(u);
        max_bs = std::max(max_bs, w0);
        if (w0 < 0.0) out.push_back({"delay nonnegativity", "BS delay of user " + std::to_string(u + 1)});
        for (int h : graph.helpers_of(u)) {
            double w = delays.at(h, u);
            if (w < 0.0) {
                out.push_back({"delay nonnegativity",
                               "helper " + std::to_string(h) + ", user " + std::to_string(u + 1)});
            }
            if (w0 < w) {
                out.push_back({"BS delay dominance",
                               "omega(0," + std::to_string(u + 1) + ") < omega(" + std::to_string(h) +
                                   "," + std::to_string(u + 1) + ")"});
            }
        }
    }
    for (int h = 1; h <= graph.helper_count(); ++h) {
        for (int u = 0; u < instance.user_count(); ++u) {
            if (!graph.has_edge(h, u) && delays.at(h, u) != delays.omega_infinity) {
                out.push_back({"non-edge sentinel",
                               "omega(" + std::to_string(h) + "," + std::to_string(u + 1) +
                                   ") != omega_infinity"});
            }
        }
    }
    if (graph.edge_count() > 0 && !(delays.omega_infinity > max_bs)) {
        out.push_back({"sentinel dominance", "omega_infinity <= max BS delay"});
    }
    if (instance.cache_size() < 1) {
        out.push_back({"cache size", "M = " + std::to_string(instance.cache_size())});
    }

    // Order consistency (monotone delays, BS last) is enforced by
    // construction; re-check so file-loaded instances cannot bypass it.
    for (int u = 0; u < instance.user_count(); ++u) {
        const auto& order = instance.order(u);
        for (int j = 0; j + 1 < order.size(); ++j) {
            if (order.delay[j] > order.delay[j + 1]) {
                out.push_back({"order monotonicity", "user " + std::to_string(u + 1)});
            }
        }
        if (order.helper.empty() || order.helper.back() != kBaseStation) {
            out.push_back({"order BS last", "user " + std::to_string(u + 1)});
        }
    }
    return out;
}

UncodedPlacement::UncodedPlacement(int file_count, int helper_count)
    : file_count_(file_count), helper_count_(helper_count),
      x_(static_cast<std::size_t>(file_count) * helper_count, 0) {}

int UncodedPlacement::column_sum(int h) const {
    int s = 0;
    for (int f = 0; f < file_count_; ++f) s += x_[index(f, h)];
    return s;
}

bool UncodedPlacement::feasible(int cache_size) const {
    for (int h = 1; h <= helper_count_; ++h) {
        if (column_sum(h) > cache_size) return false;
    }
    return true;
}

int UncodedPlacement::placed_count() const {
    int s = 0;
    for (unsigned char v : x_) s += v;
    return s;
}

std::vector<std::pair<int, int>> UncodedPlacement::entries() const {
    std::vector<std::pair<int, int>> out;
    for (int f = 0; f < file_count_; ++f) {
        for (int h = 1; h <= helper_count_; ++h) {
            if (at(f, h)) out.push_back({f, h});
        }
    }
    return out;
}

CodedPlacement::CodedPlacement(int file_count, int helper_count)
    : file_count_(file_count), helper_count_(helper_count),
      rho_(static_cast<std::size_t>(file_count) * helper_count, 0.0) {}

double CodedPlacement::column_sum(int h) const {
    double s = 0.0;
    for (int f = 0; f < file_count_; ++f) s += rho_[index(f, h)];
    return s;
}

bool CodedPlacement::feasible(int cache_size) const {
    for (int h = 1; h <= helper_count_; ++h) {
        if (column_sum(h) > cache_size + kColumnSlack) return false;
    }
    for (double v : rho_) {
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) return false;
    }
    return true;
}

CodedPlacement CodedPlacement::from_uncoded(const UncodedPlacement& x) {
    CodedPlacement r(x.file_count(), x.helper_count());
    for (int f = 0; f < x.file_count(); ++f) {
        for (int h = 1; h <= x.helper_count(); ++h) {
            if (x.at(f, h)) r.set(f, h, 1.0);
        }
    }
    return r;
}

}  // namespace hcache
