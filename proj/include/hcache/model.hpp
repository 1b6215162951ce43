#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hcache {

// Index conventions, used by every module and all file formats:
//   files   f: 0-based internally, 1-based in files and messages;
//   helpers h: 1..H, with h = 0 reserved for the base station;
//   users   u: 0-based internally, 1-based in files and messages.
inline constexpr int kBaseStation = 0;

struct FileLibrary {
    int file_count = 0;       // F
    long long file_size_bits = 1;  // B, identical for all files

    FileLibrary() = default;
    FileLibrary(int f, long long b);
};

// Request probabilities over the library; probs[f] for file f (0-based).
struct Popularity {
    std::vector<double> probs;
    double zipf_gamma = -1.0;  // >= 0 when built by zipf_popularity

    int file_count() const { return static_cast<int>(probs.size()); }
    double sum() const;
};

// probs[f] = (f+1)^-gamma / sum_k (k)^-gamma, ranks 1..F.
Popularity zipf_popularity(int file_count, double gamma);

// Explicit probability vector; renormalizes when the sum is within 1e-6 of 1,
// rejects otherwise.
Popularity popularity_from_vector(std::vector<double> probs);

// Bipartite helper/user connectivity. The base station is implicit: it is
// adjacent to every user and never appears in the edge set.
class ConnectivityGraph {
  public:
    ConnectivityGraph() = default;
    ConnectivityGraph(int helper_count, int user_count,
                      std::vector<std::pair<int, int>> edges);

    int helper_count() const { return helper_count_; }
    int user_count() const { return user_count_; }

    // Non-BS helpers adjacent to user u, ascending.
    const std::vector<int>& helpers_of(int u) const { return helpers_of_user_[u]; }
    // Users adjacent to helper h; h = 0 returns every user.
    const std::vector<int>& users_of(int h) const;
    bool has_edge(int h, int u) const;

    std::size_t edge_count() const { return edge_count_; }
    // Neighborhood size of u including the base station: |H(u)|.
    int neighborhood_size(int u) const { return static_cast<int>(helpers_of_user_[u].size()) + 1; }

    std::vector<std::pair<int, int>> edge_list() const;  // sorted (h, u)

  private:
    int helper_count_ = 0;
    int user_count_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<int>> helpers_of_user_;
    std::vector<std::vector<int>> users_of_helper_;  // [0] = all users
};

// Per-bit download delays, (H+1) x U with row 0 for the base station.
// Non-edges carry the finite sentinel omega_infinity.
struct DelayMatrix {
    int helper_count = 0;
    int user_count = 0;
    std::vector<double> omega;       // (H+1) * U, row-major
    double omega_infinity = 0.0;

    DelayMatrix() = default;
    DelayMatrix(int helpers, int users) : helper_count(helpers), user_count(users),
        omega(static_cast<std::size_t>(helpers + 1) * users, 0.0) {}

    double at(int h, int u) const { return omega[static_cast<std::size_t>(h) * user_count + u]; }
    double& at(int h, int u) { return omega[static_cast<std::size_t>(h) * user_count + u]; }
    double bs_delay(int u) const { return at(kBaseStation, u); }
};

// Sentinel for missing links: 1e6 x the largest base-station delay. Finite so
// that arithmetic stays well-behaved, but larger than any real link delay.
double omega_infinity_for(const DelayMatrix& delays);

// u's neighborhood (helpers plus base station) sorted by delay, ascending.
// Ties between helpers break by ascending index; the base station is always
// last regardless of ties.
struct HelperOrder {
    std::vector<int> helper;   // helper ids, helper.back() == kBaseStation
    std::vector<double> delay; // matching delays, nondecreasing

    int size() const { return static_cast<int>(helper.size()); }
};

struct Violation {
    std::string invariant;
    std::string detail;
};

// Immutable problem instance shared by all solvers. Construction performs
// structural checks (dimensions, index ranges) and truncates M > F with a
// warning; semantic invariants are reported by validate().
class ProblemInstance {
  public:
    ProblemInstance(FileLibrary library, Popularity popularity,
                    ConnectivityGraph graph, DelayMatrix delays, int cache_size);

    const FileLibrary& library() const { return library_; }
    const Popularity& popularity() const { return popularity_; }
    const ConnectivityGraph& graph() const { return graph_; }
    const DelayMatrix& delays() const { return delays_; }
    int cache_size() const { return cache_size_; }

    int file_count() const { return library_.file_count; }
    int helper_count() const { return graph_.helper_count(); }
    int user_count() const { return graph_.user_count(); }

    const HelperOrder& order(int u) const { return orders_[u]; }
    // Max non-BS degree over users.
    int max_degree() const { return max_degree_; }

    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    FileLibrary library_;
    Popularity popularity_;
    ConnectivityGraph graph_;
    DelayMatrix delays_;
    int cache_size_;
    int max_degree_ = 0;
    std::vector<HelperOrder> orders_;
    std::vector<std::string> warnings_;
};

// Sorted neighborhood of one user; standalone so tests can exercise the
// tie-break rule without a full instance.
HelperOrder helper_order(const ConnectivityGraph& graph, const DelayMatrix& delays, int u);

// Semantic invariant check; returns every violation found, never throws.
std::vector<Violation> validate(const ProblemInstance& instance);

// Binary file-to-helper assignment, F x H, column sums capped by M.
class UncodedPlacement {
  public:
    UncodedPlacement() = default;
    UncodedPlacement(int file_count, int helper_count);

    int file_count() const { return file_count_; }
    int helper_count() const { return helper_count_; }

    bool at(int f, int h) const { return x_[index(f, h)] != 0; }
    void set(int f, int h, bool value) { x_[index(f, h)] = value ? 1 : 0; }

    int column_sum(int h) const;
    bool feasible(int cache_size) const;
    int placed_count() const;

    std::vector<std::pair<int, int>> entries() const;  // (f, h) with x = 1, sorted

    bool operator==(const UncodedPlacement& other) const {
        return file_count_ == other.file_count_ && helper_count_ == other.helper_count_ && x_ == other.x_;
    }

  private:
    std::size_t index(int f, int h) const {
        return static_cast<std::size_t>(f) * helper_count_ + (h - 1);
    }

    int file_count_ = 0;
    int helper_count_ = 0;
    std::vector<unsigned char> x_;
};

// Fractional placement, rho in [0,1]^(F x H); the base station implicitly
// holds rho = 1 for every file and is never stored.
class CodedPlacement {
  public:
    static constexpr double kColumnSlack = 1e-7;

    CodedPlacement() = default;
    CodedPlacement(int file_count, int helper_count);

    int file_count() const { return file_count_; }
    int helper_count() const { return helper_count_; }

    double at(int f, int h) const { return rho_[index(f, h)] ; }
    void set(int f, int h, double value) { rho_[index(f, h)] = value; }

    double column_sum(int h) const;
    bool feasible(int cache_size) const;

    static CodedPlacement from_uncoded(const UncodedPlacement& x);

  private:
    std::size_t index(int f, int h) const {
        return static_cast<std::size_t>(f) * helper_count_ + (h - 1);
    }

    int file_count_ = 0;
    int helper_count_ = 0;
    std::vector<double> rho_;
};

}  // namespace hcache
