#include "hcache/pipage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcache/placement_lp.hpp"

namespace hcache {

namespace {

bool is_integral(double v) {
    return v <= kIntegralityTol || v >= 1.0 - kIntegralityTol;
}

double snapped(double v) {
    if (v <= kIntegralityTol) return 0.0;
    if (v >= 1.0 - kIntegralityTol) return 1.0;
    return v;
}

void snap_all(CodedPlacement& x) {
    for (int f = 0; f < x.file_count(); ++f) {
        for (int h = 1; h <= x.helper_count(); ++h) {
            x.set(f, h, snapped(x.at(f, h)));
        }
    }
}

// Vertex numbering for the bipartite fractional subgraph: files first, then
// helpers; lower numbers are searched first.
struct Subgraph {
    int file_count;
    int helper_count;
    std::vector<std::vector<int>> adjacency;  // by vertex, ascending

    int file_vertex(int f) const { return f; }
    int helper_vertex(int h) const { return file_count + (h - 1); }
    bool is_file_vertex(int v) const { return v < file_count; }
    FractionalEdge edge_between(int v, int w) const {
        if (is_file_vertex(v)) return {v, w - file_count + 1};
        return {w, v - file_count + 1};
    }
};

Subgraph build_subgraph(const CodedPlacement& x) {
    Subgraph g{x.file_count(), x.helper_count(), {}};
    g.adjacency.resize(x.file_count() + x.helper_count());
    for (int f = 0; f < x.file_count(); ++f) {
        for (int h = 1; h <= x.helper_count(); ++h) {
            if (!is_integral(x.at(f, h))) {
                g.adjacency[g.file_vertex(f)].push_back(g.helper_vertex(h));
                g.adjacency[g.helper_vertex(h)].push_back(g.file_vertex(f));
            }
        }
    }
    return g;  // adjacency ascending by construction order
}

AugmentingStructure finish_structure(const Subgraph& g, const std::vector<int>& vertex_path,
                                     AugmentingStructure::Kind kind, const CodedPlacement& x) {
    AugmentingStructure alpha;
    alpha.kind = kind;
    int n = static_cast<int>(vertex_path.size());
    int edge_count = kind == AugmentingStructure::Kind::kCycle ? n : n - 1;
    for (int i = 0; i < edge_count; ++i) {
        alpha.edges.push_back(g.edge_between(vertex_path[i], vertex_path[(i + 1) % n]));
        if (i % 2 == 0) alpha.m1.push_back(i);
        else alpha.m2.push_back(i);
    }

    double eps1 = kLpInfinity, eps2 = kLpInfinity;
    for (int i : alpha.m1) {
        double v = x.at(alpha.edges[i].file, alpha.edges[i].helper);
        eps1 = std::min(eps1, v);
        eps2 = std::min(eps2, 1.0 - v);
    }
    for (int i : alpha.m2) {
        double v = x.at(alpha.edges[i].file, alpha.edges[i].helper);
        eps1 = std::min(eps1, 1.0 - v);
        eps2 = std::min(eps2, v);
    }
    alpha.eps1 = eps1;
    alpha.eps2 = eps2;
    return alpha;
}

}  // namespace

std::vector<FractionalEdge> fractional_edges(const CodedPlacement& x) {
    std::vector<FractionalEdge> out;
    for (int f = 0; f < x.file_count(); ++f) {
        for (int h = 1; h <= x.helper_count(); ++h) {
            if (!is_integral(x.at(f, h))) out.push_back({f, h});
        }
    }
    return out;
}

std::optional<AugmentingStructure> find_cycle_or_path(const CodedPlacement& x) {
    Subgraph g = build_subgraph(x);
    const int n = static_cast<int>(g.adjacency.size());
    bool any_edge = false;
    for (const auto& adj : g.adjacency) any_edge |= !adj.empty();
    if (!any_edge) return std::nullopt;

    // Cycle hunt: DFS keeping the current stack; a back edge closes a cycle.
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<int> parent(n, -1);
    for (int start = 0; start < n; ++start) {
        if (state[start] != 0 || g.adjacency[start].empty()) continue;
        std::vector<std::pair<int, std::size_t>> stack;  // (vertex, next neighbor slot)
        stack.push_back({start, 0});
        state[start] = 1;
        while (!stack.empty()) {
            auto& [v, slot] = stack.back();
            if (slot < g.adjacency[v].size()) {
                int w = g.adjacency[v][slot++];
                if (w == parent[v]) continue;
                if (state[w] == 1) {
                    // Unwind the stack from w to v.
                    std::vector<int> cycle;
                    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                        cycle.push_back(it->first);
                        if (it->first == w) break;
                    }
                    std::reverse(cycle.begin(), cycle.end());
                    return finish_structure(g, cycle, AugmentingStructure::Kind::kCycle, x);
                }
                if (state[w] == 0) {
                    state[w] = 1;
                    parent[w] = v;
                    stack.push_back({w, 0});
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }

    // Forest: walk from the lowest degree-1 vertex to another leaf, always
    // taking the lowest-indexed unvisited neighbor.
    int leaf = -1;
    for (int v = 0; v < n && leaf < 0; ++v) {
        if (g.adjacency[v].size() == 1) leaf = v;
    }
    if (leaf < 0) {
        throw std::logic_error("pipage: acyclic fractional subgraph without degree-1 vertex");
    }
    std::vector<int> path{leaf};
    std::vector<char> used(n, 0);
    used[leaf] = 1;
    int v = leaf;
    for (;;) {
        int next = -1;
        for (int w : g.adjacency[v]) {
            if (!used[w]) {
                next = w;
                break;
            }
        }
        if (next < 0) break;
        path.push_back(next);
        used[next] = 1;
        v = next;
    }
    return finish_structure(g, path, AugmentingStructure::Kind::kPath, x);
}

PipageStepReport pipage_step(const SpecialCaseInstance& sc, CodedPlacement& x,
                             const AugmentingStructure& alpha) {
    if (alpha.edges.empty()) throw std::invalid_argument("pipage_step: empty structure");
    if (!(alpha.eps1 > 0.0) || !(alpha.eps2 > 0.0)) {
        throw std::logic_error("pipage_step: nonpositive shift bound on a fractional structure");
    }
    for (const auto& m : {alpha.m1, alpha.m2}) {
        for (std::size_t a = 0; a < m.size(); ++a) {
            for (std::size_t b = a + 1; b < m.size(); ++b) {
                const auto& ea = alpha.edges[m[a]];
                const auto& eb = alpha.edges[m[b]];
                if (ea.file == eb.file || ea.helper == eb.helper) {
                    throw std::logic_error("pipage_step: matching shares a vertex");
                }
            }
        }
    }

    PipageStepReport report;
    report.g_before = special_case_g(sc, x);

    auto shifted = [&](double eps) {
        CodedPlacement y = x;
        for (int i : alpha.m1) {
            y.set(alpha.edges[i].file, alpha.edges[i].helper,
                  snapped(y.at(alpha.edges[i].file, alpha.edges[i].helper) + eps));
        }
        for (int i : alpha.m2) {
            y.set(alpha.edges[i].file, alpha.edges[i].helper,
                  snapped(y.at(alpha.edges[i].file, alpha.edges[i].helper) - eps));
        }
        return y;
    };

    CodedPlacement minus = shifted(-alpha.eps1);
    CodedPlacement plus = shifted(alpha.eps2);
    double g_minus = special_case_g(sc, minus);
    double g_plus = special_case_g(sc, plus);

    if (g_plus >= g_minus) {
        x = std::move(plus);
        report.chosen_epsilon = alpha.eps2;
        report.g_after = g_plus;
    } else {
        x = std::move(minus);
        report.chosen_epsilon = -alpha.eps1;
        report.g_after = g_minus;
    }

    for (const auto& e : alpha.edges) {
        if (is_integral(x.at(e.file, e.helper))) ++report.edges_made_integral;
    }
    if (report.edges_made_integral == 0) {
        throw std::logic_error("pipage_step: no edge became integral");
    }
    if (report.g_after < report.g_before - 1e-12) {
        throw std::logic_error("pipage_step: objective decreased");
    }
    if (!x.feasible(sc.base().cache_size())) {
        throw std::logic_error("pipage_step: cache capacity violated");
    }
    return report;
}

UncodedPlacement pipage_round(const SpecialCaseInstance& sc, CodedPlacement fractional,
                              PipageTrace* trace) {
    const auto& instance = sc.base();
    if (!fractional.feasible(instance.cache_size())) {
        throw std::invalid_argument("pipage_round: infeasible fractional input");
    }
    snap_all(fractional);

    const long long step_limit =
        static_cast<long long>(instance.file_count()) * instance.helper_count();
    long long steps = 0;
    std::size_t remaining = fractional_edges(fractional).size();
    while (true) {
        auto alpha = find_cycle_or_path(fractional);
        if (!alpha) break;
        if (++steps > step_limit) {
            throw std::logic_error("pipage_round: exceeded F*H rounding steps");
        }
        PipageStepReport report = pipage_step(sc, fractional, *alpha);
        std::size_t now = fractional_edges(fractional).size();
        if (now >= remaining) {
            throw std::logic_error("pipage_round: fractional edge count did not decrease");
        }
        remaining = now;
        if (trace) trace->steps.push_back(report);
    }

    UncodedPlacement result(instance.file_count(), instance.helper_count());
    for (int f = 0; f < instance.file_count(); ++f) {
        for (int h = 1; h <= instance.helper_count(); ++h) {
            double v = fractional.at(f, h);
            if (v != 0.0 && v != 1.0) {
                throw std::logic_error("pipage_round: non-integral output");
            }
            result.set(f, h, v == 1.0);
        }
    }
    if (!result.feasible(instance.cache_size())) {
        throw std::logic_error("pipage_round: infeasible integral output");
    }
    return result;
}

double pipage_guarantee(int d) {
    if (d <= 0) return 1.0 - std::exp(-1.0);
    return 1.0 - std::pow(1.0 - 1.0 / d, d);
}

LpPipageResult lp_pipage_solve(const SpecialCaseInstance& sc) {
    const auto& instance = sc.base();
    LpPipageResult result;
    LinearProgram lp = build_coverage_lp(sc);
    LpSolution sol = solve_lp(lp);
    result.status = sol.status;
    if (sol.status != LpStatus::kOptimal) return result;
    result.lp_objective = sol.objective_value;

    CodedPlacement fractional(instance.file_count(), instance.helper_count());
    for (int f = 0; f < instance.file_count(); ++f) {
        for (int h = 1; h <= instance.helper_count(); ++h) {
            fractional.set(f, h, sol.values[coverage_lp_rho_index(instance, f, h)]);
        }
    }
    result.placement = pipage_round(sc, std::move(fractional), &result.trace);
    result.rounded_value = special_case_value(sc, result.placement);
    return result;
}

}  // namespace hcache
