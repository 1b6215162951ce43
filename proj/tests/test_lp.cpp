#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "hcache/lp.hpp"
#include "test_util.hpp"

using namespace hcache;
using hcache::testing::TestRand;

namespace {

// Brute-force oracle for tiny LPs: every vertex is the intersection of n
// tight constraints drawn from rows and box faces; solve each n x n system,
// keep the feasible ones, return the best objective.
std::optional<double> best_vertex_value(const LinearProgram& lp) {
    const int n = lp.variable_count();
    struct Face {
        std::vector<double> a;
        double b;
    };
    std::vector<Face> faces;
    for (const auto& con : lp.constraints) {
        Face face{std::vector<double>(n, 0.0), con.rhs};
        for (const auto& t : con.terms) face.a[t.var] += t.coeff;
        faces.push_back(face);
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lp.variables[j].lower)) {
            Face face{std::vector<double>(n, 0.0), lp.variables[j].lower};
            face.a[j] = 1.0;
            faces.push_back(face);
        }
        if (std::isfinite(lp.variables[j].upper)) {
            Face face{std::vector<double>(n, 0.0), lp.variables[j].upper};
            face.a[j] = 1.0;
            faces.push_back(face);
        }
    }

    auto feasible = [&](const std::vector<double>& x) {
        for (const auto& con : lp.constraints) {
            double activity = 0.0;
            for (const auto& t : con.terms) activity += t.coeff * x[t.var];
            if (con.relation == LpRelation::kLessEqual && activity > con.rhs + 1e-7) return false;
            if (con.relation == LpRelation::kGreaterEqual && activity < con.rhs - 1e-7) return false;
            if (con.relation == LpRelation::kEqual && std::abs(activity - con.rhs) > 1e-7) return false;
        }
        for (int j = 0; j < n; ++j) {
            if (x[j] < lp.variables[j].lower - 1e-9 || x[j] > lp.variables[j].upper + 1e-9) {
                return false;
            }
        }
        return true;
    };

    std::optional<double> best;
    std::vector<int> pick(n);
    auto consider = [&](const std::vector<int>& chosen) {
        // Solve the tight system by Gaussian elimination with partial pivots.
        std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) m[r][c] = faces[chosen[r]].a[c];
            m[r][n] = faces[chosen[r]].b;
        }
        for (int col = 0; col < n; ++col) {
            int pivot = col;
            for (int r = col + 1; r < n; ++r) {
                if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
            }
            if (std::abs(m[pivot][col]) < 1e-10) return;  // singular: not a vertex
            std::swap(m[col], m[pivot]);
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                double factor = m[r][col] / m[col][col];
                for (int c = col; c <= n; ++c) m[r][c] -= factor * m[col][c];
            }
        }
        std::vector<double> x(n);
        for (int r = 0; r < n; ++r) x[r] = m[r][n] / m[r][r];
        if (!feasible(x)) return;
        double value = 0.0;
        for (int j = 0; j < n; ++j) value += lp.objective[j] * x[j];
        if (!best || (lp.sense == LpSense::kMaximize ? value > *best : value < *best)) {
            best = value;
        }
    };
    // all n-subsets of faces
    auto rec = [&](auto&& self, int from, int depth) -> void {
        if (depth == n) {
            consider(pick);
            return;
        }
        for (int i = from; i < static_cast<int>(faces.size()); ++i) {
            pick[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
    return best;
}

}  // namespace

TEST_CASE("simplex: closed-form toys") {
    SUBCASE("single boxed variable") {
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        lp.add_variable("x", 0.0, 1.0, 1.0);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sol.values[0] == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("degenerate split optimum") {
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        lp.add_variable("x", 0.0, 1.0, 1.0);
        lp.add_variable("y", 0.0, 1.0, 1.0);
        lp.add_constraint("cap", {{0, 1.0}, {1, 1.0}}, LpRelation::kLessEqual, 1.0);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("classic two-variable maximization") {
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        lp.add_variable("x1", 0.0, kLpInfinity, 3.0);
        lp.add_variable("x2", 0.0, kLpInfinity, 2.0);
        lp.add_constraint("c1", {{0, 1.0}, {1, 1.0}}, LpRelation::kLessEqual, 4.0);
        lp.add_constraint("c2", {{0, 1.0}}, LpRelation::kLessEqual, 2.0);
        lp.add_constraint("c3", {{1, 1.0}}, LpRelation::kLessEqual, 3.0);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.objective_value == doctest::Approx(10.0).epsilon(1e-9));
    }
}

TEST_CASE("simplex: infeasible and unbounded are reported as such") {
    SUBCASE("infeasible") {
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        lp.add_variable("x", 0.0, 1.0, 1.0);
        lp.add_constraint("impossible", {{0, 1.0}}, LpRelation::kGreaterEqual, 2.0);
        CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
    }
    SUBCASE("unbounded") {
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        lp.add_variable("x", 0.0, kLpInfinity, 1.0);
        CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
    }
    SUBCASE("minimization with equality") {
        LinearProgram lp;
        lp.sense = LpSense::kMinimize;
        lp.add_variable("x", 0.0, kLpInfinity, 2.0);
        lp.add_variable("y", 0.0, kLpInfinity, 3.0);
        lp.add_constraint("eq", {{0, 1.0}, {1, 1.0}}, LpRelation::kEqual, 5.0);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.objective_value == doctest::Approx(10.0).epsilon(1e-9));
        CHECK(sol.values[0] == doctest::Approx(5.0).epsilon(1e-7));
    }
}

TEST_CASE("simplex: free and negative-bound variables") {
    LinearProgram lp;
    lp.sense = LpSense::kMinimize;
    lp.add_variable("x", -kLpInfinity, kLpInfinity, 1.0);
    lp.add_variable("y", -3.0, -1.0, 1.0);
    lp.add_constraint("floor", {{0, 1.0}}, LpRelation::kGreaterEqual, -7.0);
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(-7.0).epsilon(1e-9));
    CHECK(sol.values[1] == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(sol.objective_value == doctest::Approx(-10.0).epsilon(1e-9));
}

TEST_CASE("simplex agrees with vertex enumeration on random tiny LPs") {
    TestRand rand(9901);
    int solved = 0;
    while (solved < 150) {
        const int n = 1 + rand.below(3);
        LinearProgram lp;
        lp.sense = rand.uniform() < 0.5 ? LpSense::kMaximize : LpSense::kMinimize;
        for (int j = 0; j < n; ++j) {
            lp.add_variable("x" + std::to_string(j), 0.0, rand.uniform(0.5, 2.0),
                            rand.uniform(-1.0, 1.0));
        }
        const int rows = 1 + rand.below(4);
        for (int r = 0; r < rows; ++r) {
            std::vector<LpTerm> terms;
            for (int j = 0; j < n; ++j) {
                if (rand.uniform() < 0.8) terms.push_back({j, rand.uniform(-1.0, 2.0)});
            }
            if (terms.empty()) terms.push_back({0, 1.0});
            double rhs = rand.uniform(0.2, 2.5);
            LpRelation rel = rand.uniform() < 0.8 ? LpRelation::kLessEqual : LpRelation::kGreaterEqual;
            lp.add_constraint("r" + std::to_string(r), std::move(terms), rel, rhs);
        }
        auto oracle = best_vertex_value(lp);
        auto sol = solve_lp(lp);
        if (!oracle) {
            CHECK(sol.status != LpStatus::kOptimal);
            continue;
        }
        REQUIRE(sol.status == LpStatus::kOptimal);
        CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-6));
        ++solved;
    }
}

TEST_CASE("duals certify strong duality for max/leq LPs") {
    TestRand rand(9902);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + rand.below(3);
        const int m = 1 + rand.below(3);
        LinearProgram lp;
        lp.sense = LpSense::kMaximize;
        for (int j = 0; j < n; ++j) {
            lp.add_variable("x" + std::to_string(j), 0.0, kLpInfinity, rand.uniform(0.0, 1.5));
        }
        for (int r = 0; r < m; ++r) {
            std::vector<LpTerm> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, rand.uniform(0.2, 2.0)});
            lp.add_constraint("r" + std::to_string(r), std::move(terms), LpRelation::kLessEqual,
                              rand.uniform(0.5, 3.0));
        }
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::kOptimal);
        REQUIRE(sol.duals.size() == static_cast<std::size_t>(m));
        double dual_value = 0.0;
        for (int r = 0; r < m; ++r) {
            CHECK(sol.duals[r] >= -1e-9);  // max problem, <= rows
            dual_value += sol.duals[r] * lp.constraints[r].rhs;
        }
        CHECK(dual_value == doctest::Approx(sol.objective_value).epsilon(1e-6));
        // dual feasibility: A'y >= c
        for (int j = 0; j < n; ++j) {
            double lhs = 0.0;
            for (int r = 0; r < m; ++r) {
                for (const auto& t : lp.constraints[r].terms) {
                    if (t.var == j) lhs += sol.duals[r] * t.coeff;
                }
            }
            CHECK(lhs >= lp.objective[j] - 1e-7);
        }
    }
}

TEST_CASE("warm-started column generation matches a cold solve") {
    LinearProgram lp;
    lp.sense = LpSense::kMinimize;
    lp.add_variable("a", 0.0, kLpInfinity, 3.0);
    lp.add_constraint("demand", {{0, 1.0}}, LpRelation::kEqual, 2.0);
    lp.add_constraint("side", {{0, 1.0}}, LpRelation::kLessEqual, 5.0);

    SimplexSolver solver(lp);
    auto first = solver.solve();
    REQUIRE(first.status == LpStatus::kOptimal);
    CHECK(first.objective_value == doctest::Approx(6.0).epsilon(1e-9));

    // A cheaper column that also satisfies the demand row.
    solver.append_column("b", 1.0, {{0, 1.0}, {1, 0.5}});
    auto second = solver.solve();
    REQUIRE(second.status == LpStatus::kOptimal);
    CHECK(second.objective_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(second.values[1] == doctest::Approx(2.0).epsilon(1e-7));

    LinearProgram cold = lp;
    cold.add_variable("b", 0.0, kLpInfinity, 1.0);
    cold.constraints[0].terms.push_back({1, 1.0});
    cold.constraints[1].terms.push_back({1, 0.5});
    CHECK(solve_lp(cold).objective_value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("objective swap re-optimizes from the current basis") {
    LinearProgram lp;
    lp.sense = LpSense::kMaximize;
    lp.add_variable("x", 0.0, 1.0, 1.0);
    lp.add_variable("y", 0.0, 1.0, 0.1);
    lp.add_constraint("cap", {{0, 1.0}, {1, 1.0}}, LpRelation::kLessEqual, 1.0);

    SimplexSolver solver(lp);
    auto first = solver.solve();
    REQUIRE(first.status == LpStatus::kOptimal);
    CHECK(first.values[0] == doctest::Approx(1.0).epsilon(1e-9));

    solver.set_objective({0.1, 1.0});
    auto second = solver.solve();
    REQUIRE(second.status == LpStatus::kOptimal);
    CHECK(second.values[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(second.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lp text export carries all sections") {
    LinearProgram lp;
    lp.sense = LpSense::kMaximize;
    lp.add_variable("x", 0.0, 1.0, 2.5);
    lp.add_variable("y", 0.0, kLpInfinity, -1.0);
    lp.add_constraint("cap", {{0, 1.0}, {1, -0.25}}, LpRelation::kLessEqual, 1.5);
    std::string text = lp_export_text(lp, "toy");
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("cap:") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}
