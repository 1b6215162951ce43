#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hcache {

enum class LpSense { kMaximize, kMinimize };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class LpRelation { kLessEqual, kGreaterEqual, kEqual };

std::string to_string(LpStatus status);

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

struct LpTerm {
    int var;
    double coeff;
};

struct LpVariable {
    std::string name;
    double lower = 0.0;
    double upper = kLpInfinity;
};

struct LpConstraint {
    std::string name;
    std::vector<LpTerm> terms;
    LpRelation relation = LpRelation::kLessEqual;
    double rhs = 0.0;
};

// Box-bounded linear program over named variables with sparse rows.
struct LinearProgram {
    LpSense sense = LpSense::kMaximize;
    std::vector<LpVariable> variables;
    std::vector<double> objective;  // aligned with variables
    std::vector<LpConstraint> constraints;

    int add_variable(std::string name, double lower, double upper, double objective_coeff);
    void add_constraint(std::string name, std::vector<LpTerm> terms, LpRelation relation,
                        double rhs);
    int variable_count() const { return static_cast<int>(variables.size()); }
    int constraint_count() const { return static_cast<int>(constraints.size()); }
};

struct LpSolution {
    LpStatus status = LpStatus::kInfeasible;
    std::vector<double> values;       // per variable
    double objective_value = 0.0;
    std::vector<double> duals;        // per constraint: d(objective)/d(rhs); empty unless optimal
    std::uint64_t iterations = 0;
};

// Dense-tableau primal simplex, two phases, Dantzig pricing with an automatic
// switch to Bland's rule when pivots stall. Feasibility tolerance 1e-7,
// reduced-cost tolerance 1e-9. Solutions are verified against the original
// rows and bounds before being reported optimal.
//
// The solver keeps its tableau alive after solve() so callers doing column
// generation can append columns or swap the objective and re-solve from the
// current basis.
class SimplexSolver {
  public:
    explicit SimplexSolver(const LinearProgram& lp);
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;
    SimplexSolver(const SimplexSolver&) = delete;
    SimplexSolver& operator=(const SimplexSolver&) = delete;

    LpSolution solve();

    // Adds a variable with bounds [0, inf); `terms` index the original
    // constraint rows. Requires a prior optimal solve; the basis is kept and
    // the next solve() re-optimizes from it. Returns the new variable index.
    int append_column(std::string name, double objective_coeff, const std::vector<LpTerm>& terms);

    // Replaces the objective vector (same variables). The current basis stays
    // primal feasible, so the next solve() warm-starts.
    void set_objective(const std::vector<double>& objective);

    // Objective family c = fixed + scale * scaled for pricing loops that
    // sweep one scalar: registering the parts costs one full reduced-cost
    // rebuild, each subsequent rescale only a cheap combination.
    void set_objective_parts(const std::vector<double>& fixed, const std::vector<double>& scaled);
    void set_objective_scale(double scale);

    // Multiplies the post-solve row verification tolerance. Long-lived
    // tableaus drift; callers that repair solutions downstream can widen the
    // check instead of failing hard.
    void set_check_slack(double factor);

    int variable_count() const;

  private:
    struct Impl;
    Impl* impl_;
};

// One-shot convenience wrapper around SimplexSolver.
LpSolution solve_lp(const LinearProgram& lp);

// LP interchange text format (12 significant digits), for external-solver
// debugging.
std::string lp_export_text(const LinearProgram& lp, const std::string& problem_name = "hcache");

}  // namespace hcache
