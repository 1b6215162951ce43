#include "hcache/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hcache {

namespace {
constexpr double kFeasTol = 1e-7;
constexpr double kReducedCostTol = 1e-9;
// Entries above kRatioTol take part in the ratio test (skipping any real row
// lets the entering step drive its basic variable negative); among rows tied
// at the minimum ratio the largest pivot element wins, keeping the
// amplification of roundoff in check.
constexpr double kRatioTol = 1e-9;
constexpr int kBlandTrigger = 50;  // consecutive degenerate pivots
}  // namespace

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::kOptimal: return "optimal";
        case LpStatus::kInfeasible: return "infeasible";
        case LpStatus::kUnbounded: return "unbounded";
    }
    return "unknown";
}

int LinearProgram::add_variable(std::string name, double lower, double upper,
                                double objective_coeff) {
    if (!(lower <= upper)) throw std::invalid_argument("lp: variable with lower > upper");
    if (std::isnan(objective_coeff)) throw std::invalid_argument("lp: NaN objective coefficient");
    variables.push_back({std::move(name), lower, upper});
    objective.push_back(objective_coeff);
    return static_cast<int>(variables.size()) - 1;
}

void LinearProgram::add_constraint(std::string name, std::vector<LpTerm> terms,
                                   LpRelation relation, double rhs) {
    for (const auto& t : terms) {
        if (t.var < 0 || t.var >= variable_count()) {
            throw std::invalid_argument("lp: constraint references unknown variable");
        }
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("lp: non-finite coefficient");
    }
    if (!std::isfinite(rhs)) throw std::invalid_argument("lp: non-finite rhs");
    constraints.push_back({std::move(name), std::move(terms), relation, rhs});
}

struct SimplexSolver::Impl {
    enum class VarMode { kShift, kFlip, kSplitPos };
    enum class ColKind { kStructural, kSlack, kArtificial };

    struct UserVar {
        VarMode mode;
        int col_a = -1;
        int col_b = -1;   // negative part for free variables
        double shift = 0.0;
    };

    // Problem data (original form, kept for verification and re-costing).
    LinearProgram lp;
    double sense_mult = 1.0;  // internal minimizes sense_mult * user objective

    // Internal columns.
    std::vector<ColKind> col_kind;
    std::vector<double> cost;  // phase-2 internal cost per column
    std::vector<UserVar> var_map;

    // Rows: user constraints first, then upper-bound rows.
    int user_rows = 0;
    std::vector<double> row_flip;     // +-1, user rhs delta -> internal rhs delta
    std::vector<int> witness;         // column whose original A-column is e_i
    std::vector<std::vector<double>> tab;  // m x ncols
    std::vector<double> rhs;
    std::vector<int> basis;
    std::vector<double> d1, d2;       // phase-1 / phase-2 reduced-cost rows
    std::vector<double> dfix, dscl;   // reduced costs of the two objective parts
    std::vector<double> cost_fix, cost_scl;
    std::vector<double> user_fix, user_scl;
    bool family_active = false;
    std::vector<char> art_blocked;    // artificial columns barred from entering

    bool phase1_done = false;
    bool feasible = false;
    double check_slack = 1.0;
    std::uint64_t pivots = 0;

    int cols() const { return static_cast<int>(col_kind.size()); }
    int rows() const { return static_cast<int>(tab.size()); }

    int new_column(ColKind kind, double c) {
        col_kind.push_back(kind);
        cost.push_back(c);
        d1.push_back(0.0);
        d2.push_back(0.0);
        if (family_active) {
            dfix.push_back(0.0);
            dscl.push_back(0.0);
            cost_fix.push_back(0.0);
            cost_scl.push_back(0.0);
        }
        art_blocked.push_back(0);
        for (auto& row : tab) row.push_back(0.0);
        return cols() - 1;
    }

    explicit Impl(const LinearProgram& problem) : lp(problem) {
        sense_mult = lp.sense == LpSense::kMaximize ? -1.0 : 1.0;

        // Structural columns per user variable.
        var_map.resize(lp.variables.size());
        struct BoundRow { int col; double ub; };
        std::vector<BoundRow> bound_rows;
        for (std::size_t j = 0; j < lp.variables.size(); ++j) {
            const auto& v = lp.variables[j];
            UserVar m{};
            double c = sense_mult * lp.objective[j];
            if (std::isfinite(v.lower)) {
                m.mode = VarMode::kShift;
                m.shift = v.lower;
                m.col_a = new_column(ColKind::kStructural, c);
                if (std::isfinite(v.upper) && v.upper > v.lower) {
                    bound_rows.push_back({m.col_a, v.upper - v.lower});
                } else if (v.upper == v.lower) {
                    bound_rows.push_back({m.col_a, 0.0});
                }
            } else if (std::isfinite(v.upper)) {
                m.mode = VarMode::kFlip;
                m.shift = v.upper;
                m.col_a = new_column(ColKind::kStructural, -c);
            } else {
                m.mode = VarMode::kSplitPos;
                m.col_a = new_column(ColKind::kStructural, c);
                m.col_b = new_column(ColKind::kStructural, -c);
            }
            var_map[j] = m;
        }

        user_rows = lp.constraint_count();
        const int total_rows = user_rows + static_cast<int>(bound_rows.size());
        tab.assign(total_rows, std::vector<double>(cols(), 0.0));
        rhs.assign(total_rows, 0.0);
        row_flip.assign(total_rows, 1.0);
        witness.assign(total_rows, -1);
        basis.assign(total_rows, -1);

        for (int i = 0; i < user_rows; ++i) {
            const auto& con = lp.constraints[i];
            double b = con.rhs;
            auto& row = tab[i];
            for (const auto& t : con.terms) {
                const auto& m = var_map[t.var];
                switch (m.mode) {
                    case VarMode::kShift:
                        row[m.col_a] += t.coeff;
                        b -= t.coeff * m.shift;
                        break;
                    case VarMode::kFlip:
                        row[m.col_a] -= t.coeff;
                        b -= t.coeff * m.shift;
                        break;
                    case VarMode::kSplitPos:
                        row[m.col_a] += t.coeff;
                        row[m.col_b] -= t.coeff;
                        break;
                }
            }
            // Normalize to <= (or =), then flip signs until the rhs is
            // nonnegative; a slack of +1 doubles as the initial basis. Rows
            // are rescaled to unit max-norm so badly scaled inputs (delays in
            // microseconds against fractions in [0,1]) pivot stably; the
            // combined multiplier lives in row_flip and carries through to
            // duals and appended columns.
            double magnitude = 0.0;
            for (double a : row) magnitude = std::max(magnitude, std::abs(a));
            const double scale = magnitude > 0.0 ? 1.0 / magnitude : 1.0;
            double flip = con.relation == LpRelation::kGreaterEqual ? -scale : scale;
            double slack_sign = con.relation == LpRelation::kEqual ? 0.0 : 1.0;
            if (flip * b < 0.0) {
                flip = -flip;
                slack_sign = -slack_sign;
            }
            for (double& a : row) a *= flip;
            rhs[i] = flip * b;
            row_flip[i] = flip;
            if (slack_sign != 0.0) {
                int s = new_column(ColKind::kSlack, 0.0);
                tab[i][s] = slack_sign;
                if (slack_sign > 0.0) {
                    basis[i] = s;
                    witness[i] = s;
                }
            }
            if (basis[i] < 0) {
                int a = new_column(ColKind::kArtificial, 0.0);
                tab[i][a] = 1.0;
                basis[i] = a;
                witness[i] = a;
            }
        }
        for (std::size_t k = 0; k < bound_rows.size(); ++k) {
            int i = user_rows + static_cast<int>(k);
            tab[i][bound_rows[k].col] = 1.0;
            rhs[i] = bound_rows[k].ub;
            int s = new_column(ColKind::kSlack, 0.0);
            tab[i][s] = 1.0;
            basis[i] = s;
            witness[i] = s;
        }
        recompute_reduced_costs();
    }

    void recompute_reduced_costs() {
        const int m = rows();
        const int n = cols();
        std::vector<double> cb1(m), cb2(m);
        for (int i = 0; i < m; ++i) {
            cb1[i] = col_kind[basis[i]] == ColKind::kArtificial ? 1.0 : 0.0;
            cb2[i] = cost[basis[i]];
        }
        for (int j = 0; j < n; ++j) {
            double z1 = 0.0, z2 = 0.0;
            for (int i = 0; i < m; ++i) {
                double a = tab[i][j];
                if (a != 0.0) {
                    z1 += cb1[i] * a;
                    z2 += cb2[i] * a;
                }
            }
            double c1 = col_kind[j] == ColKind::kArtificial ? 1.0 : 0.0;
            d1[j] = c1 - z1;
            d2[j] = cost[j] - z2;
        }
    }

    void pivot(int r, int s) {
        const int n = cols();
        auto& prow = tab[r];
        const double inv = 1.0 / prow[s];
        for (int j = 0; j < n; ++j) prow[j] *= inv;
        prow[s] = 1.0;
        rhs[r] *= inv;
        for (int i = 0; i < rows(); ++i) {
            if (i == r) continue;
            double factor = tab[i][s];
            if (factor == 0.0) continue;
            auto& row = tab[i];
            const double* p = prow.data();
            double* q = row.data();
            for (int j = 0; j < n; ++j) q[j] -= factor * p[j];
            row[s] = 0.0;
            rhs[i] -= factor * rhs[r];
            if (std::abs(rhs[i]) < 1e-12) rhs[i] = 0.0;
        }
        auto eliminate = [&](std::vector<double>& d) {
            double factor = d[s];
            if (factor == 0.0) return;
            const double* p = prow.data();
            for (int j = 0; j < n; ++j) d[j] -= factor * p[j];
            d[s] = 0.0;
        };
        eliminate(d1);
        eliminate(d2);
        if (family_active) {
            eliminate(dfix);
            eliminate(dscl);
        }
        basis[r] = s;
        ++pivots;
    }

    // Returns true on optimality of the given cost row, false on unbounded.
    bool iterate(const std::vector<double>& d, bool phase_one) {
        int degenerate_streak = 0;
        std::uint64_t bland_until = 0;             // pivot count until which Bland stays active
        constexpr std::uint64_t kBlandBurst = 512;  // enough to escape a degenerate vertex
        const std::uint64_t pivot_limit =
            pivots + 20000 + 200ULL * static_cast<std::uint64_t>(rows() + cols());
        for (;;) {
            if (pivots > pivot_limit) {
                throw std::runtime_error("simplex: pivot limit exceeded (cycling or numerics)");
            }
            const bool bland = pivots < bland_until;
            int enter = -1;
            if (bland) {
                for (int j = 0; j < cols(); ++j) {
                    if (entering_allowed(j, phase_one) && d[j] < -kReducedCostTol) {
                        enter = j;
                        break;
                    }
                }
            } else {
                double best = -kReducedCostTol;
                for (int j = 0; j < cols(); ++j) {
                    if (entering_allowed(j, phase_one) && d[j] < best) {
                        best = d[j];
                        enter = j;
                    }
                }
            }
            if (enter < 0) return true;

            // Two-pass ratio test: exact minimum first, then the most
            // stable pivot (or lowest basis index under Bland) within a
            // tight window of it.
            double min_ratio = -1.0;
            for (int i = 0; i < rows(); ++i) {
                double a = tab[i][enter];
                if (a > kRatioTol) {
                    double ratio = std::max(rhs[i], 0.0) / a;
                    if (min_ratio < 0.0 || ratio < min_ratio) min_ratio = ratio;
                }
            }
            if (min_ratio < 0.0) return false;  // unbounded direction
            const double window = min_ratio + 1e-12 * (1.0 + min_ratio);
            int leave = -1;
            for (int i = 0; i < rows(); ++i) {
                double a = tab[i][enter];
                if (a > kRatioTol && std::max(rhs[i], 0.0) / a <= window) {
                    if (leave < 0) {
                        leave = i;
                    } else if (bland ? basis[i] < basis[leave] : a > tab[leave][enter]) {
                        leave = i;
                    }
                }
            }
            double best_ratio = min_ratio;

            if (best_ratio < 1e-12) {
                // Long degenerate runs switch to Bland's rule in bursts; each
                // re-trigger doubles the burst so persistent degeneracy keeps
                // the anti-cycling protection while ordinary solves get the
                // fast pricing back.
                if (++degenerate_streak > kBlandTrigger && pivots >= bland_until) {
                    bland_until = pivots + kBlandBurst;
                    degenerate_streak = 0;
                }
            } else {
                degenerate_streak = 0;
            }
            pivot(leave, enter);
        }
    }

    bool entering_allowed(int j, bool phase_one) const {
        if (col_kind[j] == ColKind::kArtificial) {
            if (!phase_one || art_blocked[j]) return false;
        }
        // basic columns have d == 0, harmless to consider
        return true;
    }

    double phase1_objective() const {
        double s = 0.0;
        for (int i = 0; i < rows(); ++i) {
            if (col_kind[basis[i]] == ColKind::kArtificial) s += std::max(rhs[i], 0.0);
        }
        return s;
    }

    LpStatus run() {
        if (!phase1_done) {
            bool has_artificial = false;
            for (auto k : col_kind) has_artificial |= k == ColKind::kArtificial;
            if (has_artificial) {
                if (!iterate(d1, true)) {
                    throw std::runtime_error("simplex: phase 1 reported unbounded");
                }
                if (phase1_objective() > kFeasTol) return LpStatus::kInfeasible;
                drive_out_artificials();
                for (int j = 0; j < cols(); ++j) {
                    if (col_kind[j] == ColKind::kArtificial) art_blocked[j] = 1;
                }
            }
            phase1_done = true;
            feasible = true;
        }
        if (!iterate(d2, false)) return LpStatus::kUnbounded;
        return LpStatus::kOptimal;
    }

    void drive_out_artificials() {
        for (int i = 0; i < rows(); ++i) {
            if (col_kind[basis[i]] != ColKind::kArtificial) continue;
            int target = -1;
            for (int j = 0; j < cols(); ++j) {
                if (col_kind[j] != ColKind::kArtificial && std::abs(tab[i][j]) > 1e-7) {
                    target = j;
                    break;
                }
            }
            if (target >= 0) pivot(i, target);
            // else: redundant row; the artificial stays basic at level zero.
        }
    }

    LpSolution extract(LpStatus status) {
        LpSolution sol;
        sol.status = status;
        sol.iterations = pivots;
        if (status != LpStatus::kOptimal) return sol;

        std::vector<double> v(cols(), 0.0);
        for (int i = 0; i < rows(); ++i) v[basis[i]] = std::max(rhs[i], 0.0);

        sol.values.resize(lp.variables.size());
        double obj = 0.0;
        for (std::size_t j = 0; j < lp.variables.size(); ++j) {
            const auto& m = var_map[j];
            double x = 0.0;
            switch (m.mode) {
                case VarMode::kShift: x = m.shift + v[m.col_a]; break;
                case VarMode::kFlip: x = m.shift - v[m.col_a]; break;
                case VarMode::kSplitPos: x = v[m.col_a] - v[m.col_b]; break;
            }
            x = std::min(std::max(x, lp.variables[j].lower), lp.variables[j].upper);
            sol.values[j] = x;
            obj += lp.objective[j] * x;
        }
        sol.objective_value = obj;

        for (int i = 0; i < user_rows; ++i) {
            const auto& con = lp.constraints[i];
            double activity = 0.0;
            for (const auto& t : con.terms) activity += t.coeff * sol.values[t.var];
            double viol = 0.0;
            if (con.relation == LpRelation::kLessEqual) viol = activity - con.rhs;
            else if (con.relation == LpRelation::kGreaterEqual) viol = con.rhs - activity;
            else viol = std::abs(activity - con.rhs);
            if (viol > check_slack * kFeasTol * std::max(1.0, std::abs(con.rhs))) {
                throw std::runtime_error("simplex: optimal basis fails feasibility check on row '" +
                                         con.name + "' (violation " + std::to_string(viol) + ")");
            }
        }

        sol.duals.resize(user_rows);
        for (int i = 0; i < user_rows; ++i) {
            double y_int = -d2[witness[i]];
            double y_user = row_flip[i] * y_int;
            sol.duals[i] = lp.sense == LpSense::kMaximize ? -y_user : y_user;
        }
        return sol;
    }

    int append_column(std::string name, double objective_coeff, const std::vector<LpTerm>& terms) {
        if (!phase1_done) throw std::logic_error("append_column requires a prior solve");
        lp.variables.push_back({std::move(name), 0.0, kLpInfinity});
        lp.objective.push_back(objective_coeff);
        UserVar m{};
        m.mode = VarMode::kShift;
        m.shift = 0.0;
        m.col_a = new_column(ColKind::kStructural, sense_mult * objective_coeff);
        var_map.push_back(m);
        const int col = m.col_a;

        // raw internal coefficients, then express in the current basis.
        std::vector<double> raw(rows(), 0.0);
        for (const auto& t : terms) {
            if (t.var < 0 || t.var >= user_rows) {
                throw std::invalid_argument("append_column: row index out of range");
            }
            raw[t.var] += row_flip[t.var] * t.coeff;
            lp.constraints[t.var].terms.push_back({static_cast<int>(lp.variables.size()) - 1, t.coeff});
        }
        double z1 = 0.0, z2 = 0.0;
        for (int i = 0; i < rows(); ++i) {
            if (raw[i] == 0.0) continue;
            const int w = witness[i];
            for (int r = 0; r < rows(); ++r) tab[r][col] += raw[i] * tab[r][w];
            z1 += raw[i] * d1[w];
            z2 += raw[i] * d2[w];
        }
        d1[col] = z1;   // c1 = 0 for structural; y1' raw = -sum d1[w] raw
        d2[col] = cost[col] + z2;
        return static_cast<int>(lp.variables.size()) - 1;
    }

    void set_objective(const std::vector<double>& objective) {
        if (objective.size() != lp.variables.size()) {
            throw std::invalid_argument("set_objective: size mismatch");
        }
        family_active = false;
        lp.objective = objective;
        for (std::size_t j = 0; j < lp.variables.size(); ++j) {
            const auto& m = var_map[j];
            double c = sense_mult * objective[j];
            switch (m.mode) {
                case VarMode::kShift: cost[m.col_a] = c; break;
                case VarMode::kFlip: cost[m.col_a] = -c; break;
                case VarMode::kSplitPos:
                    cost[m.col_a] = c;
                    cost[m.col_b] = -c;
                    break;
            }
        }
        // Fresh phase-2 reduced costs for the current basis.
        const int mrows = rows();
        std::vector<double> cb(mrows);
        for (int i = 0; i < mrows; ++i) cb[i] = cost[basis[i]];
        for (int j = 0; j < cols(); ++j) {
            double z = 0.0;
            for (int i = 0; i < mrows; ++i) {
                double a = tab[i][j];
                if (a != 0.0) z += cb[i] * a;
            }
            d2[j] = cost[j] - z;
        }
    }

    // Internal cost vector for a user objective, per the variable mapping.
    std::vector<double> internal_costs(const std::vector<double>& objective) const {
        std::vector<double> c(cols(), 0.0);
        for (std::size_t j = 0; j < lp.variables.size(); ++j) {
            const auto& m = var_map[j];
            double v = sense_mult * objective[j];
            switch (m.mode) {
                case VarMode::kShift: c[m.col_a] = v; break;
                case VarMode::kFlip: c[m.col_a] = -v; break;
                case VarMode::kSplitPos:
                    c[m.col_a] = v;
                    c[m.col_b] = -v;
                    break;
            }
        }
        return c;
    }

    void reduced_costs_for(const std::vector<double>& c, std::vector<double>& d) const {
        const int mrows = rows();
        std::vector<double> cb(mrows);
        for (int i = 0; i < mrows; ++i) cb[i] = c[basis[i]];
        d.assign(cols(), 0.0);
        for (int j = 0; j < cols(); ++j) {
            double z = 0.0;
            for (int i = 0; i < mrows; ++i) {
                double a = tab[i][j];
                if (a != 0.0) z += cb[i] * a;
            }
            d[j] = c[j] - z;
        }
    }

    void set_objective_parts(const std::vector<double>& fixed, const std::vector<double>& scaled) {
        if (fixed.size() != lp.variables.size() || scaled.size() != lp.variables.size()) {
            throw std::invalid_argument("set_objective_parts: size mismatch");
        }
        cost_fix = internal_costs(fixed);
        cost_scl = internal_costs(scaled);
        reduced_costs_for(cost_fix, dfix);
        reduced_costs_for(cost_scl, dscl);
        user_fix = fixed;
        user_scl = scaled;
        family_active = true;
        lp.objective = fixed;  // placeholder until a scale is applied
    }

    void set_objective_scale(double scale) {
        if (!family_active) throw std::logic_error("set_objective_scale without parts");
        for (int j = 0; j < cols(); ++j) {
            cost[j] = cost_fix[j] + scale * cost_scl[j];
            d2[j] = dfix[j] + scale * dscl[j];
        }
        for (std::size_t j = 0; j < lp.objective.size(); ++j) {
            lp.objective[j] = user_fix[j] + scale * user_scl[j];
        }
    }
};

SimplexSolver::SimplexSolver(const LinearProgram& lp) : impl_(new Impl(lp)) {}
SimplexSolver::~SimplexSolver() { delete impl_; }
SimplexSolver::SimplexSolver(SimplexSolver&& other) noexcept : impl_(other.impl_) {
    other.impl_ = nullptr;
}
SimplexSolver& SimplexSolver::operator=(SimplexSolver&& other) noexcept {
    if (this != &other) {
        delete impl_;
        impl_ = other.impl_;
        other.impl_ = nullptr;
    }
    return *this;
}

LpSolution SimplexSolver::solve() {
    LpStatus status = impl_->run();
    return impl_->extract(status);
}

int SimplexSolver::append_column(std::string name, double objective_coeff,
                                 const std::vector<LpTerm>& terms) {
    return impl_->append_column(std::move(name), objective_coeff, terms);
}

void SimplexSolver::set_objective(const std::vector<double>& objective) {
    impl_->set_objective(objective);
}

void SimplexSolver::set_objective_parts(const std::vector<double>& fixed,
                                        const std::vector<double>& scaled) {
    impl_->set_objective_parts(fixed, scaled);
}

void SimplexSolver::set_objective_scale(double scale) { impl_->set_objective_scale(scale); }

void SimplexSolver::set_check_slack(double factor) { impl_->check_slack = factor; }

int SimplexSolver::variable_count() const { return static_cast<int>(impl_->lp.variables.size()); }

LpSolution solve_lp(const LinearProgram& lp) {
    SimplexSolver solver(lp);
    return solver.solve();
}

namespace {

std::string format_coeff(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

}  // namespace

std::string lp_export_text(const LinearProgram& lp, const std::string& problem_name) {
    std::string out;
    out += "\\ " + problem_name + "\n";
    out += lp.sense == LpSense::kMaximize ? "Maximize\n" : "Minimize\n";
    out += " obj:";
    for (int j = 0; j < lp.variable_count(); ++j) {
        double c = lp.objective[j];
        if (c == 0.0) continue;
        out += (c >= 0 ? " + " : " - ") + format_coeff(std::abs(c)) + " " + lp.variables[j].name;
    }
    out += "\nSubject To\n";
    for (const auto& con : lp.constraints) {
        out += " " + con.name + ":";
        for (const auto& t : con.terms) {
            out += (t.coeff >= 0 ? " + " : " - ") + format_coeff(std::abs(t.coeff)) + " " +
                   lp.variables[t.var].name;
        }
        switch (con.relation) {
            case LpRelation::kLessEqual: out += " <= "; break;
            case LpRelation::kGreaterEqual: out += " >= "; break;
            case LpRelation::kEqual: out += " = "; break;
        }
        out += format_coeff(con.rhs) + "\n";
    }
    out += "Bounds\n";
    for (const auto& v : lp.variables) {
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out += " " + v.name + " free\n";
        } else if (!std::isfinite(v.upper)) {
            out += " " + v.name + " >= " + format_coeff(v.lower) + "\n";
        } else if (!std::isfinite(v.lower)) {
            out += " " + v.name + " <= " + format_coeff(v.upper) + "\n";
        } else {
            out += " " + format_coeff(v.lower) + " <= " + v.name + " <= " +
                   format_coeff(v.upper) + "\n";
        }
    }
    out += "End\n";
    return out;
}

}  // namespace hcache
