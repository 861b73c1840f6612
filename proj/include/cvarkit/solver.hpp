#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvarkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };

struct Constraint {
    Eigen::VectorXd row;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

// min objective . x  s.t.  constraints, lower <= x <= upper.
// Bounds default to [0, +inf); either side may be infinite.
struct LinearProgram {
    Eigen::VectorXd objective;
    std::vector<Constraint> constraints;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<std::string> names;  // optional, used by the LP writer

    LinearProgram() = default;
    explicit LinearProgram(Eigen::Index n);

    Eigen::Index num_vars() const { return objective.size(); }
    void add_constraint(Eigen::VectorXd row, Relation rel, double rhs);
    void set_free(Eigen::Index j) {
        lower[j] = -kInf;
        upper[j] = kInf;
    }
    // Throws std::invalid_argument on inconsistent dimensions or non-finite data.
    void validate() const;
};

// min 0.5 x'Hx + linear . x  s.t.  constraints, bounds (as for LinearProgram).
struct QuadraticProgram {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd linear;
    std::vector<Constraint> constraints;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    QuadraticProgram() = default;
    explicit QuadraticProgram(Eigen::Index n);

    Eigen::Index num_vars() const { return linear.size(); }
    void add_constraint(Eigen::VectorXd row, Relation rel, double rhs);
    // Also checks symmetry (1e-12) and PSD (-1e-9 eigenvalue tolerance).
    void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::size_t iterations = 0;
    // Row multipliers, d(objective*)/d(rhs_i): <= 0 on binding <= rows,
    // >= 0 on binding >= rows of a minimization.
    Eigen::VectorXd duals;
    // objective - A' duals, i.e. the multipliers of the bound constraints.
    Eigen::VectorXd reduced_costs;
    // Lagrangian dual value rebuilt from duals and bound multipliers (LP only).
    double dual_objective = 0.0;
};

enum class Pricing {
    bland,           // smallest-index entering and leaving rules throughout
    dantzig_bland,   // most negative reduced cost, Bland after a degenerate stall
};

struct SolverConfig {
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double bound_clamp_tol = 1e-10;
    std::size_t max_iterations = 2'000'000;
    Pricing pricing = Pricing::dantzig_bland;
    // Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_stall = 50;
    // Basis changes between refactorizations of the tableau.
    std::size_t refactor_interval = 100;
    // QP: working-set iterations cap and KKT tolerance.
    std::size_t qp_max_iterations = 10'000;
    double qp_tol = 1e-10;
};

SolveResult solve_lp(const LinearProgram& p, const SolverConfig& cfg = {});
SolveResult solve_qp(const QuadraticProgram& p, const SolverConfig& cfg = {});

// Max violation over constraints and bounds at x.
double primal_residual(const LinearProgram& p, const Eigen::VectorXd& x);
double primal_residual(const QuadraticProgram& p, const Eigen::VectorXd& x);

// Stationarity plus complementary-slackness residual of a QP solution,
// using the multipliers stored in the result.
double qp_kkt_residual(const QuadraticProgram& p, const SolveResult& r);

// CPLEX-style LP text dump (write-only, for debugging).
void write_lp(std::ostream& os, const LinearProgram& p);

}  // namespace cvarkit
