#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvarkit/solver.hpp"

namespace cvarkit {

namespace {

// One row of the unified system G x >= h (or = h for equalities).
struct Row {
    Eigen::VectorXd a;
    double h = 0.0;
    bool equality = false;
    int constraint = -1;  // index into QuadraticProgram::constraints, or -1
    double sign = 1.0;    // -1 when the row was negated from a <= row / upper bound
};

std::vector<Row> unify(const QuadraticProgram& p) {
    const Eigen::Index n = p.num_vars();
    std::vector<Row> rows;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const Constraint& c = p.constraints[i];
        Row r;
        r.constraint = static_cast<int>(i);
        if (c.rel == Relation::le) {
            r.a = -c.row;
            r.h = -c.rhs;
            r.sign = -1.0;
        } else {
            r.a = c.row;
            r.h = c.rhs;
            r.equality = c.rel == Relation::eq;
        }
        rows.push_back(std::move(r));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isfinite(p.lower[j])) {
            Row r;
            r.a = Eigen::VectorXd::Unit(n, j);
            r.h = p.lower[j];
            rows.push_back(std::move(r));
        }
        if (std::isfinite(p.upper[j])) {
            Row r;
            r.a = -Eigen::VectorXd::Unit(n, j);
            r.h = -p.upper[j];
            r.sign = -1.0;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

Eigen::MatrixXd stack(const std::vector<Row>& rows, const std::vector<int>& w, Eigen::Index n) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(w.size()), n);
    for (std::size_t k = 0; k < w.size(); ++k) A.row(static_cast<Eigen::Index>(k)) = rows[w[k]].a.transpose();
    return A;
}

Eigen::Index rank_of(const Eigen::MatrixXd& A) {
    if (A.rows() == 0) return 0;
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    return qr.rank();
}

}  // namespace

QuadraticProgram::QuadraticProgram(Eigen::Index n)
    : hessian(Eigen::MatrixXd::Zero(n, n)),
      linear(Eigen::VectorXd::Zero(n)),
      lower(Eigen::VectorXd::Zero(n)),
      upper(Eigen::VectorXd::Constant(n, kInf)) {}

void QuadraticProgram::add_constraint(Eigen::VectorXd row, Relation rel, double rhs) {
    if (row.size() != num_vars())
        throw std::invalid_argument("QuadraticProgram: constraint row has wrong length");
    constraints.push_back({std::move(row), rel, rhs});
}

void QuadraticProgram::validate() const {
    const Eigen::Index n = num_vars();
    if (hessian.rows() != n || hessian.cols() != n)
        throw std::invalid_argument("QuadraticProgram: hessian has wrong shape");
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("QuadraticProgram: bound vectors have wrong length");
    if (!hessian.allFinite() || !linear.allFinite())
        throw std::invalid_argument("QuadraticProgram: non-finite data");
    if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, hessian.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("QuadraticProgram: hessian is not symmetric");
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument("QuadraticProgram: hessian is not positive semidefinite");
    }
    for (const auto& c : constraints) {
        if (c.row.size() != n) throw std::invalid_argument("QuadraticProgram: constraint row has wrong length");
        if (!c.row.allFinite() || !std::isfinite(c.rhs))
            throw std::invalid_argument("QuadraticProgram: non-finite constraint data");
    }
}

SolveResult solve_qp(const QuadraticProgram& p, const SolverConfig& cfg) {
    p.validate();
    const Eigen::Index n = p.num_vars();
    SolveResult res;

    // Feasible starting vertex from a zero-objective LP.
    LinearProgram lp(n);
    lp.constraints = p.constraints;
    lp.lower = p.lower;
    lp.upper = p.upper;
    SolveResult start = solve_lp(lp, cfg);
    if (start.status != SolveStatus::optimal) {
        res.status = start.status == SolveStatus::unbounded ? SolveStatus::infeasible : start.status;
        return res;
    }
    Eigen::VectorXd x = start.x;

    const std::vector<Row> rows = unify(p);
    const double active_tol = 1e-9;
    std::vector<int> work;
    std::vector<char> in_work(rows.size(), 0);
    auto try_add = [&](int i) {
        std::vector<int> cand = work;
        cand.push_back(i);
        if (rank_of(stack(rows, cand, n)) == static_cast<Eigen::Index>(cand.size())) {
            work.push_back(i);
            in_work[i] = 1;
            return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].equality) try_add(static_cast<int>(i));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].equality) continue;
        if (std::fabs(rows[i].a.dot(x) - rows[i].h) <= active_tol * (1.0 + std::fabs(rows[i].h)))
            try_add(static_cast<int>(i));
    }

    const double scale = 1.0 + p.hessian.cwiseAbs().maxCoeff() + p.linear.cwiseAbs().maxCoeff();
    Eigen::VectorXd lambda;
    std::size_t it = 0;
    for (; it < cfg.qp_max_iterations; ++it) {
        Eigen::VectorXd g = p.hessian * x + p.linear;
        Eigen::MatrixXd A = stack(rows, work, n);
        const Eigen::Index w = A.rows();
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + w, n + w);
        K.topLeftCorner(n, n) = p.hessian;
        K.topRightCorner(n, w) = A.transpose();
        K.bottomLeftCorner(w, n) = A;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + w);
        rhs.head(n) = -g;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
        Eigen::VectorXd sol = cod.solve(rhs);
        Eigen::VectorXd step = sol.head(n);
        bool curvature_direction = false;
        if ((K * sol - rhs).cwiseAbs().maxCoeff() > 1e-8 * scale) {
            // Singular reduced Hessian with a descent direction along its
            // null space: move along -g projected onto null(H) ∩ null(A_W).
            Eigen::MatrixXd M(n + w, n);
            M.topRows(n) = p.hessian;
            M.bottomRows(w) = A;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            Eigen::MatrixXd Z = lu.kernel();
            step = -Z * (Z.transpose() * g);
            curvature_direction = true;
        }

        if (!curvature_direction && step.cwiseAbs().maxCoeff() <= cfg.qp_tol * (1.0 + x.cwiseAbs().maxCoeff())) {
            // Multipliers: A' lambda = g.
            lambda = w > 0 ? Eigen::VectorXd(A.transpose().completeOrthogonalDecomposition().solve(g))
                           : Eigen::VectorXd();
            int drop = -1;
            double most_negative = -1e-9 * scale;
            for (Eigen::Index k = 0; k < w; ++k) {
                if (rows[work[k]].equality) continue;
                if (lambda[k] < most_negative) {
                    most_negative = lambda[k];
                    drop = static_cast<int>(k);
                }
            }
            if (drop < 0) break;
            in_work[work[drop]] = 0;
            work.erase(work.begin() + drop);
            continue;
        }

        double alpha = curvature_direction ? kInf : 1.0;
        int blocking = -1;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (in_work[i] || rows[i].equality) continue;
            double ap = rows[i].a.dot(step);
            if (ap < -1e-14) {
                double slack = std::max(rows[i].a.dot(x) - rows[i].h, 0.0);
                double t = slack / -ap;
                if (t < alpha) {
                    alpha = t;
                    blocking = static_cast<int>(i);
                }
            }
        }
        if (!std::isfinite(alpha)) {
            res.status = SolveStatus::unbounded;
            res.iterations = it;
            return res;
        }
        x += alpha * step;
        if (blocking >= 0) {
            work.push_back(blocking);
            in_work[blocking] = 1;
        }
    }
    res.iterations = it;
    if (it >= cfg.qp_max_iterations) {
        res.status = SolveStatus::iteration_limit;
        return res;
    }

    for (Eigen::Index j = 0; j < n; ++j) x[j] = std::clamp(x[j], p.lower[j], p.upper[j]);
    res.x = x;
    res.objective = 0.5 * x.dot(p.hessian * x) + p.linear.dot(x);
    res.duals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.constraints.size()));
    for (std::size_t k = 0; k < work.size(); ++k) {
        const Row& r = rows[work[k]];
        if (r.constraint >= 0) res.duals[r.constraint] = r.sign * lambda[static_cast<Eigen::Index>(k)];
    }
    Eigen::VectorXd g = p.hessian * x + p.linear;
    res.reduced_costs = g;
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        res.reduced_costs -= res.duals[static_cast<Eigen::Index>(i)] * p.constraints[i].row;
    res.dual_objective = res.objective;
    res.status = SolveStatus::optimal;
    return res;
}

double qp_kkt_residual(const QuadraticProgram& p, const SolveResult& r) {
    const Eigen::Index n = p.num_vars();
    const Eigen::VectorXd& x = r.x;
    Eigen::VectorXd g = p.hessian * x + p.linear;
    double worst = 0.0;
    // Bound multipliers must be zero on free coordinates, sign-correct and
    // complementary on bounded ones.
    Eigen::VectorXd stationarity = g - r.reduced_costs;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const Constraint& c = p.constraints[i];
        double y = r.duals[static_cast<Eigen::Index>(i)];
        stationarity -= y * c.row;
        double slack = c.row.dot(x) - c.rhs;
        if (c.rel == Relation::le) worst = std::max({worst, y, std::fabs(y * slack)});
        if (c.rel == Relation::ge) worst = std::max({worst, -y, std::fabs(y * slack)});
    }
    worst = std::max(worst, stationarity.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
        double rc = r.reduced_costs[j];
        if (rc > 0.0) {
            double gap = std::isfinite(p.lower[j]) ? rc * (x[j] - p.lower[j]) : rc;
            worst = std::max(worst, std::fabs(gap));
        } else if (rc < 0.0) {
            double gap = std::isfinite(p.upper[j]) ? rc * (p.upper[j] - x[j]) : rc;
            worst = std::max(worst, std::fabs(gap));
        }
    }
    return worst;
}

}  // namespace cvarkit
