#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvarkit/solver.hpp"

namespace cvarkit {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class VarState : unsigned char { basic, at_lower, at_upper };

// How an original variable maps into non-negative standard-form columns.
struct ColumnMap {
    enum Kind { shifted, reflected, split } kind = shifted;
    Eigen::Index col = -1;
    Eigen::Index col2 = -1;
    double offset = 0.0;
};

// Bounded-variable primal simplex on a dense tableau. Artificial columns
// are virtual: an artificial leaving the basis is fixed at zero forever, so
// its tableau column is never read and is not stored.
class Tableau {
public:
    Tableau(const LinearProgram& p, const SolverConfig& cfg) : cfg_(cfg) { build(p); }

    SolveResult solve(const LinearProgram& p);

private:
    const SolverConfig& cfg_;
    Eigen::Index m_ = 0;      // rows
    Eigen::Index n_std_ = 0;  // structural standard columns
    Eigen::Index ncol_ = 0;   // structural + slack
    std::vector<ColumnMap> maps_;
    RowMatrix a_;             // standard-form matrix (no artificials)
    Eigen::VectorXd b_;
    Eigen::VectorXd ub_;      // upper bounds of real columns (lower = 0)
    Eigen::VectorXd cost_;    // phase-2 costs of real columns
    std::vector<double> row_scale_;  // signed factor applied to each row
    double obj_offset_ = 0.0;

    RowMatrix t_;
    Eigen::VectorXd beta_;
    Eigen::VectorXd d_;
    std::vector<Eigen::Index> basis_;  // >= ncol_ means artificial of that row
    std::vector<VarState> state_;
    // Phase-1 columns whose reduced cost is rounding noise with no usable pivot.
    std::vector<bool> excluded_;
    double phase_one_stop_ = 0.0;  // infeasibility sum treated as zero
    bool artificial_fixed_ = false;
    bool phase_one_ = true;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;

    bool is_artificial(Eigen::Index c) const { return c >= ncol_; }
    double basic_upper(Eigen::Index i) const {
        Eigen::Index c = basis_[i];
        if (is_artificial(c)) return artificial_fixed_ ? 0.0 : kInf;
        return ub_[c];
    }
    double phase_cost(Eigen::Index c) const {
        if (phase_one_) return is_artificial(c) ? 1.0 : 0.0;
        return is_artificial(c) ? 0.0 : cost_[c];
    }

    void build(const LinearProgram& p);
    void compute_reduced_costs();
    bool reinvert();
    enum class Outcome { optimal, unbounded, limit };
    Outcome iterate(double opt_tol);
    Outcome run_phase(double opt_tol);
    double phase_objective() const;
};

void Tableau::build(const LinearProgram& p) {
    const Eigen::Index n = p.num_vars();
    m_ = static_cast<Eigen::Index>(p.constraints.size());
    maps_.resize(n);
    std::vector<double> col_ub;
    for (Eigen::Index j = 0; j < n; ++j) {
        double l = p.lower[j], u = p.upper[j];
        ColumnMap& cm = maps_[j];
        if (std::isfinite(l)) {
            cm.kind = ColumnMap::shifted;
            cm.offset = l;
            cm.col = static_cast<Eigen::Index>(col_ub.size());
            col_ub.push_back(std::isfinite(u) ? u - l : kInf);
        } else if (std::isfinite(u)) {
            cm.kind = ColumnMap::reflected;
            cm.offset = u;
            cm.col = static_cast<Eigen::Index>(col_ub.size());
            col_ub.push_back(kInf);
        } else {
            cm.kind = ColumnMap::split;
            cm.col = static_cast<Eigen::Index>(col_ub.size());
            col_ub.push_back(kInf);
            cm.col2 = static_cast<Eigen::Index>(col_ub.size());
            col_ub.push_back(kInf);
        }
    }
    n_std_ = static_cast<Eigen::Index>(col_ub.size());
    Eigen::Index n_slack = 0;
    for (const auto& c : p.constraints)
        if (c.rel != Relation::eq) ++n_slack;
    ncol_ = n_std_ + n_slack;

    a_ = RowMatrix::Zero(m_, ncol_);
    b_.resize(m_);
    ub_.resize(ncol_);
    cost_ = Eigen::VectorXd::Zero(ncol_);
    for (Eigen::Index k = 0; k < n_std_; ++k) ub_[k] = col_ub[k];
    for (Eigen::Index k = n_std_; k < ncol_; ++k) ub_[k] = kInf;

    obj_offset_ = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const ColumnMap& cm = maps_[j];
        double c = p.objective[j];
        switch (cm.kind) {
            case ColumnMap::shifted: cost_[cm.col] = c; obj_offset_ += c * cm.offset; break;
            case ColumnMap::reflected: cost_[cm.col] = -c; obj_offset_ += c * cm.offset; break;
            case ColumnMap::split: cost_[cm.col] = c; cost_[cm.col2] = -c; break;
        }
    }

    row_scale_.assign(m_, 1.0);
    basis_.assign(m_, 0);
    Eigen::Index slack = n_std_;
    for (Eigen::Index i = 0; i < m_; ++i) {
        const Constraint& con = p.constraints[i];
        double rhs = con.rhs;
        for (Eigen::Index j = 0; j < n; ++j) {
            double v = con.row[j];
            if (v == 0.0) continue;
            const ColumnMap& cm = maps_[j];
            switch (cm.kind) {
                case ColumnMap::shifted: a_(i, cm.col) = v; rhs -= v * cm.offset; break;
                case ColumnMap::reflected: a_(i, cm.col) = -v; rhs -= v * cm.offset; break;
                case ColumnMap::split: a_(i, cm.col) = v; a_(i, cm.col2) = -v; break;
            }
        }
        // Equilibrate the structural part of the row; the slack keeps unit
        // coefficient so the starting basis stays the identity.
        double rmax = n_std_ > 0 ? a_.row(i).head(n_std_).cwiseAbs().maxCoeff() : 0.0;
        double scale = rmax > 0.0 ? 1.0 / rmax : 1.0;
        // A zero rhs lets either sign work; take the one giving the slack a +1.
        if (rhs < 0.0 || (rhs == 0.0 && con.rel == Relation::ge)) scale = -scale;
        a_.row(i).head(n_std_) *= scale;
        rhs *= scale;
        row_scale_[i] = scale;
        Eigen::Index slack_col = -1;
        if (con.rel != Relation::eq) {
            slack_col = slack++;
            a_(i, slack_col) = ((con.rel == Relation::le) == (scale > 0.0)) ? 1.0 : -1.0;
        }
        b_[i] = rhs;
        basis_[i] = (slack_col >= 0 && a_(i, slack_col) > 0.0) ? slack_col : ncol_ + i;
    }

    state_.assign(ncol_, VarState::at_lower);
    for (Eigen::Index i = 0; i < m_; ++i)
        if (!is_artificial(basis_[i])) state_[basis_[i]] = VarState::basic;
    // The starting basis is the identity, so the tableau is the matrix itself.
    t_ = a_;
    beta_ = b_;
}

void Tableau::compute_reduced_costs() {
    d_.resize(ncol_);
    for (Eigen::Index j = 0; j < ncol_; ++j) d_[j] = phase_cost(j);
    for (Eigen::Index i = 0; i < m_; ++i) {
        double cb = phase_cost(basis_[i]);
        if (cb != 0.0) d_.noalias() -= cb * t_.row(i).transpose();
    }
    for (Eigen::Index i = 0; i < m_; ++i)
        if (!is_artificial(basis_[i])) d_[basis_[i]] = 0.0;
}

double Tableau::phase_objective() const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) v += phase_cost(basis_[i]) * beta_[i];
    for (Eigen::Index j = 0; j < ncol_; ++j)
        if (state_[j] == VarState::at_upper) v += phase_cost(j) * ub_[j];
    return v;
}

// Rebuilds tableau, basic values and reduced costs from the original data.
bool Tableau::reinvert() {
    Eigen::MatrixXd B(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
        Eigen::Index c = basis_[i];
        if (is_artificial(c)) {
            B.col(i).setZero();
            B(c - ncol_, i) = 1.0;
        } else {
            B.col(i) = a_.col(c);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    if (!std::isfinite(lu.rcond()) || lu.rcond() < 1e-14) return false;
    Eigen::VectorXd rhs = b_;
    for (Eigen::Index j = 0; j < ncol_; ++j)
        if (state_[j] == VarState::at_upper) rhs -= ub_[j] * a_.col(j);
    beta_ = lu.solve(rhs);
    t_ = lu.solve(Eigen::MatrixXd(a_));
    compute_reduced_costs();
    return true;
}

Tableau::Outcome Tableau::iterate(double opt_tol) {
    bool bland = cfg_.pricing == Pricing::bland;
    std::size_t degenerate_run = 0;
    for (;;) {
        if (iterations_ >= cfg_.max_iterations) return Outcome::limit;
        if (phase_one_ && phase_objective() <= phase_one_stop_) return Outcome::optimal;

        // Pricing.
        Eigen::Index enter = -1;
        double best = 0.0;
        for (Eigen::Index j = 0; j < ncol_; ++j) {
            VarState s = state_[j];
            if (s == VarState::basic || ub_[j] <= 0.0 || excluded_[j]) continue;
            double dj = d_[j];
            double score = (s == VarState::at_lower) ? -dj : dj;
            if (score <= opt_tol) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (score > best) {
                best = score;
                enter = j;
            }
        }
        if (enter < 0) return Outcome::optimal;

        const double dir = state_[enter] == VarState::at_lower ? 1.0 : -1.0;

        // Ratio test; pivots are judged relative to the column's scale.
        const double ptol = cfg_.pivot_tol * std::max(1.0, t_.col(enter).cwiseAbs().maxCoeff());
        Eigen::Index leave = -1;
        double theta = kInf;
        double leave_alpha = 0.0;
        bool leave_to_upper = false;
        for (Eigen::Index i = 0; i < m_; ++i) {
            double a = dir * t_(i, enter);
            double cand;
            bool to_upper;
            if (a > ptol) {
                cand = std::max(beta_[i], 0.0) / a;
                to_upper = false;
            } else if (a < -ptol) {
                double u = basic_upper(i);
                if (!std::isfinite(u)) continue;
                cand = std::max(u - beta_[i], 0.0) / (-a);
                to_upper = true;
            } else {
                continue;
            }
            bool take = false;
            if (cand < theta - 1e-12) {
                take = true;
            } else if (cand <= theta + 1e-12 && leave >= 0) {
                take = bland ? basis_[i] < basis_[leave] : std::fabs(a) > std::fabs(leave_alpha);
            }
            if (take) {
                theta = std::min(cand, theta);
                leave = i;
                leave_alpha = a;
                leave_to_upper = to_upper;
            }
        }
        const double flip = ub_[enter];
        if (!std::isfinite(theta) && !std::isfinite(flip)) {
            // The phase-1 objective is bounded below, so this is noise.
            if (phase_one_) {
                excluded_[enter] = true;
                continue;
            }
            return Outcome::unbounded;
        }

        ++iterations_;
        auto col = t_.col(enter);
        if (flip <= theta) {
            beta_.noalias() -= (dir * flip) * col;
            state_[enter] = dir > 0 ? VarState::at_upper : VarState::at_lower;
            degenerate_run = 0;
            continue;
        }

        const double entering_value = (dir > 0 ? 0.0 : ub_[enter]) + dir * theta;
        beta_.noalias() -= (dir * theta) * col;
        Eigen::Index old = basis_[leave];
        if (!is_artificial(old)) state_[old] = leave_to_upper ? VarState::at_upper : VarState::at_lower;
        basis_[leave] = enter;
        state_[enter] = VarState::basic;
        beta_[leave] = entering_value;

        const double piv = t_(leave, enter);
        t_.row(leave) /= piv;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i == leave) continue;
            double f = t_(i, enter);
            if (f != 0.0) t_.row(i) -= f * t_.row(leave);
        }
        const double dj = d_[enter];
        if (dj != 0.0) d_.noalias() -= dj * t_.row(leave).transpose();
        t_.col(enter).setZero();
        t_(leave, enter) = 1.0;
        d_[enter] = 0.0;
        if (++since_refactor_ >= cfg_.refactor_interval) {
            since_refactor_ = 0;
            reinvert();
        }

        // Bland's rule stays on only while the objective is stalled; any
        // strict improvement rules out returning to an earlier basis.
        if (theta <= 1e-12) {
            if (++degenerate_run > cfg_.degenerate_stall) bland = true;
        } else {
            degenerate_run = 0;
            bland = cfg_.pricing == Pricing::bland;
        }
    }
}

Tableau::Outcome Tableau::run_phase(double opt_tol) {
    compute_reduced_costs();
    for (int round = 0; round < 5; ++round) {
        excluded_.assign(ncol_, false);
        Outcome o = iterate(opt_tol);
        if (o != Outcome::optimal) return o;
        // Confirm optimality on freshly factored data; resume if drift hid
        // an improving column or a bound violation.
        if (!reinvert()) return Outcome::limit;
        bool clean = true;
        for (Eigen::Index i = 0; i < m_; ++i) {
            double u = basic_upper(i);
            if (beta_[i] < -cfg_.feasibility_tol || beta_[i] > u + cfg_.feasibility_tol) clean = false;
        }
        const bool feasible_enough = phase_one_ && phase_objective() <= phase_one_stop_;
        for (Eigen::Index j = 0; j < ncol_ && clean && !feasible_enough; ++j) {
            if (state_[j] == VarState::basic || ub_[j] <= 0.0 || excluded_[j]) continue;
            double score = state_[j] == VarState::at_lower ? -d_[j] : d_[j];
            if (score > opt_tol) clean = false;
        }
        if (clean) return o;
        for (Eigen::Index i = 0; i < m_; ++i) beta_[i] = std::clamp(beta_[i], 0.0, basic_upper(i));
    }
    // Still not verifiably optimal: report numerical failure, not a result.
    return Outcome::limit;
}

SolveResult Tableau::solve(const LinearProgram& p) {
    SolveResult res;
    const double bscale = 1.0 + (m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);

    bool need_phase_one = false;
    for (Eigen::Index i = 0; i < m_; ++i)
        if (is_artificial(basis_[i])) need_phase_one = true;

    if (need_phase_one) {
        phase_one_ = true;
        phase_one_stop_ = cfg_.feasibility_tol * bscale;
        Outcome o = run_phase(cfg_.optimality_tol);
        res.iterations = iterations_;
        if (o == Outcome::limit) {
            res.status = SolveStatus::iteration_limit;
            return res;
        }
        if (phase_objective() > 1e-7 * bscale) {
            res.status = SolveStatus::infeasible;
            return res;
        }
    }
    artificial_fixed_ = true;
    phase_one_ = false;
    for (Eigen::Index i = 0; i < m_; ++i)
        if (is_artificial(basis_[i])) beta_[i] = 0.0;

    const double cscale = 1.0 + (ncol_ > 0 ? cost_.cwiseAbs().maxCoeff() : 0.0);
    Outcome o = run_phase(cfg_.optimality_tol * cscale);
    res.iterations = iterations_;
    if (o == Outcome::limit) {
        res.status = SolveStatus::iteration_limit;
        return res;
    }
    if (o == Outcome::unbounded) {
        res.status = SolveStatus::unbounded;
        return res;
    }

    // Final values from a fresh factorization of the optimal basis.
    reinvert();
    Eigen::VectorXd xs = Eigen::VectorXd::Zero(ncol_);
    for (Eigen::Index j = 0; j < ncol_; ++j)
        if (state_[j] == VarState::at_upper) xs[j] = ub_[j];
    for (Eigen::Index i = 0; i < m_; ++i)
        if (!is_artificial(basis_[i])) xs[basis_[i]] = beta_[i];
    for (Eigen::Index j = 0; j < ncol_; ++j) {
        if (xs[j] < 0.0 && xs[j] > -cfg_.bound_clamp_tol) xs[j] = 0.0;
        if (std::isfinite(ub_[j]) && xs[j] > ub_[j] && xs[j] < ub_[j] + cfg_.bound_clamp_tol) xs[j] = ub_[j];
    }

    const Eigen::Index n = p.num_vars();
    res.x.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const ColumnMap& cm = maps_[j];
        switch (cm.kind) {
            case ColumnMap::shifted: res.x[j] = cm.offset + xs[cm.col]; break;
            case ColumnMap::reflected: res.x[j] = cm.offset - xs[cm.col]; break;
            case ColumnMap::split: res.x[j] = xs[cm.col] - xs[cm.col2]; break;
        }
        res.x[j] = std::clamp(res.x[j], p.lower[j], p.upper[j]);
    }
    res.objective = p.objective.dot(res.x);

    // Row multipliers from B' y = c_B.
    Eigen::MatrixXd B(m_, m_);
    Eigen::VectorXd cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
        Eigen::Index c = basis_[i];
        if (is_artificial(c)) {
            B.col(i).setZero();
            B(c - ncol_, i) = 1.0;
            cb[i] = 0.0;
        } else {
            B.col(i) = a_.col(c);
            cb[i] = cost_[c];
        }
    }
    Eigen::VectorXd ystd = m_ > 0 ? Eigen::VectorXd(B.transpose().partialPivLu().solve(cb)) : Eigen::VectorXd();
    res.duals.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) res.duals[i] = row_scale_[i] * ystd[i];

    res.reduced_costs = p.objective;
    double dual_obj = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
        res.reduced_costs.noalias() -= res.duals[i] * p.constraints[i].row;
        dual_obj += res.duals[i] * p.constraints[i].rhs;
    }
    const double dtol = 1e-9 * cscale;
    for (Eigen::Index j = 0; j < n; ++j) {
        double dj = res.reduced_costs[j];
        if (std::fabs(dj) <= dtol) continue;
        double bound = dj > 0 ? p.lower[j] : p.upper[j];
        dual_obj += std::isfinite(bound) ? dj * bound : -kInf;
    }
    res.dual_objective = dual_obj;
    res.status = SolveStatus::optimal;
    return res;
}

}  // namespace

LinearProgram::LinearProgram(Eigen::Index n)
    : objective(Eigen::VectorXd::Zero(n)),
      lower(Eigen::VectorXd::Zero(n)),
      upper(Eigen::VectorXd::Constant(n, kInf)) {}

void LinearProgram::add_constraint(Eigen::VectorXd row, Relation rel, double rhs) {
    if (row.size() != num_vars())
        throw std::invalid_argument("LinearProgram: constraint row has wrong length");
    constraints.push_back({std::move(row), rel, rhs});
}

void LinearProgram::validate() const {
    const Eigen::Index n = num_vars();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("LinearProgram: bound vectors have wrong length");
    if (!objective.allFinite()) throw std::invalid_argument("LinearProgram: non-finite objective");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf)
            throw std::invalid_argument("LinearProgram: invalid bound");
    }
    for (const auto& c : constraints) {
        if (c.row.size() != n) throw std::invalid_argument("LinearProgram: constraint row has wrong length");
        if (!c.row.allFinite() || !std::isfinite(c.rhs))
            throw std::invalid_argument("LinearProgram: non-finite constraint data");
    }
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != n)
        throw std::invalid_argument("LinearProgram: names has wrong length");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

SolveResult solve_lp(const LinearProgram& p, const SolverConfig& cfg) {
    p.validate();
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
        if (p.lower[j] > p.upper[j]) {
            SolveResult r;
            r.status = SolveStatus::infeasible;
            return r;
        }
    }
    Tableau t(p, cfg);
    return t.solve(p);
}

namespace {

double constraint_violation(const std::vector<Constraint>& cons, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (const auto& c : cons) {
        double v = c.row.dot(x) - c.rhs;
        switch (c.rel) {
            case Relation::le: worst = std::max(worst, v); break;
            case Relation::ge: worst = std::max(worst, -v); break;
            case Relation::eq: worst = std::max(worst, std::fabs(v)); break;
        }
    }
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lo[j] - x[j]);
        worst = std::max(worst, x[j] - hi[j]);
    }
    return worst;
}

}  // namespace

double primal_residual(const LinearProgram& p, const Eigen::VectorXd& x) {
    return constraint_violation(p.constraints, p.lower, p.upper, x);
}

double primal_residual(const QuadraticProgram& p, const Eigen::VectorXd& x) {
    return constraint_violation(p.constraints, p.lower, p.upper, x);
}

}  // namespace cvarkit
