#include "cvarkit/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cvarkit/norms.hpp"
#include "cvarkit/parallel.hpp"
#include "cvarkit/rng.hpp"

namespace cvarkit {

namespace {

void check_bracket(std::size_t p, double alpha) {
    if (p < 2) throw std::invalid_argument("atom set needs p >= 2");
    const double pd = static_cast<double>(p);
    if (!(alpha > (pd - 2.0) / pd && alpha < (pd - 1.0) / pd))
        throw std::invalid_argument("alpha must lie strictly inside ((p-2)/p, (p-1)/p)");
}

std::string pattern(const std::vector<int>& signs) {
    std::string s = "b:";
    for (int v : signs) s += v > 0 ? '+' : '-';
    return s;
}

// x = u - v with u, v >= 0 in columns [0, p) and [p, 2p); at an optimum
// u_i + v_i = |x_i|, so each norm needs at most one row per coordinate.
// Extra columns follow at 2p.
Eigen::Index extra_columns(Eigen::Index p, RecoveryNorm norm) {
    switch (norm) {
        case RecoveryNorm::l1: return 0;
        case RecoveryNorm::linf: return 1;          // t
        case RecoveryNorm::cvar: return p + 1;      // c, z
    }
    return 0;
}

LinearProgram norm_lp(Eigen::Index p, RecoveryNorm norm, double alpha) {
    LinearProgram lp(2 * p + extra_columns(p, norm));
    Eigen::VectorXd row(lp.num_vars());
    switch (norm) {
        case RecoveryNorm::l1:
            lp.objective.head(2 * p).setOnes();
            break;
        case RecoveryNorm::linf:
            // u_i + v_i <= t
            lp.objective[2 * p] = 1.0;
            for (Eigen::Index i = 0; i < p; ++i) {
                row.setZero();
                row[i] = row[p + i] = 1.0;
                row[2 * p] = -1.0;
                lp.add_constraint(row, Relation::le, 0.0);
            }
            break;
        case RecoveryNorm::cvar:
            // p(1-alpha) c + sum z,  u_i + v_i - c - z_i <= 0,  z >= 0,  c free
            lp.set_free(2 * p);
            lp.objective[2 * p] = static_cast<double>(p) * (1.0 - alpha);
            for (Eigen::Index i = 0; i < p; ++i) {
                lp.objective[2 * p + 1 + i] = 1.0;
                row.setZero();
                row[i] = row[p + i] = 1.0;
                row[2 * p] = -1.0;
                row[2 * p + 1 + i] = -1.0;
                lp.add_constraint(row, Relation::le, 0.0);
            }
            break;
    }
    return lp;
}

// Adds a.x with x = u - v to a row.
void set_x(Eigen::VectorXd& row, const Eigen::VectorXd& a) {
    const Eigen::Index p = a.size();
    row.setZero();
    row.head(p) = a;
    row.segment(p, p) = -a;
}

Eigen::VectorXd get_x(const Eigen::VectorXd& sol, Eigen::Index p) { return sol.head(p) - sol.segment(p, p); }

void check_recovery_alpha(RecoveryNorm norm, double alpha) {
    if (norm == RecoveryNorm::cvar && !(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [0, 1)");
}

}  // namespace

AtomSet::AtomSet(std::size_t p, double alpha) : p_(p), alpha_(alpha) { check_bracket(p, alpha); }

std::size_t AtomSet::size() const { return 2 * p_ + (std::size_t{1} << p_); }

std::vector<Eigen::VectorXd> AtomSet::members() const {
    if (p_ > 20) throw std::invalid_argument("too many atoms to enumerate");
    const auto p = static_cast<Eigen::Index>(p_);
    std::vector<Eigen::VectorXd> out;
    for (double s : {1.0, -1.0})
        for (Eigen::Index i = 0; i < p; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
            e[i] = s;
            out.push_back(e);
        }
    for (std::size_t mask = 0; mask < (std::size_t{1} << p_); ++mask) {
        Eigen::VectorXd b(p);
        // bit set = negative entry, leading coordinate is the highest bit
        for (Eigen::Index i = 0; i < p; ++i)
            b[i] = (mask >> (p_ - 1 - static_cast<std::size_t>(i))) & 1 ? -binary_scale() : binary_scale();
        out.push_back(b);
    }
    return out;
}

bool AtomSet::contains(const Eigen::VectorXd& x, double tol) const {
    return classify_atom(x, *this, tol).kind != AtomClass::none;
}

double cvar_norm_high_alpha(std::span<const double> x, double alpha) {
    check_bracket(x.size(), alpha);
    double a = 0.0, b = 0.0;  // largest, second largest magnitude
    for (double v : x) {
        double m = std::fabs(v);
        if (m > a) {
            b = a;
            a = m;
        } else if (m > b) {
            b = m;
        }
    }
    return a + (static_cast<double>(x.size()) * (1.0 - alpha) - 1.0) * b;
}

std::string AtomClass::label() const {
    switch (kind) {
        case unit: return std::string(sign > 0 ? "+" : "-") + "e" + std::to_string(index + 1);
        case binary: return pattern(signs);
        case none: break;
    }
    return "other";
}

AtomClass classify_atom(const Eigen::VectorXd& x, const AtomSet& atoms, double tol) {
    AtomClass c;
    if (static_cast<std::size_t>(x.size()) != atoms.dimension() || !x.allFinite()) return c;
    const Eigen::Index p = x.size();
    Eigen::Index zeros = 0;
    for (Eigen::Index i = 0; i < p; ++i) zeros += std::fabs(x[i]) <= tol;
    if (zeros == p - 1) {
        Eigen::Index i = 0;
        x.cwiseAbs().maxCoeff(&i);
        if (std::fabs(std::fabs(x[i]) - 1.0) <= tol) {
            c.kind = AtomClass::unit;
            c.index = static_cast<std::size_t>(i);
            c.sign = x[i] > 0 ? 1 : -1;
        }
        return c;
    }
    if (zeros != 0) return c;
    const double s = atoms.binary_scale();
    for (Eigen::Index i = 0; i < p; ++i)
        if (std::fabs(std::fabs(x[i]) - s) > tol) return c;
    c.kind = AtomClass::binary;
    for (Eigen::Index i = 0; i < p; ++i) c.signs.push_back(x[i] > 0 ? 1 : -1);
    return c;
}

Eigen::VectorXd project_hyperplane(const Eigen::VectorXd& g, double rhs, double alpha) {
    const Eigen::Index p = g.size();
    if (p < 1 || !g.allFinite() || g.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("hyperplane normal must be finite and nonzero");
    if (!(rhs != 0.0) || !std::isfinite(rhs)) throw std::invalid_argument("hyperplane offset must be nonzero");
    check_recovery_alpha(RecoveryNorm::cvar, alpha);
    LinearProgram lp = norm_lp(p, RecoveryNorm::cvar, alpha);
    Eigen::VectorXd row(lp.num_vars());
    set_x(row, g);
    lp.add_constraint(row, Relation::eq, rhs);
    SolveResult r = solve_lp(lp);
    if (r.status != SolveStatus::optimal) throw std::runtime_error(std::string("projection LP: ") + to_string(r.status));
    Eigen::VectorXd x = get_x(r.x, p);
    std::vector<double> xv(x.data(), x.data() + p);
    return x / cvar_norm(xv, alpha).value;
}

std::vector<ProjectionCount> projection_experiment(std::size_t p, double alpha, std::size_t trials,
                                                   std::uint64_t seed, unsigned threads) {
    AtomSet atoms(p, alpha);
    std::vector<std::string> labels(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        CounterRng g(seed, "hyperplane", t);
        Eigen::VectorXd h(static_cast<Eigen::Index>(p));
        for (auto& v : h) v = g.normal();
        labels[t] = classify_atom(project_hyperplane(h, 5.0, alpha), atoms).label();
    });

    std::vector<ProjectionCount> out;
    for (const auto& a : atoms.members()) out.push_back({classify_atom(a, atoms).label(), 0, 0.0});
    out.push_back({"other", 0, 0.0});
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < out.size(); ++i) pos[out[i].label] = i;
    for (const auto& l : labels) ++out[pos.at(l)].count;
    for (auto& c : out) c.ratio = trials ? 100.0 * static_cast<double>(c.count) / static_cast<double>(trials) : 0.0;
    return out;
}

const char* to_string(RecoveryNorm n) {
    switch (n) {
        case RecoveryNorm::cvar: return "cvar";
        case RecoveryNorm::l1: return "l1";
        case RecoveryNorm::linf: return "linf";
    }
    return "?";
}

double recovery_norm(const Eigen::VectorXd& x, RecoveryNorm norm, double alpha) {
    switch (norm) {
        case RecoveryNorm::l1: return x.lpNorm<1>();
        case RecoveryNorm::linf: return x.lpNorm<Eigen::Infinity>();
        case RecoveryNorm::cvar: {
            std::vector<double> v(x.data(), x.data() + x.size());
            return cvar_norm(v, alpha).value;
        }
    }
    return 0.0;
}

RecoveryResult recover(const RecoveryInstance& inst, const Eigen::VectorXd& truth, const SolverConfig& cfg) {
    const Eigen::Index n = inst.phi.rows(), p = inst.phi.cols();
    if (n < 1 || p < 1) throw std::invalid_argument("measurement map is empty");
    if (inst.y.size() != n || truth.size() != p) throw std::invalid_argument("recovery dimension mismatch");
    if (!inst.phi.allFinite() || !inst.y.allFinite()) throw std::invalid_argument("recovery data must be finite");
    if (!(inst.delta >= 0.0) || !std::isfinite(inst.delta)) throw std::invalid_argument("noise bound must be >= 0");
    check_recovery_alpha(inst.norm, inst.alpha);

    LinearProgram lp = norm_lp(p, inst.norm, inst.alpha);
    Eigen::VectorXd row(lp.num_vars());
    const double box = inst.delta / std::sqrt(static_cast<double>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        set_x(row, inst.phi.row(k).transpose());
        if (inst.delta == 0.0) {
            lp.add_constraint(row, Relation::eq, inst.y[k]);
        } else {
            lp.add_constraint(row, Relation::le, inst.y[k] + box);
            lp.add_constraint(row, Relation::ge, inst.y[k] - box);
        }
    }
    SolveResult r = solve_lp(lp, cfg);
    if (r.status != SolveStatus::optimal) throw std::runtime_error(std::string("recovery LP: ") + to_string(r.status));

    RecoveryResult out;
    out.x_hat = get_x(r.x, p);
    out.norm_value = recovery_norm(out.x_hat, inst.norm, inst.alpha);
    out.error = (out.x_hat - truth).norm();
    out.success = out.error <= 1e-4 * std::max(1.0, truth.norm());
    return out;
}

std::string SignalSpec::label() const {
    switch (kind) {
        case sparse: return "sparse" + std::to_string(k);
        case binary_atom: return "binary";
        case mixed: return "mixed";
    }
    return "?";
}

Eigen::VectorXd make_signal(std::size_t p, const SignalSpec& spec, std::uint64_t seed, std::size_t trial) {
    if (p < 2) throw std::invalid_argument("signal dimension must be at least 2");
    CounterRng g(seed, "signal", trial);
    const auto pi = static_cast<Eigen::Index>(p);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(pi);
    auto index = [&](std::size_t bound) {
        return std::min(bound - 1, static_cast<std::size_t>(g.uniform() * static_cast<double>(bound)));
    };
    auto binary = [&] {
        const double s = 1.0 / (static_cast<double>(p) * (1.0 - spec.alpha));
        if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
        for (auto& v : x) v += g.uniform() < 0.5 ? s : -s;
    };
    switch (spec.kind) {
        case SignalSpec::sparse: {
            if (spec.k < 1 || spec.k > p) throw std::invalid_argument("sparsity must lie in [1, p]");
            std::vector<std::size_t> idx(p);
            std::iota(idx.begin(), idx.end(), 0);
            for (std::size_t i = 0; i < spec.k; ++i) {
                std::swap(idx[i], idx[i + index(p - i)]);
                x[static_cast<Eigen::Index>(idx[i])] = g.normal();
            }
            break;
        }
        case SignalSpec::binary_atom:
            binary();
            break;
        case SignalSpec::mixed: {
            binary();  // same draws as the binary signal of this trial
            std::size_t i = index(p), j = index(p - 1);
            if (j >= i) ++j;
            x[static_cast<Eigen::Index>(i)] += 1.0;
            x[static_cast<Eigen::Index>(j)] -= 1.0;
            break;
        }
    }
    return x;
}

Eigen::MatrixXd make_phi(std::size_t n, std::size_t p, std::uint64_t seed, std::size_t trial) {
    if (n < 1 || p < 1) throw std::invalid_argument("map dimensions must be positive");
    if (n >= (std::size_t{1} << 24)) throw std::invalid_argument("too many measurements");
    CounterRng g(seed, "phi", (static_cast<std::uint64_t>(trial) << 24) | n);
    const double sd = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index j = 0; j < phi.cols(); ++j) phi(i, j) = sd * g.normal();
    return phi;
}

std::vector<SweepRow> sweep(std::size_t p, const SignalSpec& signal, RecoveryNorm norm, double alpha,
                            std::span<const std::size_t> n_grid, std::size_t trials, std::uint64_t seed,
                            unsigned threads) {
    for (std::size_t n : n_grid)
        if (n < 1 || n > p) throw std::invalid_argument("measurement counts must lie in [1, p]");
    std::vector<SweepRow> rows;
    for (std::size_t n : n_grid) {
        std::atomic<std::size_t> ok{0};
        parallel_for(trials, threads, [&](std::size_t t) {
            Eigen::VectorXd truth = make_signal(p, signal, seed, t);
            RecoveryInstance inst;
            inst.phi = make_phi(n, p, seed, t);
            inst.y = inst.phi * truth;
            inst.norm = norm;
            inst.alpha = alpha;
            if (recover(inst, truth).success) ++ok;
        });
        SweepRow r{to_string(norm), signal.label(), n, trials, ok.load(), 0.0};
        r.probability = trials ? static_cast<double>(r.successes) / static_cast<double>(trials) : 0.0;
        rows.push_back(r);
    }
    return rows;
}

double isotonic_residual(std::span<const double> values) {
    // pool adjacent violators
    std::vector<double> level, weight;
    std::vector<std::size_t> len;
    for (double v : values) {
        level.push_back(v);
        weight.push_back(1.0);
        len.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const std::size_t k = level.size() - 1;
            double w = weight[k - 1] + weight[k];
            level[k - 1] = (level[k - 1] * weight[k - 1] + level[k] * weight[k]) / w;
            weight[k - 1] = w;
            len[k - 1] += len[k];
            level.pop_back();
            weight.pop_back();
            len.pop_back();
        }
    }
    double worst = 0.0;
    std::size_t i = 0;
    for (std::size_t b = 0; b < level.size(); ++b)
        for (std::size_t k = 0; k < len[b]; ++k, ++i) worst = std::max(worst, std::fabs(values[i] - level[b]));
    return worst;
}

double measurement_bound_exact(double w_squared) {
    if (!(w_squared >= 0.0) || !std::isfinite(w_squared)) throw std::invalid_argument("w^2 must be >= 0");
    return w_squared + 1.0;
}

double measurement_bound_robust(double w_squared, double eps) {
    if (!(w_squared >= 0.0) || !std::isfinite(w_squared)) throw std::invalid_argument("w^2 must be >= 0");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    return (w_squared + 1.5) / ((1.0 - eps) * (1.0 - eps));
}

double l1_bound(std::size_t p, std::size_t k) {
    if (k < 1 || k > p) throw std::invalid_argument("sparsity must lie in [1, p]");
    const double kd = static_cast<double>(k);
    return 2.0 * kd * std::log(static_cast<double>(p) / kd) + 1.25 * kd + 1.0;
}

}  // namespace cvarkit
