#include "cvarkit/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cvarkit/parallel.hpp"
#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"
#include "cvarkit/stats.hpp"

namespace cvarkit {

namespace {

void clamp_weights(Eigen::VectorXd& w) {
    for (double& v : w)
        if (v < 0.0 && v >= -1e-10) v = 0.0;
}

double portfolio_sigma(const Eigen::MatrixXd& cov, const Eigen::VectorXd& w) {
    return std::sqrt(std::max(0.0, w.dot(cov * w)));
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
}

void check_scenarios(const ScenarioSet& s, const Eigen::VectorXd& r_hat) {
    if (s.losses.rows() < 1) throw std::invalid_argument("scenario set is empty");
    if (s.losses.cols() != r_hat.size()) throw std::invalid_argument("scenario/asset dimension mismatch");
    if (!s.losses.allFinite()) throw std::invalid_argument("scenario losses must be finite");
}

// Lower-triangular factor with L L' = cov. Cholesky when cov is positive
// definite, otherwise a symmetric square root of the PSD matrix.
Eigen::MatrixXd factor(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double sample_std(std::span<const double> v) { return v.size() < 2 ? 0.0 : std::sqrt(variance(v)); }

}  // namespace

void AssetUniverse::validate() const {
    const Eigen::Index n = expected_losses.size();
    if (n < 1) throw std::invalid_argument("universe has no assets");
    if (covariance.rows() != n || covariance.cols() != n)
        throw std::invalid_argument("covariance dimension does not match expected losses");
    if (!expected_losses.allFinite() || !covariance.allFinite())
        throw std::invalid_argument("universe data must be finite");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("covariance is not symmetric");
    if (min_eigenvalue(covariance) < -1e-12 * scale) throw std::invalid_argument("covariance is not PSD");
}

OptimalPortfolio min_variance(const AssetUniverse& u, double required_return, const SolverConfig& cfg) {
    u.validate();
    const Eigen::Index n = u.size();
    QuadraticProgram qp(n);
    qp.hessian = 2.0 * u.covariance;
    qp.add_constraint(Eigen::VectorXd::Ones(n), Relation::eq, 1.0);
    if (std::isfinite(required_return)) qp.add_constraint(u.expected_losses, Relation::le, -required_return);
    SolveResult r = solve_qp(qp, cfg);
    if (r.status == SolveStatus::infeasible)
        throw InfeasibleModel("required return exceeds every attainable expected return");
    if (r.status != SolveStatus::optimal)
        throw std::runtime_error(std::string("min_variance: ") + to_string(r.status));
    OptimalPortfolio out;
    out.weights = r.x;
    clamp_weights(out.weights);
    out.std_dev = portfolio_sigma(u.covariance, out.weights);
    out.return_slack = std::isfinite(required_return) ? -required_return - out.weights.dot(u.expected_losses) : kInf;
    return out;
}

OptimalPortfolio min_cvar(const ScenarioSet& s, const Eigen::VectorXd& expected_losses, double required_return,
                          double alpha, const SolverConfig& cfg) {
    check_alpha(alpha);
    check_scenarios(s, expected_losses);
    const Eigen::Index k = s.losses.rows(), n = s.losses.cols();
    const bool has_return = std::isfinite(required_return);
    const double cap = 1.0 / (static_cast<double>(k) * (1.0 - alpha));

    // Dual variables: pi_1..pi_K in [0, cap], rho >= 0 (return row), nu free
    // (budget row).  max nu + R rho  s.t.  sum pi = 1,
    //   -sum_k r_ki pi_k + nu - r_hat_i rho <= 0  for every asset i.
    const Eigen::Index nv = k + 2, rho = k, nu = k + 1;
    LinearProgram lp(nv);
    lp.upper.head(k).setConstant(cap);
    lp.set_free(nu);
    lp.objective[nu] = -1.0;
    if (has_return)
        lp.objective[rho] = -required_return;
    else
        lp.upper[rho] = 0.0;

    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(k).setOnes();
    lp.add_constraint(row, Relation::eq, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        row.head(k) = -s.losses.col(i);
        row[rho] = -expected_losses[i];
        row[nu] = 1.0;
        lp.add_constraint(row, Relation::le, 0.0);
    }

    SolveResult r = solve_lp(lp, cfg);
    if (r.status == SolveStatus::unbounded)
        throw InfeasibleModel("required return exceeds every attainable expected return");
    if (r.status != SolveStatus::optimal) throw std::runtime_error(std::string("min_cvar: ") + to_string(r.status));

    OptimalPortfolio out;
    out.weights = -r.duals.tail(n);
    clamp_weights(out.weights);
    out.var = -r.duals[0];
    out.cvar = -r.objective;
    out.std_dev = sample_std(portfolio_losses(s, out.weights));
    out.return_slack = has_return ? -required_return - out.weights.dot(expected_losses) : kInf;
    return out;
}

LinearProgram min_cvar_primal_lp(const ScenarioSet& s, const Eigen::VectorXd& expected_losses,
                                 double required_return, double alpha) {
    check_alpha(alpha);
    check_scenarios(s, expected_losses);
    const Eigen::Index k = s.losses.rows(), n = s.losses.cols();
    const Eigen::Index c = n, nv = n + 1 + k;
    LinearProgram lp(nv);
    lp.set_free(c);
    lp.objective[c] = 1.0;
    lp.objective.tail(k).setConstant(1.0 / (static_cast<double>(k) * (1.0 - alpha)));
    for (Eigen::Index j = 0; j < n; ++j) lp.names.push_back("x" + std::to_string(j + 1));
    lp.names.push_back("c");
    for (Eigen::Index j = 0; j < k; ++j) lp.names.push_back("z" + std::to_string(j + 1));

    Eigen::VectorXd row(nv);
    for (Eigen::Index j = 0; j < k; ++j) {
        row.setZero();
        row.head(n) = -s.losses.row(j).transpose();
        row[c] = 1.0;
        row[n + 1 + j] = 1.0;
        lp.add_constraint(row, Relation::ge, 0.0);
    }
    row.setZero();
    row.head(n).setOnes();
    lp.add_constraint(row, Relation::eq, 1.0);
    if (std::isfinite(required_return)) {
        row.setZero();
        row.head(n) = expected_losses;
        lp.add_constraint(row, Relation::le, -required_return);
    }
    return lp;
}

std::vector<FrontierPoint> efficient_frontier(const AssetUniverse& u, std::span<const double> returns,
                                              const SolverConfig& cfg) {
    u.validate();
    std::vector<FrontierPoint> out(returns.size());
    parallel_for(returns.size(), 0, [&](std::size_t i) {
        out[i].required_return = returns[i];
        try {
            out[i].sigma = min_variance(u, returns[i], cfg).std_dev;
            out[i].feasible = true;
        } catch (const InfeasibleModel&) {
            out[i].sigma = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return out;
}

ScenarioSet sample_scenarios(const AssetUniverse& u, std::size_t k, std::uint64_t seed,
                             const ScenarioShape& shape, unsigned threads) {
    if (k < 1) throw std::invalid_argument("need at least one scenario");
    u.validate();
    const Eigen::Index n = u.size();
    ScenarioSet s;
    s.losses.resize(static_cast<Eigen::Index>(k), n);

    const bool skewed = shape.kind == ScenarioShape::skewed && shape.skew != 0.0;
    const Eigen::MatrixXd l = skewed ? Eigen::MatrixXd() : factor(u.covariance);
    const double gshape = skewed ? 4.0 / (shape.skew * shape.skew) : 0.0;
    const double sgn = shape.skew < 0.0 ? -1.0 : 1.0;
    const Eigen::VectorXd sd = u.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();

    constexpr std::size_t block = 1024;
    const std::size_t nblocks = (k + block - 1) / block;
    parallel_for(nblocks, threads, [&](std::size_t b) {
        Eigen::VectorXd z(n);
        for (std::size_t row = b * block; row < std::min(k, (b + 1) * block); ++row) {
            CounterRng g(seed, "scenarios", row);
            const auto r = static_cast<Eigen::Index>(row);
            if (skewed) {
                // (G - k)/sqrt(k) for G ~ Gamma(k) has zero mean, unit
                // variance and skewness 2/sqrt(k).
                for (Eigen::Index i = 0; i < n; ++i) {
                    double e = (g.gamma(gshape) - gshape) / std::sqrt(gshape);
                    s.losses(r, i) = u.expected_losses[i] + sgn * sd[i] * e;
                }
            } else {
                for (Eigen::Index i = 0; i < n; ++i) z[i] = g.normal();
                s.losses.row(r) = (u.expected_losses + l * z).transpose();
            }
        }
    });
    return s;
}

std::vector<double> portfolio_losses(const ScenarioSet& s, const Eigen::VectorXd& w) {
    if (s.losses.cols() != w.size()) throw std::invalid_argument("weight/asset dimension mismatch");
    Eigen::VectorXd v = s.losses * w;
    return {v.data(), v.data() + v.size()};
}

RiskReport risk_report(std::span<const double> portfolio_losses, double alpha) {
    if (portfolio_losses.empty()) throw std::invalid_argument("empty loss sample");
    RiskReport r;
    r.mean = mean(portfolio_losses);
    r.std_dev = sample_std(portfolio_losses);
    auto d = DiscreteLoss::from_sample(portfolio_losses);
    try {
        r.expected_loss = expected_loss(d);
    } catch (const std::domain_error&) {
        r.expected_loss = std::numeric_limits<double>::quiet_NaN();
    }
    auto t = cvar_convex_combination(d, alpha);
    r.var = t.var;
    r.cvar = t.cvar;
    return r;
}

}  // namespace cvarkit
