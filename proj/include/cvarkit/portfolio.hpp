#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cvarkit/solver.hpp"

namespace cvarkit {

// Thrown when a model has no feasible point (CLI exit code 2).
class InfeasibleModel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expected losses (negative = profit) and covariance of N assets.
struct AssetUniverse {
    Eigen::VectorXd expected_losses;
    Eigen::MatrixXd covariance;

    void validate() const;
    Eigen::Index size() const { return expected_losses.size(); }
};

// K equally weighted loss scenarios (rows) over N assets (columns).
struct ScenarioSet {
    Eigen::MatrixXd losses;
};

struct OptimalPortfolio {
    Eigen::VectorXd weights;
    std::optional<double> var;   // c* of the CVaR program
    std::optional<double> cvar;  // optimal objective of the CVaR program
    double std_dev = 0.0;
    // Slack of x . r_hat <= -R at the solution (0 when binding).
    double return_slack = 0.0;
};

// min x'Σx s.t. Σx = 1, x >= 0, x . r_hat <= -R.
OptimalPortfolio min_variance(const AssetUniverse& u, double required_return,
                              const SolverConfig& cfg = {});

// Rockafellar-Uryasev program:
//   min c + 1/(K(1-alpha)) Σ z_k
//   s.t. z_k >= r_k . x - c, z_k >= 0, Σx = 1, x >= 0, x . r_hat <= -R.
// The program carries one row per scenario; it is solved through its LP dual,
// which has N + 1 rows, and the primal (x, c) is read off the dual's row
// multipliers.
OptimalPortfolio min_cvar(const ScenarioSet& s, const Eigen::VectorXd& expected_losses,
                          double required_return, double alpha, const SolverConfig& cfg = {});

// The primal program exactly as stated above (variables x, c, z), for
// cross-checking on small scenario sets.
LinearProgram min_cvar_primal_lp(const ScenarioSet& s, const Eigen::VectorXd& expected_losses,
                                 double required_return, double alpha);

struct FrontierPoint {
    double required_return = 0.0;
    double sigma = 0.0;
    bool feasible = false;
};

std::vector<FrontierPoint> efficient_frontier(const AssetUniverse& u, std::span<const double> returns,
                                              const SolverConfig& cfg = {});

struct ScenarioShape {
    enum Kind { normal, skewed } kind = normal;
    double skew = 0.0;
    // Accepted for interface symmetry; the gamma generator implies
    // kurtosis 3 + 1.5 skew^2 rather than honouring this value.
    double kurtosis = 3.0;
};

// Normal: correlated draws via Cholesky of Σ. Skewed: independent per-asset
// shifted gamma matched to (mean, variance, skew).
ScenarioSet sample_scenarios(const AssetUniverse& u, std::size_t k, std::uint64_t seed,
                             const ScenarioShape& shape = {}, unsigned threads = 0);

struct RiskReport {
    double mean = 0.0;
    double std_dev = 0.0;
    double expected_loss = 0.0;  // NaN when no loss is non-negative
    double var = 0.0;
    double cvar = 0.0;
};

RiskReport risk_report(std::span<const double> portfolio_losses, double alpha);

// Per-scenario portfolio losses s.losses * w.
std::vector<double> portfolio_losses(const ScenarioSet& s, const Eigen::VectorXd& w);

}  // namespace cvarkit
