#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvarkit/solver.hpp"

namespace cvarkit {

// {±e_i} together with the scaled sign vectors b / (p (1 - alpha)), for
// (p-2)/p < alpha < (p-1)/p. Every member has CVaR norm 1.
class AtomSet {
public:
    AtomSet(std::size_t p, double alpha);

    std::size_t dimension() const { return p_; }
    double alpha() const { return alpha_; }
    double binary_scale() const { return 1.0 / (static_cast<double>(p_) * (1.0 - alpha_)); }
    std::size_t size() const;  // 2p + 2^p
    // Every member; only sensible for small p.
    std::vector<Eigen::VectorXd> members() const;
    // Membership within L_inf distance tol, without enumerating.
    bool contains(const Eigen::VectorXd& x, double tol = 1e-6) const;

private:
    std::size_t p_;
    double alpha_;
};

// Explicit norm |x_(p)| + (p (1 - alpha) - 1) |x_(p-1)| on the atom bracket.
double cvar_norm_high_alpha(std::span<const double> x, double alpha);

struct AtomClass {
    enum Kind { unit, binary, none } kind = none;
    std::size_t index = 0;        // unit: position of the nonzero entry
    int sign = 0;                 // unit: sign of that entry
    std::vector<int> signs;       // binary: sign pattern
    std::string label() const;    // "+e1", "b:++-+", "other"
};

// Nearest atom within L_inf distance tol, decided from the count of
// near-zero entries.
AtomClass classify_atom(const Eigen::VectorXd& x, const AtomSet& atoms, double tol = 1e-6);

// argmin C_alpha(x) s.t. g'x = rhs, normalized to C_alpha(x) = 1.
Eigen::VectorXd project_hyperplane(const Eigen::VectorXd& g, double rhs, double alpha);

struct ProjectionCount {
    std::string label;
    std::size_t count = 0;
    double ratio = 0.0;  // percent of trials
};

// Projects `trials` seeded Gaussian hyperplanes g'x = 5 in R^p and tallies
// the atoms hit. Rows: +e1..+ep, -e1..-ep, every sign pattern, then "other".
std::vector<ProjectionCount> projection_experiment(std::size_t p, double alpha, std::size_t trials,
                                                   std::uint64_t seed, unsigned threads = 0);

enum class RecoveryNorm { cvar, l1, linf };

const char* to_string(RecoveryNorm n);

struct RecoveryInstance {
    Eigen::MatrixXd phi;  // n x p
    Eigen::VectorXd y;
    RecoveryNorm norm = RecoveryNorm::l1;
    double alpha = 0.0;  // cvar only
    // > 0 selects the robust program. The ball ||y - phi x||_2 <= delta is
    // replaced by the inscribed box |y - phi x|_i <= delta / sqrt(n).
    double delta = 0.0;
};

struct RecoveryResult {
    Eigen::VectorXd x_hat;
    double norm_value = 0.0;
    bool success = false;
    double error = 0.0;  // ||x_hat - x*||_2
};

// Solves the norm-minimization LP; success is ||x_hat - x*||_2 <= 1e-4 max(1, ||x*||_2).
RecoveryResult recover(const RecoveryInstance& inst, const Eigen::VectorXd& truth, const SolverConfig& cfg = {});

// Norm value used by `recover` for the objective.
double recovery_norm(const Eigen::VectorXd& x, RecoveryNorm norm, double alpha);

struct SignalSpec {
    enum Kind { sparse, binary_atom, mixed } kind = sparse;
    std::size_t k = 1;   // sparse: number of nonzeros
    double alpha = 0.0;  // binary scale 1/(p (1 - alpha)) for binary and mixed
    std::string label() const;  // "sparse3", "binary", "mixed"
};

// Seeded signal for a trial: sparse has Gaussian values on a random support;
// mixed is +e_i - e_j + a scaled binary atom.
Eigen::VectorXd make_signal(std::size_t p, const SignalSpec& spec, std::uint64_t seed, std::size_t trial);
// Gaussian n x p map, variance 1/n, seeded by (trial, n) only.
Eigen::MatrixXd make_phi(std::size_t n, std::size_t p, std::uint64_t seed, std::size_t trial);

struct SweepRow {
    std::string norm;
    std::string signal;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double probability = 0.0;
};

// Empirical exact-recovery probability per n. Signals and maps depend only on
// (seed, trial, n), so different norms see identical instances.
std::vector<SweepRow> sweep(std::size_t p, const SignalSpec& signal, RecoveryNorm norm, double alpha,
                            std::span<const std::size_t> n_grid, std::size_t trials, std::uint64_t seed,
                            unsigned threads = 0);

// Largest absolute residual of the isotonic (nondecreasing) least-squares fit.
double isotonic_residual(std::span<const double> values);

// Measurements needed given the squared Gaussian width: w^2 + 1 (exact), or
// (w^2 + 3/2) / (1 - eps)^2 (robust, 0 < eps < 1).
double measurement_bound_exact(double w_squared);
double measurement_bound_robust(double w_squared, double eps);
// 2 k ln(p/k) + 5k/4 + 1 for k-sparse recovery with L1, 1 <= k <= p.
double l1_bound(std::size_t p, std::size_t k);

}  // namespace cvarkit
