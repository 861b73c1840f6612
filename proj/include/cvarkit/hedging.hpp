#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvarkit/solver.hpp"

namespace cvarkit {

enum class OptionKind { call, put };
enum class Side { long_position, short_position };

struct OptionQuote {
    std::string underlying;
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    double price = 0.0;  // mid price per share

    void validate() const;
};

// Payoff at expiry per share; the short side is the negation of the long side.
double payoff(OptionKind kind, Side side, double strike, double s_t);
// payoff minus premium paid (long) or plus premium received (short).
double profit(OptionKind kind, Side side, double strike, double s_t, double price);

// Signed contract counts aligned with a quote list.
struct Book {
    std::vector<double> positions;
    double spc = 100.0;  // shares per contract
};

// Underlying names in order of first appearance; column j of a price
// scenario matrix holds the terminal price of underlyings(quotes)[j].
std::vector<std::string> underlyings(std::span<const OptionQuote> quotes);

// M x Q long payoffs per share.
Eigen::MatrixXd payoff_matrix(std::span<const OptionQuote> quotes, const Eigen::MatrixXd& prices);

// Per-scenario loss = (position cost - payoff) * spc.
std::vector<double> book_loss(const Book& book, std::span<const OptionQuote> quotes, const Eigen::MatrixXd& prices);

// Zero-drift lognormal terminal prices S = s0 * exp(z), z ~ N(0, cov).
Eigen::MatrixXd simulate_prices(const Eigen::VectorXd& s0, const Eigen::MatrixXd& cov, std::size_t m,
                                std::uint64_t seed, unsigned threads = 0);

// Fraction of rows with prices(:, col) outside [lo, hi].
double band_exit_probability(const Eigen::MatrixXd& prices, Eigen::Index col, double lo, double hi);

struct HedgeProblem {
    Book book;
    Eigen::VectorXd caps;       // per quote, adjustment y must satisfy |y| <= cap
    Eigen::MatrixXd scenarios;  // M x (number of underlyings) terminal prices
    double alpha = 0.95;
};

// Per-quote caps from a per-underlying table (missing names get 0).
Eigen::VectorXd caps_by_underlying(std::span<const OptionQuote> quotes, const std::map<std::string, double>& caps);

struct HedgeReport {
    double mean_loss = 0.0;
    double min_loss = 0.0;
    double max_loss = 0.0;
    double prob_loss = 0.0;  // P(loss > 0)
    double var = 0.0;
    double cvar = 0.0;
};

HedgeReport hedge_report(std::span<const double> losses, double alpha);

struct HedgeResult {
    Eigen::VectorXd adjustments;
    HedgeReport before;
    HedgeReport after;
    double objective = 0.0;  // optimal c + 1/(M(1-alpha)) sum z
    double threshold = 0.0;  // optimal c
    std::size_t lp_iterations = 0;
};

// min_{y,c,z} c + 1/(M(1-alpha)) sum z_m  s.t.  z_m >= loss_m(x + y) - c,
// z >= 0, -cap <= y <= cap. Solved through the LP dual (Q + 1 rows); the
// adjustments are the dual's row multipliers.
HedgeResult hedge(const HedgeProblem& problem, std::span<const OptionQuote> quotes, const SolverConfig& cfg = {});

// The hedge program with explicit y, c and z columns, for cross-checks.
LinearProgram hedge_primal_lp(const HedgeProblem& problem, std::span<const OptionQuote> quotes);

}  // namespace cvarkit
