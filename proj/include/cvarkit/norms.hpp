#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cvarkit {

// alpha_j = j/n grid position of an evaluation. `on_grid` marks alpha == j/n
// exactly; otherwise alpha lies strictly inside (j/n, (j+1)/n). `top` marks
// the max-|x_i| branch alpha >= (n-1)/n.
struct NormBreakdown {
    double value = 0.0;
    std::size_t j = 0;
    bool on_grid = false;
    bool top = false;
    // mu (scaled norm) or lambda (non-scaled norm): weight on the value at j/n
    double weight = 1.0;
};

// Scaled CVaR norm, alpha in [0, 1].
NormBreakdown scaled_cvar_norm(std::span<const double> x, double alpha);
// CVaR norm n(1 - alpha) * scaled, alpha in [0, 1).
NormBreakdown cvar_norm(std::span<const double> x, double alpha);

enum class LpMethod { simplex, candidates };

// min_c c + 1/(n(1-alpha)) sum (|x_i| - c)^+ ; alpha = 1 gives max |x_i|.
double scaled_cvar_norm_lp(std::span<const double> x, double alpha, LpMethod method = LpMethod::simplex);
// min_c n(1-alpha) c + sum (|x_i| - c)^+
double cvar_norm_lp(std::span<const double> x, double alpha, LpMethod method = LpMethod::simplex);

// Greedy continuous knapsack: the kappa = n(1-alpha) largest magnitudes,
// the last one fractionally.
double cvar_norm_knapsack(std::span<const double> x, double alpha);

// max over |S| = floor(kappa) and t outside S of sum_S |x_i| + (kappa - floor(kappa)) |x_t|,
// kappa in [1, n].
double d_norm(std::span<const double> x, double kappa);

struct BenchmarkRow {
    std::string algo;  // component, lp, knapsack, dnorm
    std::size_t n = 0;
    double alpha = 0.0;
    double ms = 0.0;  // median over reps, after one warm-up run
};

// Times the non-scaled norm on a seeded random vector per n. LP rows are
// only produced for n <= lp_max_n. reps = 0 gives an empty table.
std::vector<BenchmarkRow> benchmark_norms(std::span<const std::size_t> dims, std::span<const double> alphas,
                                          std::size_t reps, std::uint64_t seed, std::size_t lp_max_n = 2000);

}  // namespace cvarkit
