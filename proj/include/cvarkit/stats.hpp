#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvarkit {

// All moments use the population (1/n) denominator: a sample is treated as
// an equally weighted discrete distribution.
double mean(std::span<const double> s);
double weighted_mean(std::span<const double> values, std::span<const double> weights);
double variance(std::span<const double> s);
double covariance(std::span<const double> a, std::span<const double> b);
double correlation(std::span<const double> a, std::span<const double> b);
double skewness(std::span<const double> s);
double kurtosis(std::span<const double> s);

// Population covariance matrix of the columns of `data` (rows = observations).
Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& data);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

struct EwmaState {
    double lambda = 0.94;
    double var_estimate = 0.0;
    double cov_estimate = 0.0;
};

// Var_t = lambda * Var_{t-1} + (1 - lambda) * r_{t-1}^2
EwmaState ewma_update_var(EwmaState state, double r_prev);
// Cov_t = lambda * Cov_{t-1} + (1 - lambda) * r_a * r_b
EwmaState ewma_update_cov(EwmaState state, double r_a, double r_b);

// ln(P_t / P_{t-1}) for consecutive prices.
std::vector<double> log_returns(std::span<const double> prices);

// EWMA covariance matrix after consuming every row of `returns`
// (rows = days, columns = assets), starting from a zero matrix.
Eigen::MatrixXd ewma_covariance(const Eigen::MatrixXd& returns, double lambda = 0.94,
                                const Eigen::MatrixXd* initial = nullptr);

// n-day covariance from a one-day estimate: entrywise multiplication by n.
Eigen::MatrixXd scale_horizon(const Eigen::MatrixXd& m, int n_days);

}  // namespace cvarkit
