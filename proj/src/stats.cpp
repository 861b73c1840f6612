#include "cvarkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <stdexcept>

namespace cvarkit {

namespace {

void require_finite(std::span<const double> s, const char* what) {
    for (double v : s)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

void require_size(std::span<const double> s, std::size_t min_n, const char* what) {
    if (s.size() < min_n)
        throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min_n) +
                                    " observations");
    require_finite(s, what);
}

// Central moment of order k.
double central_moment(std::span<const double> s, int k) {
    double mu = mean(s);
    double acc = 0.0;
    for (double v : s) acc += std::pow(v - mu, k);
    return acc / static_cast<double>(s.size());
}

}  // namespace

double mean(std::span<const double> s) {
    require_size(s, 1, "mean");
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc / static_cast<double>(s.size());
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size())
        throw std::invalid_argument("weighted_mean: length mismatch");
    require_size(values, 1, "weighted_mean");
    double acc = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += values[i] * weights[i];
        wsum += weights[i];
    }
    if (wsum <= 0.0) throw std::invalid_argument("weighted_mean: weights sum to zero");
    return acc / wsum;
}

double covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("covariance: length mismatch");
    require_size(a, 2, "covariance");
    require_finite(b, "covariance");
    double ma = mean(a), mb = mean(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
    return acc / static_cast<double>(a.size());
}

double variance(std::span<const double> s) { return covariance(s, s); }

double correlation(std::span<const double> a, std::span<const double> b) {
    double va = variance(a), vb = variance(b);
    if (va <= 0.0 || vb <= 0.0) throw std::invalid_argument("correlation: constant sample");
    double r = covariance(a, b) / std::sqrt(va * vb);
    return std::clamp(r, -1.0, 1.0);
}

double skewness(std::span<const double> s) {
    require_size(s, 2, "skewness");
    double v = central_moment(s, 2);
    if (v <= 0.0) throw std::invalid_argument("skewness: constant sample");
    return central_moment(s, 3) / std::pow(v, 1.5);
}

double kurtosis(std::span<const double> s) {
    require_size(s, 2, "kurtosis");
    double v = central_moment(s, 2);
    if (v <= 0.0) throw std::invalid_argument("kurtosis: constant sample");
    return central_moment(s, 4) / (v * v);
}

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw std::invalid_argument("covariance_matrix: need at least 2 rows");
    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::MatrixXd c = (centered.transpose() * centered) / static_cast<double>(data.rows());
    return 0.5 * (c + c.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument("min_eigenvalue: matrix must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

EwmaState ewma_update_var(EwmaState state, double r_prev) {
    state.var_estimate = state.lambda * state.var_estimate + (1.0 - state.lambda) * r_prev * r_prev;
    return state;
}

EwmaState ewma_update_cov(EwmaState state, double r_a, double r_b) {
    state.cov_estimate = state.lambda * state.cov_estimate + (1.0 - state.lambda) * r_a * r_b;
    return state;
}

std::vector<double> log_returns(std::span<const double> prices) {
    if (prices.size() < 2) throw std::invalid_argument("log_returns: need at least 2 prices");
    std::vector<double> r;
    r.reserve(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        if (!(prices[t] > 0.0) || !(prices[t - 1] > 0.0))
            throw std::invalid_argument("log_returns: prices must be positive");
        r.push_back(std::log(prices[t] / prices[t - 1]));
    }
    return r;
}

Eigen::MatrixXd ewma_covariance(const Eigen::MatrixXd& returns, double lambda,
                                const Eigen::MatrixXd* initial) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("ewma_covariance: lambda must lie in (0,1)");
    const Eigen::Index n = returns.cols();
    Eigen::MatrixXd cov = initial ? *initial : Eigen::MatrixXd::Zero(n, n);
    if (cov.rows() != n || cov.cols() != n)
        throw std::invalid_argument("ewma_covariance: initial matrix has wrong shape");
    for (Eigen::Index t = 0; t < returns.rows(); ++t) {
        Eigen::VectorXd r = returns.row(t).transpose();
        cov = lambda * cov + (1.0 - lambda) * (r * r.transpose());
    }
    return cov;
}

Eigen::MatrixXd scale_horizon(const Eigen::MatrixXd& m, int n_days) {
    if (n_days < 1) throw std::invalid_argument("scale_horizon: n_days must be >= 1");
    return m * static_cast<double>(n_days);
}

}  // namespace cvarkit
