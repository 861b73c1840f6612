#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvarkit/portfolio.hpp"
#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"
#include "cvarkit/stats.hpp"

using namespace cvarkit;

namespace {

AssetUniverse scenario_one() {
    AssetUniverse u;
    u.expected_losses.resize(3);
    u.expected_losses << -0.0101110, -0.0043532, -0.0137058;
    u.covariance.resize(3, 3);
    u.covariance << 0.00324625, 0.00022983, 0.00420395,
                    0.00022983, 0.00049937, 0.00019247,
                    0.00420395, 0.00019247, 0.00764097;
    return u;
}

AssetUniverse frontier_sample() {
    AssetUniverse u;
    u.expected_losses.resize(3);
    u.expected_losses << -0.1073, -0.0737, -0.0627;
    u.covariance.resize(3, 3);
    u.covariance << 0.02778, 0.00387, 0.00021,
                    0.00387, 0.01112, -0.00020,
                    0.00021, -0.00020, 0.00115;
    return u;
}

ScenarioSet random_scenarios(CounterRng& g, Eigen::Index k, Eigen::Index n) {
    ScenarioSet s;
    s.losses.resize(k, n);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s.losses(i, j) = std::round(g.normal() * 20.0) / 10.0 - 0.1 * j;
    return s;
}

}  // namespace

TEST_SUITE("portfolio") {

TEST_CASE("minimum variance on scenario-1 data") {
    auto p = min_variance(scenario_one(), 0.011);
    CHECK(std::fabs(p.weights[0] - 0.4515) <= 0.005);
    CHECK(std::fabs(p.weights[1] - 0.1158) <= 0.005);
    CHECK(std::fabs(p.weights[2] - 0.4327) <= 0.005);
    CHECK(p.weights.sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.weights.minCoeff() >= -1e-10);
    CHECK(std::fabs(p.return_slack) <= 1e-7);
    CHECK_FALSE(p.var.has_value());
    CHECK_FALSE(p.cvar.has_value());
}

TEST_CASE("minimum variance trivial and closed-form cases") {
    AssetUniverse one;
    one.expected_losses = Eigen::VectorXd::Constant(1, -0.02);
    one.covariance = Eigen::MatrixXd::Constant(1, 1, 0.3);
    CHECK(min_variance(one, 0.01).weights[0] == doctest::Approx(1.0).epsilon(1e-12));

    AssetUniverse two;
    two.expected_losses = Eigen::VectorXd::Constant(2, -0.05);
    two.covariance = Eigen::Vector2d(0.01, 0.04).asDiagonal();
    auto p = min_variance(two, 0.01);
    CHECK(p.weights[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(p.weights[1] == doctest::Approx(0.2).epsilon(1e-9));

    CHECK_THROWS_AS(min_variance(scenario_one(), 0.02), InfeasibleModel);
    AssetUniverse bad = two;
    bad.covariance(0, 1) = 0.5;
    CHECK_THROWS_AS(min_variance(bad, 0.0), std::invalid_argument);
}

TEST_CASE("efficient frontier increments") {
    auto u = frontier_sample();
    std::vector<double> grid{0.065, 0.07, 0.095, 0.10};
    auto f = efficient_frontier(u, grid);
    REQUIRE(f.size() == 4);
    for (const auto& pt : f) CHECK(pt.feasible);
    CHECK(std::fabs((f[1].sigma - f[0].sigma) - 0.006) <= 0.002);
    CHECK(std::fabs((f[3].sigma - f[2].sigma) - 0.017) <= 0.004);

    std::vector<double> single{0.08};
    CHECK(efficient_frontier(u, single)[0].sigma == min_variance(u, 0.08).std_dev);

    std::vector<double> over{0.2};
    auto inf = efficient_frontier(u, over);
    CHECK_FALSE(inf[0].feasible);
    CHECK(std::isnan(inf[0].sigma));
}

TEST_CASE("frontier sigma is monotone beyond the global minimum") {
    auto u = frontier_sample();
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.06 + 0.001 * i);
    auto f = efficient_frontier(u, grid);
    for (std::size_t i = 1; i < f.size(); ++i) {
        REQUIRE(f[i].feasible);
        CHECK(f[i].sigma >= f[i - 1].sigma - 1e-12);
    }
}

TEST_CASE("diversification inequality") {
    CounterRng g(31, "diversification");
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 6;
        Eigen::MatrixXd a(n + 3, n);
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < n; ++j) a(i, j) = g.normal();
        Eigen::MatrixXd cov = a.transpose() * a / double(a.rows());
        Eigen::VectorXd x(n);
        for (int j = 0; j < n; ++j) x[j] = g.uniform_pos();
        x /= x.sum();
        double lhs = std::sqrt(x.dot(cov * x));
        double rhs = 0.0;
        for (int j = 0; j < n; ++j) rhs += x[j] * std::sqrt(cov(j, j));
        CHECK(lhs < rhs);
    }
}

TEST_CASE("min_cvar trivial cases") {
    ScenarioSet one_asset;
    one_asset.losses.resize(10, 1);
    for (int i = 0; i < 10; ++i) one_asset.losses(i, 0) = i + 1;
    auto p = min_cvar(one_asset, Eigen::VectorXd::Constant(1, -1.0), 0.5, 0.65);
    CHECK(p.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> l(10);
    for (int i = 0; i < 10; ++i) l[i] = i + 1;
    CHECK(std::fabs(*p.cvar - sample_cvar(l, 0.65)) <= 1e-9);

    ScenarioSet single;
    single.losses.resize(1, 3);
    single.losses << 0.5, -1.0, 2.0;
    Eigen::VectorXd r_hat(3);
    r_hat << -0.1, -0.2, -0.3;
    auto q = min_cvar(single, r_hat, 0.15, 0.9);
    double loss = single.losses.row(0).dot(q.weights);
    CHECK(std::fabs(*q.cvar - loss) <= 1e-9);
    CHECK(std::fabs(*q.var - loss) <= 1e-9);
    // Minimizing the only scenario's loss under the return floor.
    CHECK(q.weights[1] >= 0.5 - 1e-9);
    CHECK(r_hat.dot(q.weights) <= -0.15 + 1e-9);

    CHECK_THROWS_AS(min_cvar(single, r_hat, 0.5, 0.9), InfeasibleModel);
    CHECK_THROWS_AS(min_cvar(single, r_hat, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("dual-based min_cvar agrees with the primal program") {
    CounterRng g(8, "cvar-small");
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index k = 5 + trial * 3, n = 2 + trial % 4;
        ScenarioSet s = random_scenarios(g, k, n);
        Eigen::VectorXd r_hat = s.losses.colwise().mean().transpose();
        double req = -(r_hat.maxCoeff() + 0.3 * (r_hat.minCoeff() - r_hat.maxCoeff()));
        double alpha = trial % 5 == 0 ? 0.0 : 0.5 + 0.45 * g.uniform();

        auto fast = min_cvar(s, r_hat, req, alpha);
        auto primal = solve_lp(min_cvar_primal_lp(s, r_hat, req, alpha));
        REQUIRE(primal.status == SolveStatus::optimal);
        CHECK(std::fabs(*fast.cvar - primal.objective) <= 1e-9 * std::max(1.0, std::fabs(primal.objective)));

        CHECK(fast.weights.sum() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(fast.weights.minCoeff() >= -1e-10);
        CHECK(r_hat.dot(fast.weights) <= -req + 1e-9);
        auto losses = portfolio_losses(s, fast.weights);
        CHECK(std::fabs(risk_report(losses, alpha).cvar - *fast.cvar) <= 1e-7);
        CHECK(phi(DiscreteLoss::from_sample(losses), *fast.var, alpha) == doctest::Approx(*fast.cvar).epsilon(1e-9));
    }
}

TEST_CASE("min_cvar on scenario-1 Monte Carlo") {
    auto u = scenario_one();
    auto s = sample_scenarios(u, 100000, kDefaultSeed);
    auto p = min_cvar(s, u.expected_losses, 0.011, 0.95);
    CHECK(std::fabs(p.weights[0] - 0.4620) <= 0.015);
    CHECK(std::fabs(p.weights[1] - 0.1152) <= 0.015);
    CHECK(std::fabs(p.weights[2] - 0.4318) <= 0.015);
    auto mv = min_variance(u, 0.011);
    CHECK((mv.weights - p.weights).cwiseAbs().maxCoeff() <= 0.02);
    CHECK(std::fabs(risk_report(portfolio_losses(s, p.weights), 0.95).cvar - *p.cvar) <= 1e-7);
}

TEST_CASE("normal scenarios match the universe moments") {
    auto u = scenario_one();
    const std::size_t k = 100000;
    auto s = sample_scenarios(u, k, 99);
    Eigen::MatrixXd c = covariance_matrix(s.losses);
    for (Eigen::Index i = 0; i < 3; ++i) {
        double m = s.losses.col(i).mean();
        CHECK(std::fabs(m - u.expected_losses[i]) <= 4.0 * std::sqrt(u.covariance(i, i) / k));
    }
    CHECK((c - u.covariance).norm() <= 0.05 * u.covariance.norm());
}

TEST_CASE("skewed scenarios hit the requested skewness") {
    AssetUniverse u;
    u.expected_losses = Eigen::Vector2d(-0.01, -0.004);
    u.covariance = Eigen::Vector2d(0.00324625, 0.00049937).asDiagonal();
    auto s = sample_scenarios(u, 100000, 5, {ScenarioShape::skewed, 0.7, 3.0});
    for (Eigen::Index i = 0; i < 2; ++i) {
        std::vector<double> col(s.losses.col(i).data(), s.losses.col(i).data() + s.losses.rows());
        CHECK(std::fabs(skewness(col) - 0.7) <= 0.05);
        CHECK(std::fabs(mean(col) - u.expected_losses[i]) <= 4.0 * std::sqrt(u.covariance(i, i) / 1e5));
        CHECK(variance(col) == doctest::Approx(u.covariance(i, i)).epsilon(0.03));
    }
}

TEST_CASE("scenario sampling is seeded and thread-count independent") {
    auto u = scenario_one();
    auto a = sample_scenarios(u, 5000, 1, {}, 1);
    auto b = sample_scenarios(u, 5000, 1, {}, 4);
    auto c = sample_scenarios(u, 5000, 2, {}, 1);
    CHECK(a.losses == b.losses);
    CHECK(a.losses != c.losses);
    CHECK_THROWS_AS(sample_scenarios(u, 0, 1), std::invalid_argument);
    AssetUniverse bad = u;
    bad.covariance(0, 0) = -1.0;
    CHECK_THROWS_AS(sample_scenarios(bad, 10, 1), std::invalid_argument);
}

TEST_CASE("risk report") {
    std::vector<double> c(50, 0.25);
    auto r = risk_report(c, 0.95);
    CHECK(r.mean == 0.25);
    CHECK(r.var == 0.25);
    CHECK(r.cvar == 0.25);
    CHECK(r.expected_loss == 0.25);

    CounterRng g(12, "normal-report");
    std::vector<double> z(100000);
    for (double& v : z) v = g.normal();
    auto rz = risk_report(z, 0.95);
    // phi(1.6449)/0.05
    CHECK(std::fabs(rz.cvar - 2.0627) <= 0.03);
    CHECK(std::fabs(rz.var - 1.6449) <= 0.03);
    CHECK(std::fabs(rz.std_dev - 1.0) <= 0.01);
    CHECK(std::isnan(risk_report(std::vector<double>{-1.0, -2.0}, 0.5).expected_loss));
}

}
