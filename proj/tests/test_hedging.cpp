#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cvarkit/hedging.hpp"
#include "cvarkit/io.hpp"
#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"

using namespace cvarkit;

namespace {

const std::string kData = CVARKIT_DATA_DIR;

Eigen::MatrixXd horizon_cov() {
    Eigen::MatrixXd c(2, 2);
    c << 0.00063528, 0.00030147, 0.00030147, 0.00052767;
    return c;
}

Eigen::VectorXd spot() {
    Eigen::VectorXd s(2);
    s << 39.73, 695.35;
    return s;
}

OptionQuote quote(const char* u, OptionKind k, double strike, double price) { return {u, k, strike, price}; }

}  // namespace

TEST_SUITE("hedging") {

TEST_CASE("payoff and profit examples") {
    CHECK(payoff(OptionKind::call, Side::long_position, 100, 120) == 20.0);
    CHECK(profit(OptionKind::call, Side::long_position, 100, 120, 5) == 15.0);
    CHECK(payoff(OptionKind::put, Side::short_position, 100, 100) == 0.0);
    CHECK(profit(OptionKind::put, Side::short_position, 100, 100, 3.25) == 3.25);
    CHECK(profit(OptionKind::put, Side::long_position, 37.5, 36, 0.08) == doctest::Approx(1.42).epsilon(1e-14));
    CHECK(payoff(OptionKind::call, Side::long_position, 100, 80) == 0.0);
    CHECK(payoff(OptionKind::put, Side::long_position, 100, 80) == 20.0);
    CHECK(profit(OptionKind::call, Side::short_position, 100, 130, 4) == -26.0);
    CHECK_THROWS_AS(payoff(OptionKind::call, Side::long_position, 100, -1), std::invalid_argument);
}

TEST_CASE("long and short payoffs cancel") {
    CounterRng g(3, "test", 0);
    for (int i = 0; i < 500; ++i) {
        double k = 1.0 + 200.0 * g.uniform();
        double s = 300.0 * g.uniform();
        for (auto kind : {OptionKind::call, OptionKind::put}) {
            CHECK(payoff(kind, Side::long_position, k, s) + payoff(kind, Side::short_position, k, s) == 0.0);
            double p = g.uniform() * 10;
            CHECK(profit(kind, Side::long_position, k, s, p) + profit(kind, Side::short_position, k, s, p) ==
                  doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("sold strangle profile") {
    // short put 37.5 at 0.08, short call 42 at 0.4, per contract
    const double kp = 37.5, kc = 42.0, pp = 0.08, pc = 0.4, spc = 100;
    auto pnl = [&](double s) {
        return spc * (profit(OptionKind::put, Side::short_position, kp, s, pp) +
                      profit(OptionKind::call, Side::short_position, kc, s, pc));
    };
    const double flat = spc * (pp + pc);
    for (double s = kp; s <= kc; s += 0.25) CHECK(pnl(s) == doctest::Approx(flat).epsilon(1e-12));
    CHECK(flat > 0.0);
    // slope -spc above the call strike, +spc below the put strike
    CHECK(pnl(kc + 3) - pnl(kc + 2) == doctest::Approx(-spc));
    CHECK(pnl(kp - 2) - pnl(kp - 3) == doctest::Approx(spc));
    CHECK(pnl(kc + 1) < flat);
    CHECK(pnl(kp - 1) < flat);
}

TEST_CASE("payoff matrix matches the scalar payoff") {
    std::vector<OptionQuote> q{quote("A", OptionKind::call, 40, 1), quote("B", OptionKind::put, 700, 9),
                               quote("A", OptionKind::put, 38, 0.5)};
    CHECK(underlyings(q) == std::vector<std::string>{"A", "B"});
    Eigen::MatrixXd s(3, 2);
    s << 42, 690, 37, 710, 40, 700;
    Eigen::MatrixXd po = payoff_matrix(q, s);
    REQUIRE(po.rows() == 3);
    REQUIRE(po.cols() == 3);
    CHECK(po(0, 0) == 2.0);
    CHECK(po(0, 1) == 10.0);
    CHECK(po(1, 2) == 1.0);
    CHECK(po(2, 0) == 0.0);

    CounterRng g(11, "test", 0);
    Eigen::MatrixXd r(50, 2);
    for (Eigen::Index m = 0; m < 50; ++m) r.row(m) << 30 + 20 * g.uniform(), 600 + 200 * g.uniform();
    po = payoff_matrix(q, r);
    for (Eigen::Index m = 0; m < 50; ++m) {
        CHECK(po(m, 0) == payoff(OptionKind::call, Side::long_position, 40, r(m, 0)));
        CHECK(po(m, 1) == payoff(OptionKind::put, Side::long_position, 700, r(m, 1)));
        CHECK(po(m, 2) == payoff(OptionKind::put, Side::long_position, 38, r(m, 0)));
    }
    Eigen::MatrixXd narrow(2, 1);
    CHECK_THROWS_AS(payoff_matrix(q, narrow), std::invalid_argument);
}

TEST_CASE("book loss basics") {
    std::vector<OptionQuote> q{quote("A", OptionKind::call, 40, 1.5)};
    Eigen::MatrixXd s(3, 1);
    s << 30, 40, 45;
    Book empty{{0.0}};
    for (double v : book_loss(empty, q, s)) CHECK(v == 0.0);
    Book one{{1.0}};
    auto l = book_loss(one, q, s);
    CHECK(l[1] == doctest::Approx(150.0));
    CHECK(l[0] == doctest::Approx(150.0));
    CHECK(l[2] == doctest::Approx(-350.0));
    Book wrong{{1.0, 2.0}};
    CHECK_THROWS_AS(book_loss(wrong, q, s), std::invalid_argument);
}

TEST_CASE("fixture book on a three-scenario grid") {
    auto q = load_option_chain_csv(kData + "/option_chain.csv");
    Book b = load_book_csv(kData + "/book.csv", q);
    Eigen::MatrixXd s(3, 2);
    s << 39.73, 695.35, 36.2, 650.0, 44.0, 742.5;
    auto l = book_loss(b, q, s);

    // spreadsheet-style: cost minus payoff, summed row by row over the book
    auto cols = underlyings(q);
    for (Eigen::Index m = 0; m < 3; ++m) {
        double total = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            if (b.positions[j] == 0.0) continue;
            double st = q[j].underlying == cols[0] ? s(m, 0) : s(m, 1);
            double po = q[j].kind == OptionKind::call ? std::max(st - q[j].strike, 0.0)
                                                      : std::max(q[j].strike - st, 0.0);
            total += b.positions[j] * 100.0 * (q[j].price - po);
        }
        CHECK(l[static_cast<std::size_t>(m)] == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("book loss is linear in positions") {
    auto q = load_option_chain_csv(kData + "/option_chain.csv");
    CounterRng g(5, "test", 0);
    Book a, b, ab;
    for (std::size_t j = 0; j < q.size(); ++j) {
        a.positions.push_back(std::round(100 * (g.uniform() - 0.5)));
        b.positions.push_back(std::round(100 * (g.uniform() - 0.5)));
        ab.positions.push_back(a.positions.back() + b.positions.back());
    }
    Eigen::MatrixXd s = simulate_prices(spot(), horizon_cov(), 200, 9);
    auto la = book_loss(a, q, s), lb = book_loss(b, q, s), lab = book_loss(ab, q, s);
    for (std::size_t m = 0; m < la.size(); ++m)
        CHECK(lab[m] == doctest::Approx(la[m] + lb[m]).epsilon(1e-10).scale(1e3));
}

TEST_CASE("simulated prices") {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd s = simulate_prices(spot(), zero, 100, 1);
    for (Eigen::Index m = 0; m < s.rows(); ++m) {
        CHECK(s(m, 0) == 39.73);
        CHECK(s(m, 1) == 695.35);
    }
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_AS(simulate_prices(spot(), bad, 10, 1), std::invalid_argument);

    Eigen::MatrixXd a = simulate_prices(spot(), horizon_cov(), 3000, 42, 1);
    Eigen::MatrixXd b = simulate_prices(spot(), horizon_cov(), 3000, 42, 4);
    CHECK(a == b);
    Eigen::MatrixXd c = simulate_prices(spot(), horizon_cov(), 3000, 43, 4);
    CHECK(a != c);
}

TEST_CASE("band exit probabilities") {
    Eigen::MatrixXd s = simulate_prices(spot(), horizon_cov(), 200000, kDefaultSeed);
    CHECK(std::fabs(band_exit_probability(s, 0, 37.5, 42.5) - 0.016) <= 0.005);
    CHECK(std::fabs(band_exit_probability(s, 1, 665.0, 730.0) - 0.044) <= 0.007);
    Eigen::MatrixXd empty(0, 2);
    CHECK_THROWS_AS(band_exit_probability(empty, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("hedge report") {
    std::vector<double> l{-2, -1, 0, 3, 5};
    auto r = hedge_report(l, 0.6);
    CHECK(r.mean_loss == doctest::Approx(1.0));
    CHECK(r.min_loss == -2.0);
    CHECK(r.max_loss == 5.0);
    CHECK(r.prob_loss == doctest::Approx(0.4));
    CHECK(r.var == 0.0);
    CHECK(r.cvar == doctest::Approx(4.0));
}

TEST_CASE("zero caps leave the book unchanged") {
    auto q = load_option_chain_csv(kData + "/option_chain.csv");
    HedgeProblem p;
    p.book = load_book_csv(kData + "/book.csv", q);
    p.caps = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q.size()));
    p.scenarios = simulate_prices(spot(), horizon_cov(), 300, 2);
    auto r = hedge(p, q);
    CHECK(r.adjustments.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.before.cvar == r.after.cvar);
    CHECK(r.before.mean_loss == r.after.mean_loss);
    CHECK(r.objective == doctest::Approx(r.before.cvar).epsilon(1e-9).scale(1e4));
}

TEST_CASE("single option hedge solved by hand") {
    // loss per contract: +500 at S=90, -1500 at S=120; book holds one contract.
    std::vector<OptionQuote> q{quote("A", OptionKind::call, 100, 5)};
    HedgeProblem p;
    p.book.positions = {1.0};
    p.caps = Eigen::VectorXd::Ones(1);
    p.scenarios.resize(2, 1);
    p.scenarios << 90, 120;

    // alpha = 0.25: CVaR = (1 + y)(2/3 * 500 - 1/3 * 1500), minimized at y = 1.
    p.alpha = 0.25;
    auto r = hedge(p, q);
    CHECK(r.adjustments[0] == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(-1000.0 / 3.0));
    CHECK(r.after.cvar == doctest::Approx(-1000.0 / 3.0));
    CHECK(r.before.cvar == doctest::Approx(-500.0 / 3.0));

    // alpha = 0.75: CVaR = max loss = 500 (1 + y), minimized at y = -1.
    p.alpha = 0.75;
    r = hedge(p, q);
    CHECK(r.adjustments[0] == doctest::Approx(-1.0));
    CHECK(r.objective == doctest::Approx(0.0).scale(1.0));
    CHECK(r.after.cvar == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("hedge agrees with the explicit primal program") {
    auto q = load_option_chain_csv(kData + "/option_chain.csv");
    HedgeProblem p;
    p.book = load_book_csv(kData + "/book.csv", q);
    p.caps = caps_by_underlying(q, {{"Yahoo", 50.0}, {"Google", 5.0}});
    for (int seed : {1, 2, 3}) {
        p.scenarios = simulate_prices(spot(), horizon_cov(), 400, static_cast<std::uint64_t>(seed));
        auto r = hedge(p, q);
        SolveResult primal = solve_lp(hedge_primal_lp(p, q));
        REQUIRE(primal.status == SolveStatus::optimal);
        CHECK(r.objective == doctest::Approx(primal.objective).epsilon(1e-9).scale(1e4));
        // the dual's multipliers form a feasible adjustment with the same CVaR
        CHECK(r.after.cvar == doctest::Approx(primal.objective).epsilon(1e-8).scale(1e4));
        CHECK((r.adjustments.cwiseAbs() - p.caps).maxCoeff() <= 1e-9);
        CHECK(r.after.cvar <= r.before.cvar + 1e-7);
    }
}

TEST_CASE("hedging never increases CVaR on random books") {
    std::vector<OptionQuote> q{quote("A", OptionKind::call, 40, 1.2), quote("A", OptionKind::put, 39, 0.9),
                               quote("B", OptionKind::call, 700, 12), quote("B", OptionKind::put, 690, 10)};
    CounterRng g(77, "test", 0);
    for (int t = 0; t < 10; ++t) {
        HedgeProblem p;
        for (int j = 0; j < 4; ++j) p.book.positions.push_back(std::round(200 * (g.uniform() - 0.5)));
        p.caps = Eigen::VectorXd::Constant(4, 10.0 * g.uniform());
        p.scenarios = simulate_prices(spot(), horizon_cov(), 150, static_cast<std::uint64_t>(100 + t));
        p.alpha = 0.9;
        auto r = hedge(p, q);
        CHECK(r.after.cvar <= r.before.cvar + 1e-7);
        CHECK(r.objective == doctest::Approx(r.after.cvar).epsilon(1e-8).scale(1e3));
    }
}

TEST_CASE("caps by underlying and input checks") {
    std::vector<OptionQuote> q{quote("A", OptionKind::call, 40, 1), quote("B", OptionKind::put, 700, 9)};
    Eigen::VectorXd c = caps_by_underlying(q, {{"A", 50.0}});
    CHECK(c[0] == 50.0);
    CHECK(c[1] == 0.0);
    HedgeProblem p;
    p.book.positions = {1.0, 1.0};
    p.caps = Eigen::VectorXd::Constant(2, -1.0);
    p.scenarios = Eigen::MatrixXd::Constant(3, 2, 40.0);
    CHECK_THROWS_AS(hedge(p, q), std::invalid_argument);
    p.caps.setOnes();
    p.alpha = 1.0;
    CHECK_THROWS_AS(hedge(p, q), std::invalid_argument);
    OptionQuote neg{"A", OptionKind::call, -1, 1};
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
