#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"

using namespace cvarkit;

namespace {

DiscreteLoss golden_loss() {
    return DiscreteLoss({100, 200, 400, 800, 900, 1000}, {0.1, 0.2, 0.5, 0.18, 0.01, 0.01});
}

DiscreteLoss random_loss(CounterRng& g, int n) {
    std::vector<double> x(n), p(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        // Coarse grid so that ties occur now and then.
        x[i] = std::floor(g.uniform() * 40.0) * 2.5 - 30.0;
        p[i] = g.uniform() + 1e-3;
        total += p[i];
    }
    for (double& v : p) v /= total;
    double s = 0.0;
    for (int i = 0; i + 1 < n; ++i) s += p[i];
    p[n - 1] = 1.0 - s;
    return DiscreteLoss(x, p);
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("construction merges ties and validates") {
    DiscreteLoss d({3, 1, 3, 2}, {0.25, 0.25, 0.25, 0.25});
    REQUIRE(d.size() == 3);
    CHECK(d.outcomes() == std::vector<double>{1, 2, 3});
    CHECK(d.probs()[2] == 0.5);
    CHECK_THROWS_AS(DiscreteLoss({1, 2}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteLoss({1, 2}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteLoss({1, 2}, {1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteLoss({}, {}), std::invalid_argument);
}

TEST_CASE("var_at") {
    CHECK(var_at(golden_loss(), 0.95) == 800.0);
    DiscreteLoss one({100}, {1.0});
    CHECK(var_at(one, 0.3) == 100.0);
    CHECK(var_at(one, 0.99) == 100.0);
    DiscreteLoss three({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(var_at(three, 0.5) == 2.0);
    CHECK_THROWS_AS(var_at(three, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(var_at(three, 0.0), std::invalid_argument);
}

TEST_CASE("cvar_plus") {
    CHECK(cvar_plus(golden_loss(), 0.95) == doctest::Approx(950.0).epsilon(1e-14));
    DiscreteLoss two_up({0, 5, 9}, {0.6, 0.2, 0.2});
    CHECK(cvar_plus(two_up, 0.5) == doctest::Approx(7.0));
    std::vector<double> x(10), p(10, 0.1);
    for (int i = 0; i < 10; ++i) x[i] = i + 1;
    CHECK(cvar_plus(DiscreteLoss(x, p), 0.5) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK_THROWS_AS(cvar_plus(DiscreteLoss({100}, {1.0}), 0.5), NoStrictTail);
}

TEST_CASE("convex combination formula") {
    auto t = cvar_convex_combination(golden_loss(), 0.95);
    CHECK(t.var == 800.0);
    CHECK(t.lambda == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(t.cvar_plus == doctest::Approx(950.0).epsilon(1e-14));
    CHECK(std::fabs(t.cvar - 860.0) <= 1e-9);

    DiscreteLoss a({1000, 0}, {0.04, 0.96});
    auto ta = cvar_convex_combination(a, 0.95);
    CHECK(ta.var == 0.0);
    CHECK(ta.lambda == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ta.cvar_plus == 1000.0);
    CHECK(std::fabs(ta.cvar - 800.0) <= 1e-9);

    auto single = cvar_convex_combination(DiscreteLoss({42}, {1.0}), 0.7);
    CHECK(single.var == 42.0);
    CHECK(single.cvar == 42.0);
    CHECK(single.lambda == 1.0);

    CHECK(cvar_convex_combination(golden_loss(), 0.0).cvar == doctest::Approx(413.0).epsilon(1e-14));
    CHECK(cvar_convex_combination(golden_loss(), 1.0, true).cvar == 1000.0);
    CHECK_THROWS_AS(cvar_convex_combination(golden_loss(), 1.0), std::invalid_argument);
}

TEST_CASE("phi function") {
    CHECK(std::fabs(phi(golden_loss(), 800, 0.95) - 860.0) <= 1e-9);
    CHECK(phi(golden_loss(), 5000, 0.95) == 5000.0);
    CHECK(phi(golden_loss(), 0, 0.0) == doctest::Approx(413.0).epsilon(1e-14));
    auto t = cvar_via_phi(golden_loss(), 0.95);
    CHECK(t.var == 800.0);
    CHECK(std::fabs(t.cvar - 860.0) <= 1e-9);
    auto s = cvar_via_phi(DiscreteLoss({7}, {1.0}), 0.5);
    CHECK(s.var == 7.0);
    CHECK(s.cvar == 7.0);
}

TEST_CASE("acerbi integral") {
    CHECK(acerbi_cvar([](double b) { return 100.0 * b; }, 0.9, 1000) == doctest::Approx(95.0).epsilon(1e-13));
    for (double a : {0.0, 0.3, 0.5, 0.99})
        CHECK(acerbi_cvar([](double b) { return 100.0 * b; }, a, 17) ==
              doctest::Approx(50.0 * (1.0 + a)).epsilon(1e-13));
    CHECK(std::fabs(acerbi_cvar(golden_loss(), 0.95) - 860.0) <= 1e-9);
    CHECK_THROWS_AS(acerbi_cvar([](double b) { return b; }, 0.5, 0), std::invalid_argument);
}

TEST_CASE("generalized tail cdf") {
    auto d = golden_loss();
    CHECK(generalized_tail_cdf(d, 0.95, 700) == 0.0);
    CHECK(generalized_tail_cdf(d, 0.95, 1000) == 1.0);
    CHECK(generalized_tail_cdf(d, 0.95, 5000) == 1.0);
    CHECK(generalized_tail_cdf(d, 0.95, 800) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("expected loss") {
    CHECK(expected_loss(golden_loss()) == doctest::Approx(413.0).epsilon(1e-14));
    CHECK(expected_loss(DiscreteLoss({-1, 2}, {0.5, 0.5})) == 2.0);
    CHECK(expected_loss(DiscreteLoss({-1, 0, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3})) == doctest::Approx(1.5));
    CHECK_THROWS_AS(expected_loss(DiscreteLoss({-1}, {1.0})), std::domain_error);
}

TEST_CASE("coherence example: VaR is not subadditive, CVaR is") {
    std::vector<double> p{0.04, 0.04, 0.92};
    std::vector<double> a{1000, 0, 0}, b{0, 1000, 0}, ab{1000, 1000, 0};
    DiscreteLoss A(a, p), B(b, p), AB(ab, p);
    CHECK(var_at(A, 0.95) == 0.0);
    CHECK(var_at(B, 0.95) == 0.0);
    CHECK(var_at(AB, 0.95) == 1000.0);
    auto ca = cvar_convex_combination(A, 0.95);
    auto cab = cvar_convex_combination(AB, 0.95);
    CHECK(std::fabs(ca.cvar - 800.0) <= 1e-9);
    CHECK(std::fabs(cab.cvar - 1000.0) <= 1e-9);
    CHECK(cab.lambda == 1.0);
    CHECK(cab.cvar <= 2.0 * ca.cvar);
}

TEST_CASE("properties on random distributions") {
    CounterRng g(2024, "risk-props");
    for (int trial = 0; trial < 1000; ++trial) {
        DiscreteLoss d = random_loss(g, 1 + trial % 20);
        double alpha = trial % 10 == 0 ? 0.0 : g.uniform() * 0.999;
        auto cc = cvar_convex_combination(d, alpha);
        auto ph = cvar_via_phi(d, alpha);
        CHECK(cc.cvar >= cc.var - 1e-12);
        CHECK(std::fabs(cc.cvar - ph.cvar) <= 1e-9);
        CHECK(std::fabs(acerbi_cvar(d, alpha) - cc.cvar) <= 1e-9);
        CHECK(std::fabs(cc.cvar - (cc.lambda * cc.var + (1 - cc.lambda) * cc.cvar_plus)) <= 1e-9);

        // Convexity of phi in c.
        double c1 = g.uniform() * 80 - 40, c2 = g.uniform() * 80 - 40;
        CHECK(phi(d, 0.5 * (c1 + c2), alpha) <= 0.5 * (phi(d, c1, alpha) + phi(d, c2, alpha)) + 1e-12);

        // Homogeneity and translation equivariance.
        double lam = g.uniform() * 5.0, shift = g.uniform() * 20 - 10;
        std::vector<double> scaled, shifted;
        for (double x : d.outcomes()) {
            scaled.push_back(lam * x);
            shifted.push_back(x + shift);
        }
        double base = cc.cvar;
        if (lam > 0) {
            double cs = cvar_convex_combination(DiscreteLoss(scaled, d.probs()), alpha).cvar;
            CHECK(std::fabs(cs - lam * base) <= 1e-12 * std::max(1.0, std::fabs(lam * base)));
        }
        double ct = cvar_convex_combination(DiscreteLoss(shifted, d.probs()), alpha).cvar;
        CHECK(std::fabs(ct - (base + shift)) <= 1e-12 * std::max(1.0, std::fabs(base)));
    }
}

TEST_CASE("CVaR subadditivity on shared equal-probability scenario spaces") {
    CounterRng g(77, "subadd");
    for (int trial = 0; trial < 500; ++trial) {
        const int k = 2 + trial % 30;
        std::vector<double> a(k), b(k), s(k);
        for (int i = 0; i < k; ++i) {
            a[i] = std::round(g.normal() * 10);
            b[i] = std::round(g.normal() * 10);
            s[i] = a[i] + b[i];
        }
        double alpha = g.uniform() * 0.99;
        double ca = sample_cvar(a, alpha), cb = sample_cvar(b, alpha), cs = sample_cvar(s, alpha);
        CHECK(cs <= ca + cb + 1e-9);
    }
}

}
