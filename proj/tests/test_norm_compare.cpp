#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvarkit/norm_compare.hpp"
#include "cvarkit/norms.hpp"
#include "cvarkit/rng.hpp"

using namespace cvarkit;

namespace {

const std::vector<double> kX{10, -14, 2, -9};

}  // namespace

TEST_SUITE("norm_compare") {

TEST_CASE("L_p norms") {
    CHECK(lp_norm(std::vector<double>{3, 4}, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(lp_norm(kX, 1.0) == 35.0);
    CHECK(lp_norm(kX, 1.0) == cvar_norm(kX, 0.0).value);
    CHECK(lp_norm(kX, Exponent::infinity()) == 14.0);
    CHECK(lp_norm(kX, Exponent::infinity()) == doctest::Approx(cvar_norm(kX, 0.75).value).epsilon(1e-15));
    CHECK(scaled_lp_norm(kX, 1.0) == doctest::Approx(8.75).epsilon(1e-15));
    CHECK(scaled_lp_norm(std::vector<double>{3, 4}, 2.0) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
    CHECK(scaled_lp_norm(kX, Exponent::infinity()) == 14.0);
    // large exponents approach the max without overflow
    CHECK(lp_norm(std::vector<double>{1e200, 1e200}, 400.0) == doctest::Approx(1e200 * std::pow(2.0, 1.0 / 400)));
    CHECK(lp_norm(std::vector<double>{0, 0}, 3.0) == 0.0);
    CHECK_THROWS_AS(lp_norm(kX, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(lp_norm(std::vector<double>{}, 2.0), std::invalid_argument);
}

TEST_CASE("proximity bound examples") {
    auto r = proximity_bounds(100, 2.0, alpha_star(100, 2.0));
    CHECK(r.kappa == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));

    // integral kappa: the fractional term vanishes
    auto q = proximity_bounds(10, 50.0, 0.7);
    CHECK(q.upper == doctest::Approx(std::pow(3.0, 49.0 / 50.0)).epsilon(1e-12));

    // alpha = 0 gives the L1 / L_p bounds 1 and n^(1 - 1/p)
    auto z = proximity_bounds(9, 3.0, 0.0);
    CHECK(z.lower == 1.0);
    CHECK(z.upper == doctest::Approx(std::pow(9.0, 2.0 / 3.0)).epsilon(1e-12));
    // kappa = 1 gives the L_inf / L_p bounds n^(-1/p) and 1
    auto t = proximity_bounds(8, 3.0, 7.0 / 8.0);
    CHECK(t.lower == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.upper == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(proximity_bounds(4, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(proximity_bounds(4, 2.0, 0.8), std::invalid_argument);
}

TEST_CASE("sandwich bounds on random vectors") {
    CounterRng g(21, "test", 0);
    for (int t = 0; t < 1000; ++t) {
        auto n = static_cast<std::size_t>(2 + g.uniform() * 49);
        double p = 1.0 + 1e-6 + 7.0 * g.uniform();
        const double nd = static_cast<double>(n);
        double alpha = g.uniform() * (nd - 1.0) / nd;
        std::vector<double> x(n);
        for (auto& v : x) v = g.uniform() < 0.3 ? 0.0 : g.normal();
        x[0] = 1.0 + g.uniform();
        auto b = proximity_bounds(n, p, alpha);
        double ratio = cvar_norm(x, alpha).value / lp_norm(x, p);
        CHECK(b.lower <= ratio + 1e-9);
        CHECK(ratio <= b.upper + 1e-9);
        CHECK(b.ratio >= 1.0 - 1e-12);
    }
}

TEST_CASE("bounds are attained") {
    // equal magnitudes on kappa* coordinates attain U at kappa integral
    const std::size_t n = 16;
    const double p = 2.0;
    double alpha = alpha_star(n, p);  // kappa = 4
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < 4; ++i) x[static_cast<std::size_t>(i)] = i % 2 ? -1.0 : 1.0;
    auto b = proximity_bounds(n, p, alpha);
    CHECK(cvar_norm(x, alpha).value / lp_norm(x, p) == doctest::Approx(b.upper).epsilon(1e-12));
    std::vector<double> e(n, 0.0);
    e[3] = 2.5;
    CHECK(cvar_norm(e, alpha).value / lp_norm(e, p) == doctest::Approx(b.lower).epsilon(1e-12));
}

TEST_CASE("alpha star and p star") {
    CHECK(alpha_star(2, 2.0) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(alpha_star(2, 2.0) == doctest::Approx(0.29289).epsilon(1e-5));
    CHECK(alpha_star(3, 2.0) == doctest::Approx(1.0 - 1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CounterRng g(22, "test", 0);
    for (int t = 0; t < 500; ++t) {
        auto n = static_cast<std::size_t>(2 + g.uniform() * 1000);
        double p = 1.01 + 20.0 * g.uniform();
        CHECK(std::fabs(p_star(n, alpha_star(n, p)) - p) <= 1e-12 * p * 10);
        const double nd = static_cast<double>(n);
        double alpha = g.uniform() * (nd - 1.0) / nd * 0.999;
        if (alpha > 0.0) CHECK(std::fabs(alpha_star(n, p_star(n, alpha)) - alpha) <= 1e-12);
    }
    CHECK(p_star(10, 0.0) == 1.0);
    CHECK_THROWS_AS(p_star(4, 0.75), std::invalid_argument);
    CHECK_THROWS_AS(alpha_star(1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(alpha_star(4, 1.0), std::invalid_argument);
}

TEST_CASE("ratio function shape") {
    CHECK(f_np(4, 2.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    for (std::size_t n : {4u, 16u, 100u}) {
        for (double p : {1.5, 2.0, 4.0}) {
            const double nd = static_cast<double>(n);
            const int cells = 1000;
            const double h = (nd - 1.0) / (cells + 1);
            double best = 1e300, arg = 0.0;
            std::vector<double> f;
            for (int i = 1; i <= cells; ++i) {
                double k = 1.0 + h * i;
                f.push_back(f_np(n, p, k));
                if (f.back() < best) best = f.back(), arg = k;
            }
            const double kstar = std::pow(nd, 1.0 / p);
            CHECK(std::fabs(arg - kstar) <= h + 1e-12);
            // nonincreasing left of the minimizer, nondecreasing right of it
            for (int i = 1; i < cells; ++i) {
                double k = 1.0 + h * (i + 1);
                if (k <= kstar) CHECK(f[static_cast<std::size_t>(i)] <= f[static_cast<std::size_t>(i - 1)] + 1e-12);
                if (k - h >= kstar) CHECK(f[static_cast<std::size_t>(i)] >= f[static_cast<std::size_t>(i - 1)] - 1e-12);
            }
            // continuity across integer kappa
            for (std::size_t k = 2; k < n; ++k) {
                double kd = static_cast<double>(k);
                CHECK(std::fabs(f_np(n, p, kd - 1e-12) - f_np(n, p, kd + 1e-12)) <= 1e-9);
            }
        }
    }
    CHECK_THROWS_AS(f_np(4, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(f_np(4, 2.0, 4.0), std::invalid_argument);
}

TEST_CASE("optimal ratio peaks near p = 2") {
    std::vector<double> ps;
    for (int i = 0; i <= 38; ++i) ps.push_back(1.2 + 0.1 * i);
    for (std::size_t n : {4u, 16u, 100u, 1000u}) {
        auto curve = ratio_curve(n, ps);
        auto best = std::max_element(curve.begin(), curve.end(),
                                     [](const RatioPoint& a, const RatioPoint& b) { return a.f_min < b.f_min; });
        CHECK(std::fabs(best->p - 2.0) <= 0.2);
        for (const auto& r : curve) CHECK(r.f_min >= 1.0);
    }
}

TEST_CASE("norm curves") {
    auto c = norm_curves(kX, 30);
    REQUIRE(c.size() == 31);
    CHECK(c.front().alpha == 0.0);
    CHECK(c.front().p_used == 1.0);
    CHECK(c.front().c_alpha == c.front().lp);
    CHECK(c.back().alpha == 0.75);
    CHECK(std::isinf(c.back().p_used));
    CHECK(c.back().lp == 14.0);
    for (std::size_t i = 1; i < c.size(); ++i) {
        CHECK(c[i].c_alpha <= c[i - 1].c_alpha + 1e-12);
        CHECK(c[i].p_used >= c[i - 1].p_used);
    }
}

}  // TEST_SUITE
