#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cvarkit {

// Exponent of an L_p norm; infinity is its own state, not a large float.
struct Exponent {
    double p = 2.0;
    bool infinite = false;

    Exponent(double value) : p(value) {}  // NOLINT(google-explicit-constructor)
    static Exponent infinity() {
        Exponent e(1.0);
        e.infinite = true;
        return e;
    }
};

// (sum |x_i|^p)^(1/p), or max |x_i|; p >= 1.
double lp_norm(std::span<const double> x, Exponent p);
// ((1/n) sum |x_i|^p)^(1/p), or max |x_i|.
double scaled_lp_norm(std::span<const double> x, Exponent p);

struct ProximityResult {
    double lower = 0.0;  // L
    double upper = 0.0;  // U
    double ratio = 0.0;  // U / L
    double kappa = 0.0;  // n (1 - alpha)
};

// L <= C_alpha(x) / ||x||_p <= U for every nonzero x in R^n;
// p in (1, inf), alpha in [0, (n-1)/n].
ProximityResult proximity_bounds(std::size_t n, double p, double alpha);

// 1 - n^(1/p - 1); n >= 2, p > 1.
double alpha_star(std::size_t n, double p);
// ln(n) / ln(n (1 - alpha)); n >= 2, alpha in [0, (n-1)/n).
double p_star(std::size_t n, double alpha);

// U / L as a function of kappa in (1, n).
double f_np(std::size_t n, double p, double kappa);

struct CurvePoint {
    double alpha = 0.0;
    double c_alpha = 0.0;
    double lp = 0.0;
    double p_used = 0.0;  // p*(n, alpha); +inf at alpha = (n-1)/n
};

// C_alpha(x) next to ||x||_{p*(alpha)} on `steps` + 1 equally spaced
// alphas covering [0, (n-1)/n].
std::vector<CurvePoint> norm_curves(std::span<const double> x, std::size_t steps);

struct RatioPoint {
    double p = 0.0;
    double f_min = 0.0;  // f_np at kappa = n^(1/p)
};

std::vector<RatioPoint> ratio_curve(std::size_t n, std::span<const double> ps);

}  // namespace cvarkit
