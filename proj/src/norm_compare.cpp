#include "cvarkit/norm_compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvarkit/norms.hpp"

namespace cvarkit {

namespace {

constexpr double kPMin = 1.0 + 1e-9;

void check_vector(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("norm of an empty vector");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("norm argument must be finite");
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

// Scale by the largest magnitude first so large p does not overflow.
double power_sum_root(std::span<const double> x, double p, double div) {
    double m = max_abs(x);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) s += std::pow(std::fabs(v) / m, p);
    return m * std::pow(s / div, 1.0 / p);
}

void check_p(double p) {
    if (!(p > kPMin) || !std::isfinite(p)) throw std::invalid_argument("p must be finite and > 1");
}

double upper_bound(double p, double kappa) {
    double whole = std::floor(kappa);
    return std::pow(whole + std::pow(kappa - whole, p / (p - 1.0)), (p - 1.0) / p);
}

}  // namespace

double lp_norm(std::span<const double> x, Exponent p) {
    check_vector(x);
    if (p.infinite) return max_abs(x);
    if (!(p.p >= 1.0) || !std::isfinite(p.p)) throw std::invalid_argument("p must be >= 1");
    if (p.p == 1.0) {
        double s = 0.0;
        for (double v : x) s += std::fabs(v);
        return s;
    }
    return power_sum_root(x, p.p, 1.0);
}

double scaled_lp_norm(std::span<const double> x, Exponent p) {
    check_vector(x);
    if (p.infinite) return max_abs(x);
    if (!(p.p >= 1.0) || !std::isfinite(p.p)) throw std::invalid_argument("p must be >= 1");
    return power_sum_root(x, p.p, static_cast<double>(x.size()));
}

ProximityResult proximity_bounds(std::size_t n, double p, double alpha) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    check_p(p);
    const double nd = static_cast<double>(n);
    if (!(alpha >= 0.0 && alpha <= (nd - 1.0) / nd)) throw std::invalid_argument("alpha must lie in [0, (n-1)/n]");
    ProximityResult r;
    r.kappa = std::clamp(nd * (1.0 - alpha), 1.0, nd);
    r.lower = std::min(1.0, std::pow(nd, 1.0 - 1.0 / p) * (1.0 - alpha));
    r.upper = upper_bound(p, r.kappa);
    r.ratio = r.upper / r.lower;
    return r;
}

double alpha_star(std::size_t n, double p) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    check_p(p);
    return 1.0 - std::pow(static_cast<double>(n), 1.0 / p - 1.0);
}

double p_star(std::size_t n, double alpha) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    const double nd = static_cast<double>(n);
    if (!(alpha >= 0.0 && alpha < (nd - 1.0) / nd)) throw std::invalid_argument("alpha must lie in [0, (n-1)/n)");
    return std::log(nd) / std::log(nd * (1.0 - alpha));
}

double f_np(std::size_t n, double p, double kappa) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    check_p(p);
    const double nd = static_cast<double>(n);
    if (!(kappa > 1.0 && kappa < nd)) throw std::invalid_argument("kappa must lie in (1, n)");
    // n^(1 - 1/p) (1 - alpha) with kappa = n (1 - alpha)
    double lower = std::min(1.0, kappa * std::pow(nd, -1.0 / p));
    return upper_bound(p, kappa) / lower;
}

std::vector<CurvePoint> norm_curves(std::span<const double> x, std::size_t steps) {
    check_vector(x);
    if (x.size() < 2) throw std::invalid_argument("curves need n >= 2");
    if (steps < 1) throw std::invalid_argument("need at least one step");
    const double nd = static_cast<double>(x.size());
    const double top = (nd - 1.0) / nd;
    std::vector<CurvePoint> out;
    for (std::size_t i = 0; i <= steps; ++i) {
        CurvePoint c;
        c.alpha = i == steps ? top : top * static_cast<double>(i) / static_cast<double>(steps);
        c.c_alpha = cvar_norm(x, c.alpha).value;
        if (i == steps) {
            c.p_used = std::numeric_limits<double>::infinity();
            c.lp = lp_norm(x, Exponent::infinity());
        } else {
            c.p_used = p_star(x.size(), c.alpha);
            c.lp = lp_norm(x, c.p_used);
        }
        out.push_back(c);
    }
    return out;
}

std::vector<RatioPoint> ratio_curve(std::size_t n, std::span<const double> ps) {
    std::vector<RatioPoint> out;
    for (double p : ps) out.push_back({p, f_np(n, p, std::pow(static_cast<double>(n), 1.0 / p))});
    return out;
}

}  // namespace cvarkit
