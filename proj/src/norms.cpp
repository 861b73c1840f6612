#include "cvarkit/norms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "cvarkit/rng.hpp"
#include "cvarkit/solver.hpp"

namespace cvarkit {

namespace {

std::vector<double> sorted_magnitudes(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("norm of an empty vector");
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw std::invalid_argument("norm argument must be finite");
        a[i] = std::fabs(x[i]);
    }
    std::stable_sort(a.begin(), a.end());
    return a;
}

// tail[j] = sum of a[j..n-1] for ascending a; tail[n] = 0.
std::vector<double> tail_sums(const std::vector<double>& a) {
    std::vector<double> t(a.size() + 1, 0.0);
    for (std::size_t i = a.size(); i-- > 0;) t[i] = t[i + 1] + a[i];
    return t;
}

void check_alpha(double alpha, bool allow_one) {
    if (!(alpha >= 0.0 && (allow_one ? alpha <= 1.0 : alpha < 1.0)))
        throw std::invalid_argument(allow_one ? "alpha must lie in [0, 1]" : "alpha must lie in [0, 1)");
}

// Grid bracket of alpha below the top branch: j = floor(alpha n) and the
// weight lambda = j + 1 - alpha n on the lower grid point.
void bracket(double alpha, std::size_t n, std::size_t& j, double& lambda) {
    double t = alpha * static_cast<double>(n);
    j = std::min(static_cast<std::size_t>(std::floor(t)), n - 2);
    lambda = std::clamp(static_cast<double>(j + 1) - t, 0.0, 1.0);
}

double top_kappa(const std::vector<double>& ascending, double kappa) {
    const std::size_t n = ascending.size();
    const auto whole = std::min(static_cast<std::size_t>(std::floor(kappa)), n);
    double s = 0.0;
    for (std::size_t i = 0; i < whole; ++i) s += ascending[n - 1 - i];
    if (whole < n) s += (kappa - static_cast<double>(whole)) * ascending[n - 1 - whole];
    return s;
}

double lp_value(std::span<const double> x, double c_weight, double z_weight) {
    const auto n = static_cast<Eigen::Index>(x.size());
    LinearProgram lp(n + 1);
    lp.set_free(0);
    lp.objective[0] = c_weight;
    lp.objective.tail(n).setConstant(z_weight);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        // z_i + c >= |x_i|
        row.setZero();
        row[0] = 1.0;
        row[1 + i] = 1.0;
        lp.add_constraint(row, Relation::ge, std::fabs(x[static_cast<std::size_t>(i)]));
    }
    if (z_weight == 0.0) lp.upper.tail(n).setZero();
    SolveResult r = solve_lp(lp);
    if (r.status != SolveStatus::optimal) throw std::runtime_error(std::string("norm LP: ") + to_string(r.status));
    return r.objective;
}

// min over c in {0} and the magnitudes of c_weight c + z_weight sum (a_i - c)^+.
double candidate_value(std::span<const double> x, double c_weight, double z_weight) {
    auto a = sorted_magnitudes(x);
    auto t = tail_sums(a);
    const std::size_t n = a.size();
    double best = z_weight * t[0];  // c = 0
    for (std::size_t k = 0; k < n; ++k) {
        // entries above a[k] are a[k+1..n-1]; ties contribute zero
        double excess = t[k + 1] - static_cast<double>(n - k - 1) * a[k];
        best = std::min(best, c_weight * a[k] + z_weight * excess);
    }
    return best;
}

}  // namespace

NormBreakdown scaled_cvar_norm(std::span<const double> x, double alpha) {
    check_alpha(alpha, true);
    auto a = sorted_magnitudes(x);
    const std::size_t n = a.size();
    const double nd = static_cast<double>(n);
    NormBreakdown b;
    if (alpha >= (nd - 1.0) / nd) {
        b.value = a.back();
        b.j = n - 1;
        b.top = true;
        b.on_grid = alpha == (nd - 1.0) / nd;
        return b;
    }
    auto t = tail_sums(a);
    double lambda = 1.0;
    bracket(alpha, n, b.j, lambda);
    const double s_lo = t[b.j] / static_cast<double>(n - b.j);
    const double s_hi = t[b.j + 1] / static_cast<double>(n - b.j - 1);
    b.on_grid = lambda == 1.0;
    b.weight = b.on_grid ? 1.0 : lambda * static_cast<double>(n - b.j) / (nd * (1.0 - alpha));
    b.value = b.on_grid ? s_lo : b.weight * s_lo + (1.0 - b.weight) * s_hi;
    return b;
}

NormBreakdown cvar_norm(std::span<const double> x, double alpha) {
    check_alpha(alpha, false);
    auto a = sorted_magnitudes(x);
    const std::size_t n = a.size();
    const double nd = static_cast<double>(n);
    NormBreakdown b;
    if (alpha >= (nd - 1.0) / nd) {
        b.value = nd * (1.0 - alpha) * a.back();
        b.j = n - 1;
        b.top = true;
        b.on_grid = alpha == (nd - 1.0) / nd;
        return b;
    }
    auto t = tail_sums(a);
    double lambda = 1.0;
    bracket(alpha, n, b.j, lambda);
    b.on_grid = lambda == 1.0;
    b.weight = lambda;
    b.value = b.on_grid ? t[b.j] : lambda * t[b.j] + (1.0 - lambda) * t[b.j + 1];
    return b;
}

double scaled_cvar_norm_lp(std::span<const double> x, double alpha, LpMethod method) {
    check_alpha(alpha, true);
    if (x.empty()) throw std::invalid_argument("norm of an empty vector");
    const double n = static_cast<double>(x.size());
    const double zw = alpha == 1.0 ? 0.0 : 1.0 / (n * (1.0 - alpha));
    if (method == LpMethod::candidates) {
        if (alpha == 1.0) return sorted_magnitudes(x).back();
        return candidate_value(x, 1.0, zw);
    }
    return lp_value(x, 1.0, zw);
}

double cvar_norm_lp(std::span<const double> x, double alpha, LpMethod method) {
    check_alpha(alpha, false);
    if (x.empty()) throw std::invalid_argument("norm of an empty vector");
    const double cw = static_cast<double>(x.size()) * (1.0 - alpha);
    return method == LpMethod::candidates ? candidate_value(x, cw, 1.0) : lp_value(x, cw, 1.0);
}

double cvar_norm_knapsack(std::span<const double> x, double alpha) {
    check_alpha(alpha, false);
    auto a = sorted_magnitudes(x);
    return top_kappa(a, static_cast<double>(a.size()) * (1.0 - alpha));
}

double d_norm(std::span<const double> x, double kappa) {
    auto a = sorted_magnitudes(x);
    if (!(kappa >= 1.0 && kappa <= static_cast<double>(a.size())))
        throw std::invalid_argument("kappa must lie in [1, n]");
    return top_kappa(a, kappa);
}

std::vector<BenchmarkRow> benchmark_norms(std::span<const std::size_t> dims, std::span<const double> alphas,
                                          std::size_t reps, std::uint64_t seed, std::size_t lp_max_n) {
    std::vector<BenchmarkRow> rows;
    if (reps == 0) return rows;
    volatile double sink = 0.0;
    auto time_ms = [&](const std::function<double()>& f) {
        sink = sink + f();
        std::vector<double> t(reps);
        for (auto& v : t) {
            auto start = std::chrono::steady_clock::now();
            sink = sink + f();
            v = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(reps / 2), t.end());
        return t[reps / 2];
    };
    for (std::size_t n : dims) {
        if (n == 0) throw std::invalid_argument("benchmark dimension must be positive");
        CounterRng g(seed, "bench", n);
        std::vector<double> x(n);
        for (auto& v : x) v = g.normal();
        for (double alpha : alphas) {
            check_alpha(alpha, false);
            rows.push_back({"component", n, alpha, time_ms([&] { return cvar_norm(x, alpha).value; })});
            if (n <= lp_max_n) rows.push_back({"lp", n, alpha, time_ms([&] { return cvar_norm_lp(x, alpha); })});
            rows.push_back({"knapsack", n, alpha, time_ms([&] { return cvar_norm_knapsack(x, alpha); })});
            const double kappa = static_cast<double>(n) * (1.0 - alpha);
            if (kappa >= 1.0)
                rows.push_back({"dnorm", n, alpha, time_ms([&] { return d_norm(x, kappa); })});
        }
    }
    return rows;
}

}  // namespace cvarkit
