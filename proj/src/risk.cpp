#include "cvarkit/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cvarkit {

namespace {

// Slack for comparing cumulative probabilities against alpha.
constexpr double kCdfTol = 1e-12;

void check_alpha_half_open(double alpha, const char* what) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument(std::string(what) + ": alpha must lie in [0,1)");
}

}  // namespace

DiscreteLoss::DiscreteLoss(std::vector<double> outcomes, std::vector<double> probs) {
    if (outcomes.empty()) throw std::invalid_argument("DiscreteLoss: empty distribution");
    if (outcomes.size() != probs.size())
        throw std::invalid_argument("DiscreteLoss: outcomes and probs differ in length");
    long double total = 0.0L;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!std::isfinite(outcomes[i])) throw std::invalid_argument("DiscreteLoss: non-finite outcome");
        if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
            throw std::invalid_argument("DiscreteLoss: probabilities must be non-negative");
        total += probs[i];
    }
    if (std::fabs(static_cast<double>(total - 1.0L)) > 1e-12)
        throw std::invalid_argument("DiscreteLoss: probabilities must sum to 1");

    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return outcomes[a] < outcomes[b]; });
    // Merge ties; zero-mass outcomes carry no information and are dropped.
    for (std::size_t k : order) {
        if (probs[k] == 0.0) continue;
        if (!outcomes_.empty() && outcomes_.back() == outcomes[k]) {
            probs_.back() += probs[k];
        } else {
            outcomes_.push_back(outcomes[k]);
            probs_.push_back(probs[k]);
        }
    }
    cdf_.resize(probs_.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cdf_[i] = static_cast<double>(acc);
    }
    cdf_.back() = 1.0;
}

DiscreteLoss DiscreteLoss::from_sample(std::span<const double> sample) {
    if (sample.empty()) throw std::invalid_argument("DiscreteLoss: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw std::invalid_argument("DiscreteLoss: non-finite outcome");
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    DiscreteLoss d({0.0}, {1.0});
    d.outcomes_.clear();
    d.probs_.clear();
    d.cdf_.clear();
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        d.outcomes_.push_back(sorted[i]);
        d.probs_.push_back(static_cast<double>(j - i) / n);
        // Counts keep the CDF exact up to one rounding per entry.
        d.cdf_.push_back(static_cast<double>(j) / n);
        i = j;
    }
    d.cdf_.back() = 1.0;
    return d;
}

double DiscreteLoss::mean() const {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) acc += static_cast<long double>(outcomes_[i]) * probs_[i];
    return static_cast<double>(acc);
}

double DiscreteLoss::cdf_at(double z) const {
    auto it = std::upper_bound(outcomes_.begin(), outcomes_.end(), z);
    if (it == outcomes_.begin()) return 0.0;
    return cdf_[static_cast<std::size_t>(it - outcomes_.begin()) - 1];
}

std::size_t DiscreteLoss::var_index(double alpha) const {
    for (std::size_t i = 0; i < cdf_.size(); ++i)
        if (cdf_[i] >= alpha - kCdfTol) return i;
    return cdf_.size() - 1;
}

double DiscreteLoss::tail_mass(std::size_t i) const {
    long double acc = 0.0L;
    for (std::size_t k = i + 1; k < probs_.size(); ++k) acc += probs_[k];
    return static_cast<double>(acc);
}

double var_at(const DiscreteLoss& d, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("var_at: alpha must lie in (0,1)");
    return d.outcomes()[d.var_index(alpha)];
}

namespace {

// Conditional mean strictly above outcome index i, or NaN if no mass there.
double mean_above(const DiscreteLoss& d, std::size_t i, double& tail) {
    long double mass = 0.0L, acc = 0.0L;
    for (std::size_t k = i + 1; k < d.size(); ++k) {
        mass += d.probs()[k];
        acc += static_cast<long double>(d.probs()[k]) * d.outcomes()[k];
    }
    tail = static_cast<double>(mass);
    if (mass <= 0.0L) return std::nan("");
    return static_cast<double>(acc / mass);
}

TailDecomposition decompose_at(const DiscreteLoss& d, std::size_t iv, double alpha) {
    TailDecomposition t;
    t.var = d.outcomes()[iv];
    double tail = 0.0;
    double cp = mean_above(d, iv, tail);
    if (tail <= 0.0) {
        t.cvar_plus = t.var;
        t.lambda = 1.0;
        t.cvar = t.var;
        return t;
    }
    t.cvar_plus = cp;
    t.lambda = std::clamp(1.0 - tail / (1.0 - alpha), 0.0, 1.0);
    t.cvar = t.lambda * t.var + (1.0 - t.lambda) * t.cvar_plus;
    return t;
}

}  // namespace

double cvar_plus(const DiscreteLoss& d, double alpha) {
    check_alpha_half_open(alpha, "cvar_plus");
    double tail = 0.0;
    double cp = mean_above(d, d.var_index(alpha), tail);
    if (tail <= 0.0) throw NoStrictTail();
    return cp;
}

TailDecomposition cvar_convex_combination(const DiscreteLoss& d, double alpha, bool alpha_one_as_max) {
    if (alpha == 1.0 && alpha_one_as_max) {
        TailDecomposition t;
        t.var = t.cvar_plus = t.cvar = d.max_outcome();
        t.lambda = 1.0;
        return t;
    }
    check_alpha_half_open(alpha, "cvar_convex_combination");
    return decompose_at(d, d.var_index(alpha), alpha);
}

double phi(const DiscreteLoss& d, double c, double alpha) {
    check_alpha_half_open(alpha, "phi");
    if (!std::isfinite(c)) throw std::invalid_argument("phi: c must be finite");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double excess = d.outcomes()[i] - c;
        if (excess > 0.0) acc += static_cast<long double>(d.probs()[i]) * excess;
    }
    return c + static_cast<double>(acc) / (1.0 - alpha);
}

TailDecomposition cvar_via_phi(const DiscreteLoss& d, double alpha) {
    check_alpha_half_open(alpha, "cvar_via_phi");
    const std::size_t n = d.size();
    const auto& x = d.outcomes();
    const auto& p = d.probs();
    // Suffix sums give E[(X - x_i)^+] for every i in one pass.
    std::vector<double> values(n);
    long double s0 = 0.0L, s1 = 0.0L;
    for (std::size_t k = n; k-- > 0;) {
        values[k] = x[k] + static_cast<double>(s1 - s0 * x[k]) / (1.0 - alpha);
        s0 += p[k];
        s1 += static_cast<long double>(p[k]) * x[k];
    }
    double best = *std::min_element(values.begin(), values.end());
    double tol = 1e-12 * std::max(1.0, std::fabs(best));
    std::size_t arg = 0;
    while (values[arg] > best + tol) ++arg;
    TailDecomposition t = decompose_at(d, arg, alpha);
    t.cvar = values[arg];
    return t;
}

double acerbi_cvar(const std::function<double(double)>& quantile, double alpha, int steps) {
    check_alpha_half_open(alpha, "acerbi_cvar");
    if (steps <= 0) throw std::invalid_argument("acerbi_cvar: steps must be positive");
    const double h = (1.0 - alpha) / steps;
    long double acc = 0.0L;
    for (int k = 0; k < steps; ++k) acc += quantile(alpha + (k + 0.5) * h);
    return static_cast<double>(acc / steps);
}

double acerbi_cvar(const DiscreteLoss& d, double alpha) {
    check_alpha_half_open(alpha, "acerbi_cvar");
    // VaR_beta = x_i on (cdf_{i-1}, cdf_i]; integrate each segment exactly.
    long double acc = 0.0L;
    double lo = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double hi = d.cdf()[i];
        double a = std::max(lo, alpha);
        if (hi > a) acc += static_cast<long double>(d.outcomes()[i]) * (hi - a);
        lo = hi;
    }
    return static_cast<double>(acc) / (1.0 - alpha);
}

double generalized_tail_cdf(const DiscreteLoss& d, double alpha, double z) {
    check_alpha_half_open(alpha, "generalized_tail_cdf");
    double v = d.outcomes()[d.var_index(alpha)];
    if (z < v) return 0.0;
    return std::clamp((d.cdf_at(z) - alpha) / (1.0 - alpha), 0.0, 1.0);
}

double expected_loss(const DiscreteLoss& d) {
    long double mass = 0.0L, acc = 0.0L;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.outcomes()[i] >= 0.0) {
            mass += d.probs()[i];
            acc += static_cast<long double>(d.probs()[i]) * d.outcomes()[i];
        }
    }
    if (mass <= 0.0L) throw std::domain_error("expected_loss: no non-negative outcomes");
    return static_cast<double>(acc / mass);
}

double sample_cvar(std::span<const double> losses, double alpha) {
    return cvar_convex_combination(DiscreteLoss::from_sample(losses), alpha).cvar;
}

double sample_var(std::span<const double> losses, double alpha) {
    auto d = DiscreteLoss::from_sample(losses);
    return d.outcomes()[d.var_index(alpha)];
}

}  // namespace cvarkit
