#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cvarkit {

// Finite loss distribution. Outcomes are stored sorted ascending with
// duplicates merged; probabilities must sum to 1 within 1e-12.
class DiscreteLoss {
public:
    DiscreteLoss(std::vector<double> outcomes, std::vector<double> probs);

    // Equally weighted empirical distribution of a sample.
    static DiscreteLoss from_sample(std::span<const double> sample);

    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<double>& probs() const { return probs_; }
    // cdf()[i] = P(X <= outcomes()[i]); the last entry is exactly 1.
    const std::vector<double>& cdf() const { return cdf_; }
    std::size_t size() const { return outcomes_.size(); }

    double mean() const;
    double max_outcome() const { return outcomes_.back(); }
    // P(X <= z)
    double cdf_at(double z) const;
    // Index of VaR_alpha among outcomes(); alpha in [0, 1].
    std::size_t var_index(double alpha) const;
    // Probability mass strictly above outcomes()[i].
    double tail_mass(std::size_t i) const;

private:
    std::vector<double> outcomes_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

struct TailDecomposition {
    double var = 0.0;
    double cvar_plus = 0.0;  // equals var when there is no strict tail
    double lambda = 1.0;
    double cvar = 0.0;
};

class NoStrictTail : public std::domain_error {
public:
    NoStrictTail() : std::domain_error("no strict tail: VaR is the maximum outcome") {}
};

// Smallest outcome c with P(X <= c) >= alpha; alpha in (0,1).
double var_at(const DiscreteLoss& d, double alpha);

// E[X | X > VaR_alpha]. Throws NoStrictTail when VaR is the maximum outcome.
double cvar_plus(const DiscreteLoss& d, double alpha);

// CVaR = lambda * VaR + (1 - lambda) * CVaR+, lambda = (Psi - alpha)/(1 - alpha).
// alpha in [0,1); with alpha_one_as_max, alpha = 1 returns the maximum outcome.
TailDecomposition cvar_convex_combination(const DiscreteLoss& d, double alpha,
                                          bool alpha_one_as_max = false);

// phi(c) = c + E[(X - c)^+] / (1 - alpha)
double phi(const DiscreteLoss& d, double c, double alpha);

// Minimizes phi over the outcomes (phi is piecewise linear with kinks there).
// Returns var = smallest minimizer, cvar = minimum; lambda/cvar_plus are filled
// consistently from the distribution.
TailDecomposition cvar_via_phi(const DiscreteLoss& d, double alpha);

// (1/(1-alpha)) * integral_alpha^1 VaR_beta dbeta by composite midpoint rule.
double acerbi_cvar(const std::function<double(double)>& quantile, double alpha, int steps);
// Same integral evaluated exactly for a step quantile.
double acerbi_cvar(const DiscreteLoss& d, double alpha);

// Generalized alpha-tail distribution function.
double generalized_tail_cdf(const DiscreteLoss& d, double alpha, double z);

// E[X | X >= 0]
double expected_loss(const DiscreteLoss& d);

// Convenience for equally weighted samples.
double sample_cvar(std::span<const double> losses, double alpha);
double sample_var(std::span<const double> losses, double alpha);

}  // namespace cvarkit
