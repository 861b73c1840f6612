#include "cvarkit/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvarkit/parallel.hpp"
#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"
#include "cvarkit/stats.hpp"

namespace cvarkit {

namespace {

std::vector<Eigen::Index> quote_columns(std::span<const OptionQuote> quotes) {
    auto names = underlyings(quotes);
    std::vector<Eigen::Index> col(quotes.size());
    for (std::size_t j = 0; j < quotes.size(); ++j)
        col[j] = std::find(names.begin(), names.end(), quotes[j].underlying) - names.begin();
    return col;
}

void check_book(const Book& book, std::span<const OptionQuote> quotes) {
    if (book.positions.size() != quotes.size()) throw std::invalid_argument("book does not match quote list");
    if (!(book.spc > 0.0)) throw std::invalid_argument("shares per contract must be positive");
}

// g(m, j) = (price_j - PO_mj) * spc: loss per contract of quote j.
Eigen::MatrixXd loss_per_contract(std::span<const OptionQuote> quotes, const Eigen::MatrixXd& prices, double spc) {
    Eigen::MatrixXd g = -payoff_matrix(quotes, prices);
    for (std::size_t j = 0; j < quotes.size(); ++j) g.col(static_cast<Eigen::Index>(j)).array() += quotes[j].price;
    return g * spc;
}

}  // namespace

void OptionQuote::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("strike must be positive");
    if (!(price >= 0.0) || !std::isfinite(price)) throw std::invalid_argument("price must be non-negative");
}

double payoff(OptionKind kind, Side side, double strike, double s_t) {
    if (s_t < 0.0) throw std::invalid_argument("negative share price");
    double v = kind == OptionKind::call ? std::max(s_t - strike, 0.0) : std::max(strike - s_t, 0.0);
    return side == Side::long_position ? v : -v;
}

double profit(OptionKind kind, Side side, double strike, double s_t, double price) {
    double v = payoff(kind, side, strike, s_t);
    return side == Side::long_position ? v - price : v + price;
}

std::vector<std::string> underlyings(std::span<const OptionQuote> quotes) {
    std::vector<std::string> names;
    for (const auto& q : quotes)
        if (std::find(names.begin(), names.end(), q.underlying) == names.end()) names.push_back(q.underlying);
    return names;
}

Eigen::MatrixXd payoff_matrix(std::span<const OptionQuote> quotes, const Eigen::MatrixXd& prices) {
    auto col = quote_columns(quotes);
    const Eigen::Index nq = static_cast<Eigen::Index>(quotes.size());
    if (nq > 0 && *std::max_element(col.begin(), col.end()) >= prices.cols())
        throw std::invalid_argument("price scenarios have fewer columns than underlyings");
    Eigen::MatrixXd po(prices.rows(), nq);
    for (Eigen::Index j = 0; j < nq; ++j) {
        const auto& q = quotes[j];
        q.validate();
        for (Eigen::Index m = 0; m < prices.rows(); ++m)
            po(m, j) = payoff(q.kind, Side::long_position, q.strike, prices(m, col[j]));
    }
    return po;
}

std::vector<double> book_loss(const Book& book, std::span<const OptionQuote> quotes, const Eigen::MatrixXd& prices) {
    check_book(book, quotes);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(book.positions.data(), book.positions.size());
    Eigen::VectorXd l = loss_per_contract(quotes, prices, book.spc) * x;
    return {l.data(), l.data() + l.size()};
}

Eigen::MatrixXd simulate_prices(const Eigen::VectorXd& s0, const Eigen::MatrixXd& cov, std::size_t m,
                                std::uint64_t seed, unsigned threads) {
    const Eigen::Index d = s0.size();
    if (cov.rows() != d || cov.cols() != d) throw std::invalid_argument("covariance dimension mismatch");
    if ((s0.array() <= 0.0).any()) throw std::invalid_argument("initial prices must be positive");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()) ||
        min_eigenvalue(cov) < -1e-12)
        throw std::invalid_argument("covariance is not symmetric PSD");
    Eigen::MatrixXd l;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
        l = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        l = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    Eigen::MatrixXd s(static_cast<Eigen::Index>(m), d);
    constexpr std::size_t block = 1024;
    parallel_for((m + block - 1) / block, threads, [&](std::size_t b) {
        Eigen::VectorXd z(d);
        for (std::size_t row = b * block; row < std::min(m, (b + 1) * block); ++row) {
            CounterRng g(seed, "prices", row);
            for (Eigen::Index i = 0; i < d; ++i) z[i] = g.normal();
            Eigen::VectorXd e = l * z;
            for (Eigen::Index i = 0; i < d; ++i) s(static_cast<Eigen::Index>(row), i) = s0[i] * std::exp(e[i]);
        }
    });
    return s;
}

double band_exit_probability(const Eigen::MatrixXd& prices, Eigen::Index col, double lo, double hi) {
    if (prices.rows() == 0) throw std::invalid_argument("no price scenarios");
    Eigen::Index out = 0;
    for (Eigen::Index m = 0; m < prices.rows(); ++m)
        if (prices(m, col) < lo || prices(m, col) > hi) ++out;
    return static_cast<double>(out) / static_cast<double>(prices.rows());
}

Eigen::VectorXd caps_by_underlying(std::span<const OptionQuote> quotes, const std::map<std::string, double>& caps) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(quotes.size()));
    for (std::size_t j = 0; j < quotes.size(); ++j) {
        auto it = caps.find(quotes[j].underlying);
        if (it != caps.end()) a[static_cast<Eigen::Index>(j)] = it->second;
    }
    return a;
}

HedgeReport hedge_report(std::span<const double> losses, double alpha) {
    if (losses.empty()) throw std::invalid_argument("empty loss sample");
    HedgeReport r;
    r.mean_loss = mean(losses);
    auto [lo, hi] = std::minmax_element(losses.begin(), losses.end());
    r.min_loss = *lo;
    r.max_loss = *hi;
    r.prob_loss = static_cast<double>(std::count_if(losses.begin(), losses.end(), [](double v) { return v > 0.0; })) /
                  static_cast<double>(losses.size());
    auto t = cvar_convex_combination(DiscreteLoss::from_sample(losses), alpha);
    r.var = t.var;
    r.cvar = t.cvar;
    return r;
}

HedgeResult hedge(const HedgeProblem& problem, std::span<const OptionQuote> quotes, const SolverConfig& cfg) {
    check_book(problem.book, quotes);
    const Eigen::Index q = static_cast<Eigen::Index>(quotes.size());
    const Eigen::Index m = problem.scenarios.rows();
    if (m < 1) throw std::invalid_argument("need at least one price scenario");
    if (problem.caps.size() != q || (problem.caps.array() < 0.0).any() || !problem.caps.allFinite())
        throw std::invalid_argument("caps must be finite, non-negative and one per quote");
    if (!(problem.alpha >= 0.0 && problem.alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");

    const Eigen::MatrixXd g = loss_per_contract(quotes, problem.scenarios, problem.book.spc);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(problem.book.positions.data(), q);
    const Eigen::VectorXd base = g * x;
    const double cap = 1.0 / (static_cast<double>(m) * (1.0 - problem.alpha));

    // Dual: pi_m in [0, cap], sigma_j, tau_j >= 0.
    //   max sum pi_m base_m - sum a_j (sigma_j + tau_j)
    //   s.t. sum pi = 1,  -sum_m pi_m g_mj + sigma_j - tau_j = 0.
    const Eigen::Index nv = m + 2 * q;
    LinearProgram lp(nv);
    lp.objective.head(m) = -base;
    lp.objective.segment(m, q) = problem.caps;
    lp.objective.tail(q) = problem.caps;
    lp.upper.head(m).setConstant(cap);

    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(m).setOnes();
    lp.add_constraint(row, Relation::eq, 1.0);
    for (Eigen::Index j = 0; j < q; ++j) {
        row.setZero();
        row.head(m) = -g.col(j);
        row[m + j] = 1.0;
        row[m + q + j] = -1.0;
        lp.add_constraint(row, Relation::eq, 0.0);
    }

    SolveResult r = solve_lp(lp, cfg);
    if (r.status != SolveStatus::optimal) throw std::runtime_error(std::string("hedge: ") + to_string(r.status));

    HedgeResult out;
    out.adjustments = -r.duals.tail(q);
    for (Eigen::Index j = 0; j < q; ++j)
        out.adjustments[j] = std::clamp(out.adjustments[j], -problem.caps[j], problem.caps[j]);
    out.threshold = -r.duals[0];
    out.objective = -r.objective;
    out.lp_iterations = r.iterations;

    std::vector<double> before(base.data(), base.data() + m);
    Eigen::VectorXd hedged = base + g * out.adjustments;
    std::vector<double> after(hedged.data(), hedged.data() + m);
    out.before = hedge_report(before, problem.alpha);
    out.after = hedge_report(after, problem.alpha);
    return out;
}

LinearProgram hedge_primal_lp(const HedgeProblem& problem, std::span<const OptionQuote> quotes) {
    check_book(problem.book, quotes);
    const Eigen::Index q = static_cast<Eigen::Index>(quotes.size());
    const Eigen::Index m = problem.scenarios.rows();
    const Eigen::MatrixXd g = loss_per_contract(quotes, problem.scenarios, problem.book.spc);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(problem.book.positions.data(), q);
    const Eigen::VectorXd base = g * x;

    const Eigen::Index c = q, nv = q + 1 + m;
    LinearProgram lp(nv);
    lp.lower.head(q) = -problem.caps;
    lp.upper.head(q) = problem.caps;
    lp.set_free(c);
    lp.objective[c] = 1.0;
    lp.objective.tail(m).setConstant(1.0 / (static_cast<double>(m) * (1.0 - problem.alpha)));
    Eigen::VectorXd row(nv);
    for (Eigen::Index k = 0; k < m; ++k) {
        // z_k + c - g_k . y >= base_k
        row.setZero();
        row.head(q) = -g.row(k).transpose();
        row[c] = 1.0;
        row[q + 1 + k] = 1.0;
        lp.add_constraint(row, Relation::ge, base[k]);
    }
    return lp;
}

}  // namespace cvarkit
