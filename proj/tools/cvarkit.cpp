#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cvarkit/hedging.hpp"
#include "cvarkit/io.hpp"
#include "cvarkit/norm_compare.hpp"
#include "cvarkit/norms.hpp"
#include "cvarkit/portfolio.hpp"
#include "cvarkit/recovery.hpp"
#include "cvarkit/risk.hpp"
#include "cvarkit/rng.hpp"
#include "cvarkit/stats.hpp"

using namespace cvarkit;

namespace {

#ifdef CVARKIT_DATA_DIR
const std::string kData = CVARKIT_DATA_DIR;
#else
const std::string kData = "data";
#endif

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t env_seed() {
    const char* s = std::getenv("CVARKIT_SEED");
    if (!s || !*s) return kDefaultSeed;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("CVARKIT_SEED is not an unsigned integer: ") + s);
    }
}

struct Global {
    std::optional<std::uint64_t> seed_flag;
    unsigned threads = 0;
    std::string out;

    std::uint64_t seed() const { return seed_flag ? *seed_flag : env_seed(); }
};

// Flat JSON object with numbers in shortest round-trip form.
class JsonWriter {
public:
    JsonWriter& num(const std::string& key, double v) {
        return raw(key, std::isfinite(v) ? format_number(v) : "null");
    }
    JsonWriter& str(const std::string& key, const std::string& v) { return raw(key, nlohmann::json(v).dump()); }
    JsonWriter& nums(const std::string& key, const Eigen::VectorXd& v) {
        std::string s = "[";
        for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
        return raw(key, s + "]");
    }
    JsonWriter& raw(const std::string& key, const std::string& v) {
        body_ += (body_.empty() ? "" : ",") + nlohmann::json(key).dump() + ":" + v;
        return *this;
    }
    std::string dump() const { return "{" + body_ + "}"; }

private:
    std::string body_;
};

void emit(const Global& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw FixtureError("cannot write " + g.out);
    f << text;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
}

std::string num(double v) { return format_number(v); }

std::vector<std::size_t> to_sizes(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (double d : v) {
        if (!(d >= 1.0) || d != std::floor(d)) throw UsageError("expected positive integers, got " + num(d));
        out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

std::vector<double> grid(double from, double to, double step) {
    if (!(step > 0.0) || !(to >= from)) throw UsageError("grid needs from <= to and step > 0");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
    // round to 12 decimals so 0.06 + 2 * 0.005 prints as 0.07
    for (std::size_t i = 0; i <= count; ++i)
        out.push_back(std::round((from + step * static_cast<double>(i)) * 1e12) / 1e12);
    return out;
}

std::map<std::string, double> parse_caps(const std::string& text) {
    std::map<std::string, double> caps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("caps must look like NAME=VALUE,...");
        try {
            caps[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("bad cap value in '" + item + "'");
        }
    }
    return caps;
}

std::string report_json(const RiskReport& r, const Eigen::VectorXd& w) {
    return JsonWriter()
        .nums("weights", w)
        .num("mean", r.mean)
        .num("std", r.std_dev)
        .num("expected_loss", r.expected_loss)
        .num("var", r.var)
        .num("cvar", r.cvar)
        .dump();
}

std::string hedge_json(const HedgeReport& r) {
    return JsonWriter()
        .num("mean_loss", r.mean_loss)
        .num("min_loss", r.min_loss)
        .num("max_loss", r.max_loss)
        .num("prob_loss", r.prob_loss)
        .num("var", r.var)
        .num("cvar", r.cvar)
        .dump();
}

// ---- subcommand setup ----

void add_risk(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("risk", "VaR and CVaR of a discrete loss distribution");
    auto dist = std::make_shared<std::string>(kData + "/golden_loss.json");
    auto alpha = std::make_shared<double>(0.95);
    auto detail = std::make_shared<bool>(false);
    cmd->add_option("--dist", *dist, "distribution JSON {\"outcomes\":[..],\"probs\":[..]}")->capture_default_str();
    cmd->add_option("--alpha", *alpha, "confidence level in (0,1)")->capture_default_str();
    cmd->add_flag("--detail", *detail, "also print CVaR+, lambda and the phi-minimization values");
    cmd->callback([=, &g] {
        auto d = load_distribution_json(*dist);
        auto t = cvar_convex_combination(d, *alpha);
        JsonWriter j;
        j.num("var", t.var).num("cvar", t.cvar);
        if (*detail) {
            auto f = cvar_via_phi(d, *alpha);
            j.num("cvar_plus", t.cvar_plus).num("lambda", t.lambda).num("phi_var", f.var).num("phi_cvar", f.cvar);
        }
        emit(g, j.dump() + "\n");
    });
}

void add_portfolio(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("portfolio", "mean-variance and CVaR portfolios");
    cmd->require_subcommand(1);

    auto* fr = cmd->add_subcommand("frontier", "efficient frontier as CSV R,sigma");
    auto fu = std::make_shared<std::string>(kData + "/frontier_universe.json");
    auto from = std::make_shared<double>(0.06), to = std::make_shared<double>(0.10), step = std::make_shared<double>(0.005);
    fr->add_option("--universe", *fu, "universe JSON")->capture_default_str();
    fr->add_option("--from", *from, "first required return")->capture_default_str();
    fr->add_option("--to", *to, "last required return")->capture_default_str();
    fr->add_option("--step", *step, "grid step")->capture_default_str();
    fr->callback([=, &g] {
        auto u = load_universe_json(*fu);
        auto rs = grid(*from, *to, *step);
        std::string s = csv_line({"R", "sigma"});
        for (const auto& p : efficient_frontier(u, rs))
            s += csv_line({num(p.required_return), p.feasible ? num(p.sigma) : "infeasible"});
        emit(g, s);
    });

    auto* mv = cmd->add_subcommand("mv", "minimum-variance portfolio");
    auto mu = std::make_shared<std::string>(kData + "/scenario1_universe.json");
    auto mr = std::make_shared<double>(0.011);
    mv->add_option("--universe", *mu, "universe JSON")->capture_default_str();
    mv->add_option("--R", *mr, "required return (x . r_hat <= -R)")->capture_default_str();
    mv->callback([=, &g] {
        auto p = min_variance(load_universe_json(*mu), *mr);
        emit(g, JsonWriter().nums("weights", p.weights).num("std", p.std_dev).num("return_slack", p.return_slack).dump() + "\n");
    });

    auto* cv = cmd->add_subcommand("cvar", "minimum-CVaR portfolio on seeded normal scenarios");
    auto cu = std::make_shared<std::string>(kData + "/scenario1_universe.json");
    auto cr = std::make_shared<double>(0.011), ca = std::make_shared<double>(0.95);
    auto ck = std::make_shared<std::size_t>(100000);
    cv->add_option("--universe", *cu, "universe JSON")->capture_default_str();
    cv->add_option("--R", *cr, "required return")->capture_default_str();
    cv->add_option("--alpha", *ca, "CVaR level in [0,1)")->capture_default_str();
    cv->add_option("--scenarios", *ck, "number of scenarios K")->capture_default_str()->check(CLI::PositiveNumber);
    cv->callback([=, &g] {
        auto u = load_universe_json(*cu);
        auto s = sample_scenarios(u, *ck, g.seed(), {}, g.threads);
        auto p = min_cvar(s, u.expected_losses, *cr, *ca);
        emit(g, JsonWriter()
                    .nums("weights", p.weights)
                    .num("var", p.var.value_or(NAN))
                    .num("cvar", p.cvar.value_or(NAN))
                    .num("std", p.std_dev)
                    .dump() + "\n");
    });

    auto* s2 = cmd->add_subcommand("scenario2", "MV against CVaR portfolio on skewed scenarios");
    auto su = std::make_shared<std::string>(kData + "/scenario2_universe.json");
    auto sr = std::make_shared<double>(0.006), sa = std::make_shared<double>(0.95), skew = std::make_shared<double>(0.7);
    auto sk = std::make_shared<std::size_t>(100000);
    s2->add_option("--universe", *su, "universe JSON")->capture_default_str();
    s2->add_option("--R", *sr, "required return")->capture_default_str();
    s2->add_option("--alpha", *sa, "CVaR level in [0,1)")->capture_default_str();
    s2->add_option("--skew", *skew, "per-asset skewness")->capture_default_str();
    s2->add_option("--scenarios", *sk, "number of scenarios K")->capture_default_str()->check(CLI::PositiveNumber);
    s2->callback([=, &g] {
        auto u = load_universe_json(*su);
        auto s = sample_scenarios(u, *sk, g.seed(), {ScenarioShape::skewed, *skew, 3.0}, g.threads);
        auto mvp = min_variance(u, *sr);
        auto cvp = min_cvar(s, u.expected_losses, *sr, *sa);
        auto rm = risk_report(portfolio_losses(s, mvp.weights), *sa);
        auto rc = risk_report(portfolio_losses(s, cvp.weights), *sa);
        emit(g, JsonWriter().raw("mv", report_json(rm, mvp.weights)).raw("cvar", report_json(rc, cvp.weights)).dump() +
                    "\n");
    });
}

void add_hedge(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("hedge", "CVaR-optimal adjustment of an option book");
    auto chain = std::make_shared<std::string>(kData + "/option_chain.csv");
    auto book = std::make_shared<std::string>(kData + "/book.csv");
    auto history = std::make_shared<std::string>(kData + "/price_history.csv");
    auto caps = std::make_shared<std::string>("Yahoo=50,Google=5");
    auto alpha = std::make_shared<double>(0.95), lambda = std::make_shared<double>(0.94);
    auto m = std::make_shared<std::size_t>(20000);
    auto days = std::make_shared<int>(3);
    auto show = std::make_shared<bool>(false);
    cmd->add_option("--chain", *chain, "option chain CSV underlying,kind,strike,price")->capture_default_str();
    cmd->add_option("--book", *book, "book CSV underlying,kind,strike,contracts")->capture_default_str();
    cmd->add_option("--history", *history, "price history CSV date,<names>")->capture_default_str();
    cmd->add_option("--caps", *caps, "adjustment caps per underlying, NAME=VALUE,...")->capture_default_str();
    cmd->add_option("--alpha", *alpha, "CVaR level")->capture_default_str();
    cmd->add_option("--lambda", *lambda, "EWMA decay")->capture_default_str();
    cmd->add_option("--days", *days, "horizon in trading days")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--scenarios", *m, "number of price scenarios M")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_flag("--adjustments", *show, "include the per-quote adjustments");
    cmd->callback([=, &g] {
        auto quotes = load_option_chain_csv(*chain);
        auto hist = load_price_history_csv(*history);
        auto names = underlyings(quotes);
        const Eigen::Index k = static_cast<Eigen::Index>(names.size());
        Eigen::MatrixXd returns(hist.prices.rows() - 1, k);
        Eigen::VectorXd s0(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            auto it = std::find(hist.names.begin(), hist.names.end(), names[static_cast<std::size_t>(j)]);
            if (it == hist.names.end()) throw FixtureError("price history has no column " + names[static_cast<std::size_t>(j)]);
            const Eigen::Index c = it - hist.names.begin();
            std::vector<double> p(hist.prices.col(c).data(), hist.prices.col(c).data() + hist.prices.rows());
            auto lr = log_returns(p);
            returns.col(j) = Eigen::Map<Eigen::VectorXd>(lr.data(), static_cast<Eigen::Index>(lr.size()));
            s0[j] = p.back();
        }
        HedgeProblem prob;
        prob.book = load_book_csv(*book, quotes);
        prob.caps = caps_by_underlying(quotes, parse_caps(*caps));
        prob.alpha = *alpha;
        Eigen::MatrixXd cov = scale_horizon(ewma_covariance(returns, *lambda), *days);
        prob.scenarios = simulate_prices(s0, cov, *m, g.seed(), g.threads);
        auto r = hedge(prob, quotes);
        JsonWriter j;
        j.raw("before", hedge_json(r.before)).raw("after", hedge_json(r.after));
        if (*show) {
            std::string arr = "[";
            for (std::size_t q = 0; q < quotes.size(); ++q) {
                arr += (q ? "," : "") + JsonWriter()
                                            .str("underlying", quotes[q].underlying)
                                            .str("kind", quotes[q].kind == OptionKind::call ? "call" : "put")
                                            .num("strike", quotes[q].strike)
                                            .num("y", r.adjustments[static_cast<Eigen::Index>(q)])
                                            .dump();
            }
            j.raw("adjustments", arr + "]");
        }
        emit(g, j.dump() + "\n");
    });
}

void add_norm(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("norm", "CVaR norms");
    cmd->require_subcommand(1);

    auto* ev = cmd->add_subcommand("eval", "evaluate the CVaR norm of a vector");
    auto x = std::make_shared<std::string>();
    auto alpha = std::make_shared<double>(0.5);
    auto algo = std::make_shared<std::string>("component");
    auto scaled = std::make_shared<bool>(false);
    ev->add_option("--x", *x, "comma-separated vector or a file holding it")->required();
    ev->add_option("--alpha", *alpha, "norm level")->capture_default_str();
    ev->add_option("--algo", *algo, "component, lp, knapsack or dnorm")
        ->capture_default_str()
        ->check(CLI::IsMember({"component", "lp", "knapsack", "dnorm"}));
    ev->add_flag("--scaled", *scaled, "scaled norm (component and lp only)");
    ev->callback([=, &g] {
        auto v = parse_vector(*x);
        double r = 0.0;
        if (*scaled) {
            if (*algo == "component") r = scaled_cvar_norm(v, *alpha).value;
            else if (*algo == "lp") r = scaled_cvar_norm_lp(v, *alpha);
            else throw UsageError("--scaled needs --algo component or lp");
        } else if (*algo == "component") {
            r = cvar_norm(v, *alpha).value;
        } else if (*algo == "lp") {
            r = cvar_norm_lp(v, *alpha);
        } else if (*algo == "knapsack") {
            r = cvar_norm_knapsack(v, *alpha);
        } else {
            r = d_norm(v, static_cast<double>(v.size()) * (1.0 - *alpha));
        }
        emit(g, num(r) + "\n");
    });

    auto* bench = cmd->add_subcommand("bench", "timing table as CSV algo,n,alpha,ms");
    auto dims = std::make_shared<std::string>("10,100,1000");
    auto alphas = std::make_shared<std::string>("0.5,0.9,0.99");
    auto reps = std::make_shared<std::size_t>(5);
    auto lp_max = std::make_shared<std::size_t>(2000);
    bench->add_option("--dims", *dims, "vector lengths")->capture_default_str();
    bench->add_option("--alphas", *alphas, "norm levels")->capture_default_str();
    bench->add_option("--reps", *reps, "timed repetitions per cell")->capture_default_str();
    bench->add_option("--lp-max-n", *lp_max, "largest n timed with the LP")->capture_default_str();
    bench->callback([=, &g] {
        auto n = to_sizes(parse_vector(*dims));
        auto a = parse_vector(*alphas);
        std::string s = csv_line({"algo", "n", "alpha", "ms"});
        for (const auto& r : benchmark_norms(n, a, *reps, g.seed(), *lp_max))
            s += csv_line({r.algo, std::to_string(r.n), num(r.alpha), fmt::format("{:.6f}", r.ms)});
        emit(g, s);
    });
}

void add_compare(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("compare", "CVaR norms against L_p norms");
    cmd->require_subcommand(1);

    auto* cu = cmd->add_subcommand("curves", "CSV alpha,c_alpha,lp,p_used along alpha");
    auto x = std::make_shared<std::string>("10,-14,2,-9");
    auto steps = std::make_shared<std::size_t>(50);
    cu->add_option("--x", *x, "comma-separated vector or a file holding it")->capture_default_str();
    cu->add_option("--steps", *steps, "alpha grid intervals")->capture_default_str()->check(CLI::PositiveNumber);
    cu->callback([=, &g] {
        std::string s = csv_line({"alpha", "c_alpha", "lp", "p_used"});
        for (const auto& c : norm_curves(parse_vector(*x), *steps))
            s += csv_line({num(c.alpha), num(c.c_alpha), num(c.lp), std::isinf(c.p_used) ? "inf" : num(c.p_used)});
        emit(g, s);
    });

    auto* bo = cmd->add_subcommand("bounds", "CSV p,f_min: best bound ratio per exponent");
    auto n = std::make_shared<std::size_t>(100);
    auto pf = std::make_shared<double>(1.2), pt = std::make_shared<double>(5.0), ps = std::make_shared<double>(0.1);
    bo->add_option("--n", *n, "dimension")->capture_default_str()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    bo->add_option("--p-from", *pf, "first exponent")->capture_default_str();
    bo->add_option("--p-to", *pt, "last exponent")->capture_default_str();
    bo->add_option("--p-step", *ps, "exponent step")->capture_default_str();
    bo->callback([=, &g] {
        std::string s = csv_line({"p", "f_min"});
        for (const auto& r : ratio_curve(*n, grid(*pf, *pt, *ps))) s += csv_line({num(r.p), num(r.f_min)});
        emit(g, s);
    });
}

void add_recover(CLI::App& app, Global& g) {
    auto* cmd = app.add_subcommand("recover", "atomic-norm recovery experiments");
    cmd->require_subcommand(1);

    auto* pr = cmd->add_subcommand("project", "hyperplane projections, CSV atom_label,ratio");
    auto p = std::make_shared<std::size_t>(4);
    auto alpha = std::make_shared<double>(0.625);
    auto trials = std::make_shared<std::size_t>(5000);
    pr->add_option("--p", *p, "dimension")->capture_default_str()->check(CLI::Range(2, 16));
    pr->add_option("--alpha", *alpha, "level inside ((p-2)/p, (p-1)/p)")->capture_default_str();
    pr->add_option("--trials", *trials, "number of random hyperplanes")->capture_default_str();
    pr->callback([=, &g] {
        std::string s = csv_line({"atom_label", "ratio"});
        for (const auto& c : projection_experiment(*p, *alpha, *trials, g.seed(), g.threads))
            s += csv_line({c.label, fmt::format("{:.2f}", c.ratio)});
        emit(g, s);
    });

    auto* sw = cmd->add_subcommand("sweep", "recovery probability per n, CSV");
    auto sp = std::make_shared<std::size_t>(100);
    auto signal = std::make_shared<std::string>("sparse");
    auto k = std::make_shared<std::size_t>(3);
    auto norm = std::make_shared<std::string>("cvar");
    auto sa = std::make_shared<double>(0.985);
    auto ns = std::make_shared<std::string>("10,20,30,40,50,60,70,80,90,100");
    auto st = std::make_shared<std::size_t>(50);
    sw->add_option("--p", *sp, "signal dimension")->capture_default_str()->check(CLI::PositiveNumber);
    sw->add_option("--signal", *signal, "sparse, binary or mixed")
        ->capture_default_str()
        ->check(CLI::IsMember({"sparse", "binary", "mixed"}));
    sw->add_option("--k", *k, "nonzeros of a sparse signal")->capture_default_str();
    sw->add_option("--norm", *norm, "cvar, l1 or linf")->capture_default_str()->check(CLI::IsMember({"cvar", "l1", "linf"}));
    sw->add_option("--alpha", *sa, "CVaR norm level; also sets the binary atom scale")->capture_default_str();
    sw->add_option("--n-grid", *ns, "measurement counts")->capture_default_str();
    sw->add_option("--trials", *st, "trials per n")->capture_default_str();
    sw->callback([=, &g] {
        SignalSpec spec;
        spec.kind = *signal == "sparse" ? SignalSpec::sparse : *signal == "binary" ? SignalSpec::binary_atom : SignalSpec::mixed;
        spec.k = *k;
        spec.alpha = *sa;
        RecoveryNorm rn = *norm == "cvar" ? RecoveryNorm::cvar : *norm == "l1" ? RecoveryNorm::l1 : RecoveryNorm::linf;
        auto n = to_sizes(parse_vector(*ns));
        std::string s = csv_line({"norm", "signal", "n", "trials", "successes", "probability"});
        for (const auto& r : sweep(*sp, spec, rn, *sa, n, *st, g.seed(), g.threads))
            s += csv_line({r.norm, r.signal, std::to_string(r.n), std::to_string(r.trials), std::to_string(r.successes),
                           num(r.probability)});
        emit(g, s);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cvarkit: CVaR risk, portfolio, hedging, norm and recovery experiments"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed_flag, "RNG seed (default: $CVARKIT_SEED, else 20160901)");
    app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--out", g.out, "write output to this file instead of stdout");
    app.fallthrough();

    add_risk(app, g);
    add_portfolio(app, g);
    add_hedge(app, g);
    add_norm(app, g);
    add_compare(app, g);
    add_recover(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const InfeasibleModel& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
