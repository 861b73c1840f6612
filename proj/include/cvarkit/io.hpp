#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvarkit/hedging.hpp"
#include "cvarkit/portfolio.hpp"
#include "cvarkit/risk.hpp"

namespace cvarkit {

// Malformed or unreadable fixture.
class FixtureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// {"outcomes":[...],"probs":[...]}
DiscreteLoss load_distribution_json(const std::string& path);
// {"expected_losses":[...],"covariance":[[...],...]}
AssetUniverse load_universe_json(const std::string& path);

// underlying,kind,strike,price
std::vector<OptionQuote> load_option_chain_csv(const std::string& path);
// underlying,kind,strike,contracts; every row must match a quote.
Book load_book_csv(const std::string& path, const std::vector<OptionQuote>& quotes);

struct PriceHistory {
    std::vector<std::string> names;
    Eigen::MatrixXd prices;  // rows = days (oldest first), columns = names
};
// date,<name>,<name>,...
PriceHistory load_price_history_csv(const std::string& path);

// Comma-separated numbers, or the path of a file holding them (commas or
// whitespace as separators).
std::vector<double> parse_vector(const std::string& text_or_path);

// Shortest round-trip decimal representation.
std::string format_number(double v);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace cvarkit
