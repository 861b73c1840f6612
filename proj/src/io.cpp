#include "cvarkit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace cvarkit {

namespace {

using nlohmann::json;

std::ifstream open(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FixtureError("cannot open " + path);
    return f;
}

json read_json(const std::string& path) {
    auto f = open(path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw FixtureError(path + ": " + e.what());
    }
}

std::vector<double> number_array(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_array()) throw FixtureError(path + ": missing array '" + key + "'");
    std::vector<double> v;
    for (const auto& e : j[key]) {
        if (!e.is_number()) throw FixtureError(path + ": non-numeric entry in '" + key + "'");
        v.push_back(e.get<double>());
    }
    return v;
}

double parse_double(const std::string& s, const std::string& where) {
    std::string t = s;
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw FixtureError(where + ": not a number: '" + s + "'");
    return v;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

OptionKind parse_kind(const std::string& s, const std::string& where) {
    std::string k = lower(s);
    if (k == "call" || k == "c") return OptionKind::call;
    if (k == "put" || k == "p") return OptionKind::put;
    throw FixtureError(where + ": unknown option kind '" + s + "'");
}

// Rows of a headed CSV file, checking the header and column count.
std::vector<std::vector<std::string>> read_table(const std::string& path, const std::vector<std::string>& header) {
    auto f = open(path);
    std::string line;
    if (!std::getline(f, line)) throw FixtureError(path + ": empty file");
    auto head = split_csv_line(line);
    if (!header.empty()) {
        std::vector<std::string> h;
        for (auto& c : head) h.push_back(lower(c));
        if (h != header) throw FixtureError(path + ": unexpected header '" + line + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != head.size())
            throw FixtureError(fmt::format("{}:{}: expected {} fields, got {}", path, lineno, head.size(), cells.size()));
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

DiscreteLoss load_distribution_json(const std::string& path) {
    json j = read_json(path);
    auto x = number_array(j, "outcomes", path);
    auto p = number_array(j, "probs", path);
    try {
        return DiscreteLoss(std::move(x), std::move(p));
    } catch (const std::invalid_argument& e) {
        throw FixtureError(path + ": " + e.what());
    }
}

AssetUniverse load_universe_json(const std::string& path) {
    json j = read_json(path);
    auto r = number_array(j, "expected_losses", path);
    if (!j.contains("covariance") || !j["covariance"].is_array()) throw FixtureError(path + ": missing 'covariance'");
    const auto& c = j["covariance"];
    AssetUniverse u;
    const auto n = static_cast<Eigen::Index>(r.size());
    u.expected_losses = Eigen::Map<Eigen::VectorXd>(r.data(), n);
    if (static_cast<Eigen::Index>(c.size()) != n) throw FixtureError(path + ": covariance row count mismatch");
    u.covariance.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!c[i].is_array() || static_cast<Eigen::Index>(c[i].size()) != n)
            throw FixtureError(path + ": covariance must be square");
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!c[i][k].is_number()) throw FixtureError(path + ": non-numeric covariance entry");
            u.covariance(i, k) = c[i][k].get<double>();
        }
    }
    try {
        u.validate();
    } catch (const std::invalid_argument& e) {
        throw FixtureError(path + ": " + e.what());
    }
    return u;
}

std::vector<OptionQuote> load_option_chain_csv(const std::string& path) {
    std::vector<OptionQuote> q;
    for (const auto& r : read_table(path, {"underlying", "kind", "strike", "price"})) {
        OptionQuote o{r[0], parse_kind(r[1], path), parse_double(r[2], path), parse_double(r[3], path)};
        try {
            o.validate();
        } catch (const std::invalid_argument& e) {
            throw FixtureError(path + ": " + e.what());
        }
        q.push_back(std::move(o));
    }
    if (q.empty()) throw FixtureError(path + ": no quotes");
    return q;
}

Book load_book_csv(const std::string& path, const std::vector<OptionQuote>& quotes) {
    Book b;
    b.positions.assign(quotes.size(), 0.0);
    for (const auto& r : read_table(path, {"underlying", "kind", "strike", "contracts"})) {
        OptionKind kind = parse_kind(r[1], path);
        double strike = parse_double(r[2], path);
        auto it = std::find_if(quotes.begin(), quotes.end(), [&](const OptionQuote& o) {
            return o.underlying == r[0] && o.kind == kind && std::fabs(o.strike - strike) <= 1e-9 * strike;
        });
        if (it == quotes.end()) throw FixtureError(path + ": position has no quote: " + r[0] + " " + r[1] + " " + r[2]);
        b.positions[static_cast<std::size_t>(it - quotes.begin())] += parse_double(r[3], path);
    }
    return b;
}

PriceHistory load_price_history_csv(const std::string& path) {
    auto f = open(path);
    std::string line;
    if (!std::getline(f, line)) throw FixtureError(path + ": empty file");
    auto head = split_csv_line(line);
    if (head.size() < 2) throw FixtureError(path + ": need a date column and at least one price column");
    PriceHistory h;
    h.names.assign(head.begin() + 1, head.end());
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != head.size()) throw FixtureError(path + ": ragged row");
        std::vector<double> v;
        for (std::size_t i = 1; i < cells.size(); ++i) v.push_back(parse_double(cells[i], path));
        rows.push_back(std::move(v));
    }
    if (rows.size() < 2) throw FixtureError(path + ": need at least two days of prices");
    h.prices.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(h.names.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t i = 0; i < h.names.size(); ++i)
            h.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
    return h;
}

std::vector<double> parse_vector(const std::string& text_or_path) {
    std::string text = text_or_path;
    std::error_code ec;
    if (std::filesystem::is_regular_file(text_or_path, ec)) {
        auto f = open(text_or_path);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    std::replace_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }, ',');
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(parse_double(tok, "vector"));
    if (v.empty()) throw FixtureError("empty vector");
    return v;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    return fmt::format("{}", v);
}

}  // namespace cvarkit
