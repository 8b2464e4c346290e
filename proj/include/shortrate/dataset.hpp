#pragma once

// Yield-curve panels: R_ij for days i and maturities tau_j, with weights and
// optional observed short rates. Long CSV format: date,tau,yield[,weight][,short_rate].

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "shortrate/closedform.hpp"
#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/simulate.hpp"

namespace shortrate {

struct YieldDataset {
    std::vector<std::string> dates;           // n days
    std::vector<double> taus;                 // m maturities, increasing
    std::vector<std::vector<double>> yields;  // yields[i][j], decimal
    std::vector<std::vector<double>> weights; // weights[i][j]
    std::vector<double> short_rates;          // empty when unobserved

    std::size_t n_days() const { return yields.size(); }
    std::size_t n_maturities() const { return taus.size(); }
    bool has_short_rates() const { return !short_rates.empty(); }

    /// Sets w_ij = tau_j^2.
    void default_weights() {
        weights.assign(yields.size(), std::vector<double>(taus.size()));
        for (auto& row : weights)
            for (std::size_t j = 0; j < taus.size(); ++j) row[j] = taus[j] * taus[j];
    }

    void validate() const {
        detail::require(!yields.empty(), "dataset has no days");
        detail::require(!taus.empty(), "dataset has no maturities");
        for (std::size_t j = 0; j < taus.size(); ++j) {
            detail::require(taus[j] > 0.0, "maturities must be positive");
            if (j > 0) detail::require(taus[j] > taus[j - 1], "maturities must be distinct and increasing");
        }
        detail::require(weights.size() == yields.size(), "weights must match the yield panel");
        for (std::size_t i = 0; i < yields.size(); ++i) {
            detail::require(yields[i].size() == taus.size() && weights[i].size() == taus.size(),
                            "row " + std::to_string(i) + " does not cover every maturity");
            for (std::size_t j = 0; j < taus.size(); ++j) {
                detail::require(std::isfinite(yields[i][j]), "non-finite yield at row " + std::to_string(i));
                detail::require(weights[i][j] >= 0.0 && std::isfinite(weights[i][j]),
                                "weights must be finite and non-negative");
            }
        }
        detail::require(short_rates.empty() || short_rates.size() == yields.size(),
                        "short rates must be given for every day or not at all");
        if (dates.size() != 0) detail::require(dates.size() == yields.size(), "one date label per day required");
    }

    /// Copy without the observed short rates.
    YieldDataset without_short_rates() const {
        YieldDataset d = *this;
        d.short_rates.clear();
        return d;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, std::size_t line_no, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == s.size() && !s.empty(), "line " + std::to_string(line_no) + ": invalid " + what + " '" + s + "'");
    return v;
}

}  // namespace detail

/// Reads the long format. Every date must quote every maturity; weights
/// default to tau^2; short_rate, if present, must agree across a date's rows.
inline YieldDataset read_dataset_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = detail::split_csv_line(line);
        break;
    }
    detail::require(!header.empty(), "dataset is empty");
    std::map<std::string, int> col;
    for (std::size_t c = 0; c < header.size(); ++c) col[header[c]] = static_cast<int>(c);
    for (const char* need : {"date", "tau", "yield"})
        detail::require(col.count(need) > 0, std::string("dataset header lacks column '") + need + "'");
    const bool has_w = col.count("weight") > 0;
    const bool has_r = col.count("short_rate") > 0;

    struct Row {
        double tau, y, w, r;
        bool w_set, r_set;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> by_date;
    std::vector<double> taus;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = detail::split_csv_line(line);
        detail::require(cells.size() == header.size(), "line " + std::to_string(line_no) + ": expected " +
                                                            std::to_string(header.size()) + " columns");
        Row row{};
        const std::string& date = cells[col["date"]];
        row.tau = detail::parse_number(cells[col["tau"]], line_no, "tau");
        row.y = detail::parse_number(cells[col["yield"]], line_no, "yield");
        detail::require(row.tau > 0.0, "line " + std::to_string(line_no) + ": tau must be positive");
        row.w_set = has_w && !cells[col["weight"]].empty();
        if (row.w_set) row.w = detail::parse_number(cells[col["weight"]], line_no, "weight");
        row.r_set = has_r && !cells[col["short_rate"]].empty();
        if (row.r_set) row.r = detail::parse_number(cells[col["short_rate"]], line_no, "short_rate");
        if (!by_date.count(date)) order.push_back(date);
        by_date[date].push_back(row);
        taus.push_back(row.tau);
    }
    detail::require(!order.empty(), "dataset has no data rows");
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    YieldDataset d;
    d.dates = order;
    d.taus = taus;
    d.yields.assign(order.size(), std::vector<double>(taus.size(), NAN));
    d.weights.assign(order.size(), std::vector<double>(taus.size(), NAN));
    bool any_r = false, all_r = true;
    std::vector<double> rates(order.size(), NAN);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& rows = by_date[order[i]];
        for (const auto& row : rows) {
            const std::size_t j = std::lower_bound(taus.begin(), taus.end(), row.tau) - taus.begin();
            detail::require(std::isnan(d.yields[i][j]), "date " + order[i] + " quotes a maturity twice");
            d.yields[i][j] = row.y;
            d.weights[i][j] = row.w_set ? row.w : row.tau * row.tau;
            if (row.r_set) {
                detail::require(std::isnan(rates[i]) || rates[i] == row.r,
                                "date " + order[i] + " has conflicting short rates");
                rates[i] = row.r;
            }
        }
        for (std::size_t j = 0; j < taus.size(); ++j)
            detail::require(!std::isnan(d.yields[i][j]), "date " + order[i] + " lacks maturity " + std::to_string(taus[j]));
        any_r = any_r || !std::isnan(rates[i]);
        all_r = all_r && !std::isnan(rates[i]);
    }
    detail::require(!any_r || all_r, "short_rate must be given for every date or for none");
    if (all_r && any_r) d.short_rates = rates;
    d.validate();
    return d;
}

inline void write_dataset_csv(std::ostream& os, const YieldDataset& d) {
    d.validate();
    const auto old = os.precision(17);
    os << "date,tau,yield,weight";
    if (d.has_short_rates()) os << ",short_rate";
    os << '\n';
    for (std::size_t i = 0; i < d.n_days(); ++i)
        for (std::size_t j = 0; j < d.n_maturities(); ++j) {
            os << (d.dates.empty() ? std::to_string(i + 1) : d.dates[i]) << ',' << d.taus[j] << ',' << d.yields[i][j]
               << ',' << d.weights[i][j];
            if (d.has_short_rates()) os << ',' << d.short_rates[i];
            os << '\n';
        }
    os.precision(old);
}

/// Builds a panel from a short-rate path and a log-price function.
template <class LogPrice>
YieldDataset panel_from_rates(const std::vector<double>& rates, const std::vector<double>& taus, LogPrice&& log_price) {
    YieldDataset d;
    d.taus = taus;
    d.short_rates = rates;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        d.dates.push_back(std::to_string(i + 1));
        std::vector<double> row(taus.size());
        for (std::size_t j = 0; j < taus.size(); ++j) row[j] = yield_from_log_price(log_price(rates[i], taus[j]), taus[j]);
        d.yields.push_back(row);
    }
    d.default_weights();
    d.validate();
    return d;
}

/// Noiseless CIR panel: a daily Euler path of the short rate (n_days values
/// starting at r0, step 1/252) priced with the exact bond formula.
inline YieldDataset synthetic_cir_panel(const CKLSParams& p, double r0, const std::vector<double>& taus, int n_days,
                                        std::uint64_t seed) {
    detail::require(p.gamma == 0.5, "synthetic CIR panel needs gamma = 1/2");
    detail::require(n_days >= 1, "panel needs at least one day");
    SimConfig cfg;
    cfg.dt = 1.0 / 252.0;
    cfg.n_steps = std::max(n_days - 1, 1);
    cfg.seed = seed;
    auto path = simulate_path_1f(ShortRateModel1F(p), r0, cfg);
    std::vector<double> rates(path.values[0].begin(), path.values[0].begin() + n_days);
    return panel_from_rates(rates, taus, [&](double r, double tau) { return cir_log_price(p, r, tau); });
}

inline std::vector<double> monthly_maturities() {
    std::vector<double> t;
    for (int k = 1; k <= 12; ++k) t.push_back(k / 12.0);
    return t;
}

inline std::vector<double> yearly_maturities() { return {1.0, 2.0, 3.0, 4.0, 5.0}; }

}  // namespace shortrate
