#pragma once

// Grid error norms, experimental orders of convergence and log-log slopes.

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shortrate/error.hpp"

namespace shortrate {

inline std::vector<double> uniform_grid(double a, double b, int n) {
    detail::require(n >= 2 && b > a, "uniform grid needs n >= 2 and b > a");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    x[n - 1] = b;
    return x;
}

struct NormRow {
    double tau = 0.0;
    double sup = 0.0;
    double l2 = 0.0;
    std::size_t points = 0;
    std::size_t failed = 0;
};

struct ErrorReport {
    double r_min = 0.0, r_max = 0.0, h = 0.0;
    std::vector<NormRow> rows;
    std::vector<std::optional<double>> eoc_sup;  // between rows k and k+1
    std::vector<std::optional<double>> eoc_l2;
};

/// EOC_i = ln(err_i / err_{i+1}) / ln(tau_i / tau_{i+1}); empty where undefined.
inline std::vector<std::optional<double>> eoc(const std::vector<double>& errors, const std::vector<double>& taus) {
    detail::require(errors.size() == taus.size(), "errors and taus must have equal length");
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        detail::require(taus[i] != taus[i + 1], "EOC needs distinct tau values");
        if (errors[i] > 0.0 && errors[i + 1] > 0.0)
            out.emplace_back(std::log(errors[i] / errors[i + 1]) / std::log(taus[i] / taus[i + 1]));
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

/// Least-squares slope of ln y against ln x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require(x.size() == y.size() && x.size() >= 2, "slope fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        detail::require(x[i] > 0.0 && y[i] > 0.0, "slope fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    detail::require(den > 0.0, "slope fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

/// Sup and discrete L2 norms, (h sum d_i^2)^{1/2}, of approx - exact on a
/// uniform r-grid for each tau. Points where either function throws are
/// skipped if they are fewer than 1% of the grid.
template <class FA, class FE>
ErrorReport grid_error_norms(FA&& approx, FE&& exact, const std::vector<double>& r_grid, const std::vector<double>& taus) {
    detail::require(r_grid.size() >= 2, "error norms need at least two grid points");
    const double h = r_grid[1] - r_grid[0];
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        detail::require(std::abs((r_grid[i] - r_grid[i - 1]) - h) <= 1e-9 * std::abs(h) + 1e-15, "r-grid must be uniform");
    ErrorReport rep;
    rep.r_min = r_grid.front();
    rep.r_max = r_grid.back();
    rep.h = h;
    std::vector<double> sups, l2s;
    for (double tau : taus) {
        NormRow row;
        row.tau = tau;
        double ss = 0.0;
        for (double r : r_grid) {
            double d = 0.0;
            try {
                d = approx(r, tau) - exact(r, tau);
            } catch (const std::exception&) {
                ++row.failed;
                continue;
            }
            if (!std::isfinite(d)) {
                ++row.failed;
                continue;
            }
            ++row.points;
            row.sup = std::max(row.sup, std::abs(d));
            ss += d * d;
        }
        if (row.failed * 100 >= r_grid.size())
            throw NumericalError("evaluation failed at " + std::to_string(row.failed) + " of " +
                                 std::to_string(r_grid.size()) + " grid points for tau = " + std::to_string(tau));
        row.l2 = std::sqrt(h * ss);
        rep.rows.push_back(row);
        sups.push_back(row.sup);
        l2s.push_back(row.l2);
    }
    rep.eoc_sup = eoc(sups, taus);
    rep.eoc_l2 = eoc(l2s, taus);
    return rep;
}

inline void write_error_report_csv(std::ostream& os, const ErrorReport& rep) {
    const auto old = os.precision(10);
    os << "tau,sup,l2,eoc_sup,eoc_l2,points,failed\n";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        os << r.tau << ',' << r.sup << ',' << r.l2 << ',';
        if (k < rep.eoc_sup.size() && rep.eoc_sup[k]) os << *rep.eoc_sup[k];
        os << ',';
        if (k < rep.eoc_l2.size() && rep.eoc_l2[k]) os << *rep.eoc_l2[k];
        os << ',' << r.points << ',' << r.failed << '\n';
    }
    os.precision(old);
}

}  // namespace shortrate
