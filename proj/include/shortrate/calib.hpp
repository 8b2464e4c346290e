#pragma once

// Least-squares calibration of CKLS parameters to yield panels:
//   F = (1/mn) sum_ij w_ij (R(tau_j, r_i) - R_ij)^2.
// With the volatility-substitution formula ln P = c0 + c1 alpha + c2 sigma^2,
// (alpha, sigma^2) solve a 2x2 linear problem for every beta, leaving a 1-D
// search over beta per gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "shortrate/approx.hpp"
#include "shortrate/closedform.hpp"
#include "shortrate/dataset.hpp"
#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/kernels.hpp"
#include "shortrate/numerics/minimize.hpp"

namespace shortrate {

enum class CalibPricer { vas_subst, cw, cw_improved, exact };

struct BetaBracket {
    double lo = -5.0;
    double hi = -1e-4;
    int n_scan = 61;  // log-spaced in |beta|
};

struct CalibrationResult {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma2 = 0.0;
    double gamma = 0.0;
    double F = 0.0;
    bool sigma2_at_bound = false;  // unconstrained optimum had sigma^2 < 0
    std::uintmax_t iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<numerics::ScanPoint> scan;

    double sigma() const { return std::sqrt(sigma2); }
    CKLSParams params() const { return {alpha, beta, std::sqrt(sigma2), gamma}; }
};

/// Log-price function for the chosen pricer.
inline double calib_log_price(const CKLSParams& p, double r, double tau, CalibPricer pricer) {
    switch (pricer) {
        case CalibPricer::vas_subst: return vas_subst_price(p, r, tau);
        case CalibPricer::cw: return cw_price(p, r, tau);
        case CalibPricer::cw_improved: return cw_ap2_price(p, r, tau);
        case CalibPricer::exact:
            if (p.gamma == 0.0) return vasicek_log_price(p, r, tau);
            if (p.gamma == 0.5) return cir_log_price(p, r, tau);
            throw DomainError("no exact pricer for gamma other than 0 and 1/2");
    }
    throw DomainError("unknown pricer");
}

/// Weighted mean squared yield error.
inline double objective_F(const CKLSParams& p, const YieldDataset& data, CalibPricer pricer = CalibPricer::vas_subst) {
    data.validate();
    detail::require(data.has_short_rates(), "objective needs observed short rates");
    const std::size_t n = data.n_days(), m = data.n_maturities();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double lp = 0.0;
            try {
                lp = calib_log_price(p, data.short_rates[i], data.taus[j], pricer);
            } catch (const DomainError& e) {
                throw DomainError("day " + std::to_string(i) + ", maturity " + std::to_string(j) + ": " + e.what());
            }
            const double d = yield_from_log_price(lp, data.taus[j]) - data.yields[i][j];
            sum += data.weights[i][j] * d * d;
        }
    return sum / static_cast<double>(n * m);
}

namespace detail {

/// Per-maturity loadings of the volatility-substitution formula for fixed beta:
/// ln P = -B r + a1 alpha + a2 v with v the local variance.
struct SubstLoadings {
    std::vector<double> B, a1, a2;
};

inline SubstLoadings subst_loadings(double beta, const std::vector<double>& taus) {
    require(beta != 0.0, "beta must be non-zero");
    SubstLoadings L;
    for (double tau : taus) {
        const double B = numerics::expm1_over(beta, tau);
        L.B.push_back(B);
        L.a1.push_back((tau - B) / beta);
        L.a2.push_back((B * B + (2.0 / beta) * (tau - B)) / (4.0 * beta));
    }
    return L;
}

/// Solves the 2x2 symmetric system [[a, b], [b, c]] x = [u, v].
inline std::array<double, 2> solve2(double a, double b, double c, double u, double v, const char* what) {
    const double det = a * c - b * b;
    require(std::abs(det) > 1e-14 * std::abs(a * c) && a > 0.0 && c > 0.0, what);
    return {(c * u - b * v) / det, (a * v - b * u) / det};
}

}  // namespace detail

struct LinearSolution {
    double alpha = 0.0;
    double sigma2 = 0.0;
    double F = 0.0;
    bool sigma2_at_bound = false;
};

/// Exact minimizer of F over (alpha, sigma^2 >= 0) for fixed (beta, gamma)
/// under the volatility-substitution pricer.
inline LinearSolution solve_linear_subproblem(double beta, double gamma, const YieldDataset& data) {
    data.validate();
    detail::require(data.has_short_rates(), "linear subproblem needs observed short rates");
    detail::require(gamma >= 0.0, "gamma must be non-negative");
    const auto L = detail::subst_loadings(beta, data.taus);
    const std::size_t n = data.n_days(), m = data.n_maturities();
    // Yield model: R = t + u alpha + v sigma^2 with t = B r / tau, u = -a1 / tau, v = -a2 r^{2 gamma} / tau.
    double suu = 0, suv = 0, svv = 0, sue = 0, sve = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = data.short_rates[i];
        detail::require(r >= 0.0 || gamma == 0.0, "negative short rate with gamma > 0");
        const double r2g = gamma == 0.0 ? 1.0 : numerics::rpow(r, 2.0 * gamma);
        for (std::size_t j = 0; j < m; ++j) {
            const double tau = data.taus[j], w = data.weights[i][j];
            const double u = -L.a1[j] / tau, v = -L.a2[j] * r2g / tau;
            const double e = data.yields[i][j] - L.B[j] * r / tau;
            suu += w * u * u;
            suv += w * u * v;
            svv += w * v * v;
            sue += w * u * e;
            sve += w * v * e;
        }
    }
    LinearSolution s;
    const auto x = detail::solve2(suu, suv, svv, sue, sve, "singular normal equations (need at least two maturities)");
    s.alpha = x[0];
    s.sigma2 = x[1];
    if (s.sigma2 < 0.0) {
        detail::require(suu > 0.0, "singular normal equations");
        s.alpha = sue / suu;
        s.sigma2 = 0.0;
        s.sigma2_at_bound = true;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = data.short_rates[i];
        const double r2g = gamma == 0.0 ? 1.0 : numerics::rpow(r, 2.0 * gamma);
        for (std::size_t j = 0; j < m; ++j) {
            const double tau = data.taus[j];
            const double R = (L.B[j] * r - L.a1[j] * s.alpha - L.a2[j] * r2g * s.sigma2) / tau;
            const double d = R - data.yields[i][j];
            sum += data.weights[i][j] * d * d;
        }
    }
    s.F = sum / static_cast<double>(n * m);
    return s;
}

namespace detail {

inline std::vector<double> beta_scan_points(const BetaBracket& br) {
    require(br.lo < br.hi && br.hi < 0.0, "beta bracket must lie in the mean-reverting region beta < 0");
    require(br.n_scan >= 3, "beta scan needs at least three points");
    std::vector<double> pts(br.n_scan);
    const double a = std::log(-br.hi), b = std::log(-br.lo);
    for (int k = 0; k < br.n_scan; ++k) pts[k] = -std::exp(b + (a - b) * k / (br.n_scan - 1));
    return pts;
}

template <class F>
numerics::MinimizeResult minimize_beta(F&& f, const BetaBracket& br) {
    auto res = numerics::minimize_scanned(f, beta_scan_points(br), std::numeric_limits<double>::digits / 2 + 4);
    const auto& tr = res.trace;
    std::size_t best = 0;
    for (std::size_t k = 1; k < tr.size(); ++k)
        if (tr[k].f < tr[best].f) best = k;
    if (best == 0 || best + 1 == tr.size())
        throw NumericalError("no interior minimum of F in beta bracket [" + std::to_string(br.lo) + ", " +
                             std::to_string(br.hi) + "]; best scan point beta = " + std::to_string(tr[best].x));
    return res;
}

}  // namespace detail

/// Profiles out (alpha, sigma^2) and minimizes F over beta.
inline CalibrationResult calibrate_beta_1d(double gamma, const YieldDataset& data, const BetaBracket& bracket = {}) {
    auto f = [&](double beta) { return solve_linear_subproblem(beta, gamma, data).F; };
    const auto mr = detail::minimize_beta(f, bracket);
    const auto s = solve_linear_subproblem(mr.x, gamma, data);
    CalibrationResult res;
    res.alpha = s.alpha;
    res.beta = mr.x;
    res.sigma2 = s.sigma2;
    res.gamma = gamma;
    res.F = s.F;
    res.sigma2_at_bound = s.sigma2_at_bound;
    res.iterations = mr.iterations;
    res.bracket_lo = mr.lo;
    res.bracket_hi = mr.hi;
    res.scan = mr.trace;
    return res;
}

struct GammaScanEntry {
    double gamma = 0.0;
    std::optional<CalibrationResult> result;
    std::string error;
};

struct GammaScan {
    std::vector<GammaScanEntry> entries;
    std::optional<std::size_t> argmin;
};

/// One calibrate_beta_1d per gamma; failures are recorded and the scan continues.
inline GammaScan gamma_scan(const YieldDataset& data, const std::vector<double>& gammas, const BetaBracket& bracket = {}) {
    detail::require(!gammas.empty(), "gamma grid is empty");
    GammaScan out;
    for (double g : gammas) {
        GammaScanEntry e;
        e.gamma = g;
        try {
            e.result = calibrate_beta_1d(g, data, bracket);
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        out.entries.push_back(e);
    }
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
        if (!out.entries[k].result) continue;
        if (!out.argmin || out.entries[k].result->F < out.entries[*out.argmin].result->F) out.argmin = k;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Latent short rates

struct LatentResult {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma2 = 0.0;
    double gamma = 0.0;
    double F = 0.0;
    std::vector<double> rates;
    std::vector<double> local_variance;  // y_i = sigma^2 r_i^{2 gamma}, CKLS only
    double ratio_spread = 0.0;           // (max - min) / median of y_i / r_i^{2 gamma}
    bool nonpositive_rate = false;
    bool sigma2_at_bound = false;
    std::uintmax_t iterations = 0;
};

/// Vasicek (gamma = 0) fit with unknown short rates at fixed beta. The yield
/// model R_ij = b_j r_i + u_j alpha + v_j sigma^2 gives normal equations with
/// an arrow structure: each r_i couples only to (alpha, sigma^2), so the rates
/// are eliminated through a 2x2 Schur complement.
inline LatentResult latent_short_rate_vasicek(const YieldDataset& data, double beta) {
    data.validate();
    const std::size_t n = data.n_days(), m = data.n_maturities();
    detail::require(m >= 2, "latent short rates need at least two maturities");
    const auto L = detail::subst_loadings(beta, data.taus);
    std::vector<double> b(m), u(m), v(m);
    for (std::size_t j = 0; j < m; ++j) {
        b[j] = L.B[j] / data.taus[j];
        u[j] = -L.a1[j] / data.taus[j];
        v[j] = -L.a2[j] / data.taus[j];
    }
    // Per day: D_i = sum w b^2, e_i = [sum w b u, sum w b v], y_i = sum w b R.
    // Schur: S = G - sum e_i e_i^T / D_i, rhs = g - sum e_i y_i / D_i.
    auto solve = [&](bool with_sigma) {
        double S00 = 0, S01 = 0, S11 = 0, g0 = 0, g1 = 0;
        std::vector<double> D(n), e0(n), e1(n), yb(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0, x0 = 0, x1 = 0, y = 0;
            for (std::size_t j = 0; j < m; ++j) {
                const double w = data.weights[i][j], R = data.yields[i][j];
                d += w * b[j] * b[j];
                x0 += w * b[j] * u[j];
                x1 += w * b[j] * v[j];
                y += w * b[j] * R;
                S00 += w * u[j] * u[j];
                S01 += w * u[j] * v[j];
                S11 += w * v[j] * v[j];
                g0 += w * u[j] * R;
                g1 += w * v[j] * R;
            }
            detail::require(d > 0.0, "day " + std::to_string(i) + " has no weighted quotes");
            D[i] = d;
            e0[i] = x0;
            e1[i] = x1;
            yb[i] = y;
            S00 -= x0 * x0 / d;
            S01 -= x0 * x1 / d;
            S11 -= x1 * x1 / d;
            g0 -= x0 * y / d;
            g1 -= x1 * y / d;
        }
        std::array<double, 2> glob{0.0, 0.0};
        if (with_sigma) {
            glob = detail::solve2(S00, S01, S11, g0, g1, "singular latent-rate system (need at least two maturities)");
        } else {
            detail::require(S00 > 0.0, "singular latent-rate system");
            glob = {g0 / S00, 0.0};
        }
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = (yb[i] - e0[i] * glob[0] - e1[i] * glob[1]) / D[i];
        return std::make_pair(glob, r);
    };
    auto [glob, r] = solve(true);
    LatentResult res;
    if (glob[1] < 0.0) {
        std::tie(glob, r) = solve(false);
        res.sigma2_at_bound = true;
    }
    res.alpha = glob[0];
    res.sigma2 = glob[1];
    res.beta = beta;
    res.gamma = 0.0;
    res.rates = r;
    res.nonpositive_rate = std::any_of(r.begin(), r.end(), [](double x) { return x <= 0.0; });
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double d = b[j] * r[i] + u[j] * res.alpha + v[j] * res.sigma2 - data.yields[i][j];
            sum += data.weights[i][j] * d * d;
        }
    res.F = sum / static_cast<double>(n * m);
    return res;
}

/// Vasicek latent-rate fit with an outer search over beta.
inline LatentResult latent_short_rate_vasicek(const YieldDataset& data, const BetaBracket& bracket = {}) {
    auto f = [&](double beta) { return latent_short_rate_vasicek(data, beta).F; };
    const auto mr = detail::minimize_beta(f, bracket);
    auto res = latent_short_rate_vasicek(data, mr.x);
    res.iterations = mr.iterations;
    return res;
}

namespace detail {

inline double median(std::vector<double> v) {
    require(!v.empty(), "median of an empty set");
    const std::size_t k = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + k, v.end());
    const double hi = v[k];
    if (v.size() % 2 == 1) return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + k));
}

}  // namespace detail

/// CKLS fit with unknown short rates at fixed (beta, gamma). The local variance
/// y_i = sigma^2 r_i^{2 gamma} is treated as a free per-day unknown, so every
/// day contributes a 2x2 block (r_i, y_i) coupled only through alpha. Sigma^2
/// is then the median of y_i / r_i^{2 gamma} over days with r_i > 1e-8.
inline LatentResult latent_short_rate_ckls(const YieldDataset& data, double gamma, double beta) {
    data.validate();
    detail::require(gamma >= 0.0, "gamma must be non-negative");
    const std::size_t n = data.n_days(), m = data.n_maturities();
    detail::require(m >= 3, "latent CKLS fit needs at least three maturities");
    const auto L = detail::subst_loadings(beta, data.taus);
    std::vector<double> b(m), u(m), v(m);
    for (std::size_t j = 0; j < m; ++j) {
        b[j] = L.B[j] / data.taus[j];
        u[j] = -L.a1[j] / data.taus[j];
        v[j] = -L.a2[j] / data.taus[j];
    }
    // Block i: M_i = [[bb, bv], [bv, vv]], coupling c_i = [bu, vu], rhs [bR, vR].
    struct Block {
        double bb, bv, vv, bu, vu, bR, vR;
    };
    std::vector<Block> blk(n);
    double S = 0.0, g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Block k{};
        for (std::size_t j = 0; j < m; ++j) {
            const double w = data.weights[i][j], R = data.yields[i][j];
            k.bb += w * b[j] * b[j];
            k.bv += w * b[j] * v[j];
            k.vv += w * v[j] * v[j];
            k.bu += w * b[j] * u[j];
            k.vu += w * v[j] * u[j];
            k.bR += w * b[j] * R;
            k.vR += w * v[j] * R;
            S += w * u[j] * u[j];
            g += w * u[j] * R;
        }
        const auto mc = detail::solve2(k.bb, k.bv, k.vv, k.bu, k.vu, "singular per-day block in latent CKLS fit");
        const auto mr = detail::solve2(k.bb, k.bv, k.vv, k.bR, k.vR, "singular per-day block in latent CKLS fit");
        S -= k.bu * mc[0] + k.vu * mc[1];
        g -= k.bu * mr[0] + k.vu * mr[1];
        blk[i] = k;
    }
    detail::require(S > 0.0, "singular latent CKLS system");
    LatentResult res;
    res.alpha = g / S;
    res.beta = beta;
    res.gamma = gamma;
    res.rates.resize(n);
    res.local_variance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& k = blk[i];
        const auto x = detail::solve2(k.bb, k.bv, k.vv, k.bR - k.bu * res.alpha, k.vR - k.vu * res.alpha,
                                      "singular per-day block in latent CKLS fit");
        res.rates[i] = x[0];
        res.local_variance[i] = x[1];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double d = b[j] * res.rates[i] + u[j] * res.alpha + v[j] * res.local_variance[i] - data.yields[i][j];
            sum += data.weights[i][j] * d * d;
        }
    res.F = sum / static_cast<double>(n * m);
    res.nonpositive_rate = gamma > 0.0 && std::any_of(res.rates.begin(), res.rates.end(), [](double x) { return x <= 0.0; });
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n; ++i) {
        if (gamma > 0.0 && !(res.rates[i] > 1e-8)) continue;
        const double r2g = gamma == 0.0 ? 1.0 : numerics::rpow(res.rates[i], 2.0 * gamma);
        ratios.push_back(res.local_variance[i] / r2g);
    }
    if (!ratios.empty()) {
        res.sigma2 = detail::median(ratios);
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        res.ratio_spread = res.sigma2 != 0.0 ? (*hi - *lo) / std::abs(res.sigma2) : std::numeric_limits<double>::infinity();
    }
    if (res.sigma2 < 0.0) {
        res.sigma2 = 0.0;
        res.sigma2_at_bound = true;
    }
    return res;
}

/// Latent CKLS fit with an outer search over beta.
inline LatentResult latent_short_rate_ckls(const YieldDataset& data, double gamma, const BetaBracket& bracket = {}) {
    auto f = [&](double beta) { return latent_short_rate_ckls(data, gamma, beta).F; };
    const auto mr = detail::minimize_beta(f, bracket);
    auto res = latent_short_rate_ckls(data, gamma, mr.x);
    res.iterations = mr.iterations;
    return res;
}

}  // namespace shortrate
