#pragma once

// Exact bond prices: Vasicek, CIR, the Vasicek- and CIR-type convergence
// models, and sums of independent CIR factors.

#include <array>
#include <cmath>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/kernels.hpp"
#include "shortrate/numerics/ode.hpp"

namespace shortrate {

/// Loadings of an exponential-affine price P = exp(A - B r_d - U r_e).
/// One-factor prices leave U at zero.
struct AffineSolution {
    double A = 0.0;
    double B = 0.0;
    double U = 0.0;

    double log_price(double r, double re = 0.0) const { return A - B * r - U * re; }
};

namespace detail {

/// Vasicek log-price with the variance sigma^2 passed as `var`, so the same
/// arithmetic serves the exact formula and the volatility-substitution
/// approximations. With B = (e^{beta tau} - 1)/beta:
///   ln P = -r B + (alpha/beta)(tau - B) + var/(4 beta) [B^2 + (2/beta)(tau - B)]
inline double vasicek_log_price(double alpha, double beta, double var, double r, double tau) {
    const double B = numerics::expm1_over(beta, tau);
    const double tmB = tau - B;
    return -r * B + (alpha / beta) * tmB + var / (4.0 * beta) * (B * B + (2.0 / beta) * tmB);
}

/// Sum of exponentials sum_k w_k e^{lambda_k s}; closed under products and
/// integrable in closed form with the guarded (e^{x t} - 1)/x kernel.
struct ExpSum {
    struct Term {
        double w;
        double lambda;
    };
    std::vector<Term> terms;

    void add(double w, double lambda) {
        if (w == 0.0) return;
        for (auto& t : terms)
            if (t.lambda == lambda) {
                t.w += w;
                return;
            }
        terms.push_back({w, lambda});
    }
    ExpSum scaled(double c) const {
        ExpSum out;
        for (const auto& t : terms) out.add(c * t.w, t.lambda);
        return out;
    }
    friend ExpSum operator*(const ExpSum& a, const ExpSum& b) {
        ExpSum out;
        for (const auto& x : a.terms)
            for (const auto& y : b.terms) out.add(x.w * y.w, x.lambda + y.lambda);
        return out;
    }
    friend ExpSum operator+(const ExpSum& a, const ExpSum& b) {
        ExpSum out = a;
        for (const auto& t : b.terms) out.add(t.w, t.lambda);
        return out;
    }
    double operator()(double s) const {
        double v = 0.0;
        for (const auto& t : terms) v += t.w * std::exp(t.lambda * s);
        return v;
    }
    /// Integral over [0, tau].
    double integral(double tau) const {
        double v = 0.0;
        for (const auto& t : terms) v += t.w * numerics::expm1_over(t.lambda, tau);
        return v;
    }
};

/// D(s) = (e^{a2 s} - 1)/a2 and U(s) = a3/(a2 - b2) [(e^{a2 s} - 1)/a2 - (e^{b2 s} - 1)/b2]
/// as exponential sums.
inline std::array<ExpSum, 2> convergence_loadings(const ConvergenceModel& m) {
    ExpSum D;
    D.add(1.0 / m.a2, m.a2);
    D.add(-1.0 / m.a2, 0.0);
    ExpSum U;
    const double k = m.a3 / (m.a2 - m.b2);
    U.add(k / m.a2, m.a2);
    U.add(-k / m.a2 + k / m.b2, 0.0);
    U.add(-k / m.b2, m.b2);
    return {D, U};
}

inline void require_conv_affine(const ConvergenceModel& m) {
    require(m.a2 != 0.0 && m.b2 != 0.0, "convergence model needs a2 != 0 and b2 != 0");
    require(m.a2 != m.b2, "convergence model needs a2 != b2");
}

/// Vasicek-type convergence solution with the three instantaneous
/// (co)variances held constant: var_d, var_e and cov_de = rho sd se.
inline AffineSolution conv_affine(const ConvergenceModel& m, double var_d, double var_e, double cov_de,
                                  double tau) {
    require_conv_affine(m);
    require(tau >= 0.0, "maturity must be non-negative");
    AffineSolution s;
    if (tau == 0.0) return s;
    const auto [D, U] = convergence_loadings(m);
    ExpSum integrand = D.scaled(-m.a1) + U.scaled(-m.b1);
    integrand = integrand + (D * D).scaled(0.5 * var_d);
    integrand = integrand + (U * U).scaled(0.5 * var_e);
    if (cov_de != 0.0) integrand = integrand + (D * U).scaled(cov_de);
    s.A = integrand.integral(tau);
    s.B = numerics::expm1_over(m.a2, tau);
    s.U = m.a3 / (m.a2 - m.b2) * (numerics::expm1_over(m.a2, tau) - numerics::expm1_over(m.b2, tau));
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vasicek

inline double vasicek_log_price(const CKLSParams& p, double r, double tau) {
    detail::require(p.gamma == 0.0, "vasicek_price needs gamma = 0");
    detail::require(p.beta != 0.0, "vasicek_price needs beta != 0");
    detail::require(tau >= 0.0, "maturity must be non-negative");
    return detail::vasicek_log_price(p.alpha, p.beta, p.sigma * p.sigma, r, tau);
}

inline double vasicek_price(const CKLSParams& p, double r, double tau) {
    return std::exp(vasicek_log_price(p, r, tau));
}

/// Vasicek price in the (kappa, theta, sigma, lambda) parametrization:
/// P = A(tau) e^{-B(tau) r}, B = (1 - e^{-kappa tau})/kappa,
/// ln A = (B - tau)(kappa^2 (theta - lambda sigma/kappa) - sigma^2/2)/kappa^2 - sigma^2 B^2/(4 kappa).
inline double vasicek_price_real(const VasicekRealParams& p, double r, double tau) {
    detail::require(p.kappa > 0.0 && p.sigma > 0.0, "Vasicek kappa and sigma must be positive");
    const double B = numerics::expm1_over(-p.kappa, tau);
    const double theta_q = p.theta - p.lambda * p.sigma / p.kappa;
    const double k2 = p.kappa * p.kappa;
    const double s2 = p.sigma * p.sigma;
    const double lnA = (B - tau) * (k2 * theta_q - 0.5 * s2) / k2 - s2 * B * B / (4.0 * p.kappa);
    return std::exp(lnA - B * r);
}

// ---------------------------------------------------------------------------
// CIR

/// Closed-form Riccati solution for dr = (alpha + beta r) dt + sigma sqrt(r) dw,
/// written in a form that stays accurate for large g tau and for sigma -> 0.
inline AffineSolution cir_affine(const CKLSParams& p, double tau) {
    detail::require(p.gamma == 0.5, "cir_price needs gamma = 1/2");
    detail::require(tau >= 0.0, "maturity must be non-negative");
    AffineSolution s;
    if (tau == 0.0) return s;
    const double k = -p.beta;
    const double s2 = p.sigma * p.sigma;
    const double g = std::sqrt(k * k + 2.0 * s2);
    const double gk = g + k;  // > 0 for sigma > 0
    const double em = std::exp(-g * tau);
    const double om = -std::expm1(-g * tau);
    const double den = gk * om + 2.0 * g * em;
    s.B = 2.0 * om / den;
    // ln A = -2 alpha tau/(g + k) + 2 alpha om/(g (g + k)) * L(x),
    // L(x) = -ln(1 - x)/x, x = om sigma^2/(g (g + k)).
    const double x = om * s2 / (g * gk);
    const double L = (x == 0.0) ? 1.0 : -std::log1p(-x) / x;
    s.A = -2.0 * p.alpha * tau / gk + 2.0 * p.alpha * om / (g * gk) * L;
    return s;
}

/// The same loadings from the Riccati system B' = 1 + beta B - sigma^2 B^2/2,
/// (ln A)' = -alpha B, integrated numerically.
inline AffineSolution cir_affine_ode(const CKLSParams& p, double tau, numerics::OdeTolerance tol = {}) {
    detail::require(p.gamma == 0.5, "cir_price needs gamma = 1/2");
    detail::require(tau >= 0.0, "maturity must be non-negative");
    const double s2 = p.sigma * p.sigma;
    const auto y = numerics::integrate_ode<2>(
        [&](double, const std::array<double, 2>& v) {
            return std::array<double, 2>{1.0 + p.beta * v[0] - 0.5 * s2 * v[0] * v[0], -p.alpha * v[0]};
        },
        {0.0, 0.0}, tau, tol);
    return AffineSolution{y[1], y[0], 0.0};
}

inline double cir_log_price(const CKLSParams& p, double r, double tau) {
    detail::require(r >= 0.0, "CIR needs a non-negative short rate");
    return cir_affine(p, tau).log_price(r);
}

inline double cir_price(const CKLSParams& p, double r, double tau) { return std::exp(cir_log_price(p, r, tau)); }

// ---------------------------------------------------------------------------
// Convergence models

inline AffineSolution conv_vasicek_affine(const ConvergenceModel& m, double tau) {
    m.validate();
    detail::require(m.gamma_d == 0.0 && m.gamma_e == 0.0, "conv_vasicek_price needs gamma_d = gamma_e = 0");
    return detail::conv_affine(m, m.sigma_d * m.sigma_d, m.sigma_e * m.sigma_e, m.rho * m.sigma_d * m.sigma_e,
                               tau);
}

inline double conv_vasicek_log_price(const ConvergenceModel& m, double rd, double re, double tau) {
    return conv_vasicek_affine(m, tau).log_price(rd, re);
}

inline double conv_vasicek_price(const ConvergenceModel& m, double rd, double re, double tau) {
    return std::exp(conv_vasicek_log_price(m, rd, re, tau));
}

/// CIR-type convergence model (gamma_d = gamma_e = 1/2, rho = 0): D, U, A from
///   D' = 1 + a2 D - sd^2 D^2/2,  U' = a3 D + b2 U - se^2 U^2/2,  A' = -a1 D - b1 U.
inline AffineSolution conv_cir_affine(const ConvergenceModel& m, double tau, numerics::OdeTolerance tol = {}) {
    m.validate();
    detail::require(m.gamma_d == 0.5 && m.gamma_e == 0.5, "conv_cir_price needs gamma_d = gamma_e = 1/2");
    detail::require(m.rho == 0.0, "conv_cir_price has no separable solution for rho != 0");
    detail::require(tau >= 0.0, "maturity must be non-negative");
    const double vd = m.sigma_d * m.sigma_d;
    const double ve = m.sigma_e * m.sigma_e;
    const auto y = numerics::integrate_ode<3>(
        [&](double, const std::array<double, 3>& v) {
            return std::array<double, 3>{1.0 + m.a2 * v[0] - 0.5 * vd * v[0] * v[0],
                                         m.a3 * v[0] + m.b2 * v[1] - 0.5 * ve * v[1] * v[1],
                                         -m.a1 * v[0] - m.b1 * v[1]};
        },
        {0.0, 0.0, 0.0}, tau, tol);
    return AffineSolution{y[2], y[0], y[1]};
}

inline double conv_cir_log_price(const ConvergenceModel& m, double rd, double re, double tau) {
    detail::require(rd >= 0.0 && re >= 0.0, "CIR-type convergence model needs non-negative rates");
    return conv_cir_affine(m, tau).log_price(rd, re);
}

inline double conv_cir_price(const ConvergenceModel& m, double rd, double re, double tau) {
    return std::exp(conv_cir_log_price(m, rd, re, tau));
}

// ---------------------------------------------------------------------------
// Sum of independent CIR factors

inline double multi_cir_log_price(const MultiCIRParams& p, const std::vector<double>& factors, double tau) {
    p.validate();
    detail::require(factors.size() == p.factors.size(), "one factor value per CIR factor is required");
    double lp = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) lp += cir_log_price(to_risk_neutral(p.factors[i]), factors[i], tau);
    return lp;
}

inline double multi_cir_price(const MultiCIRParams& p, const std::vector<double>& factors, double tau) {
    return std::exp(multi_cir_log_price(p, factors, tau));
}

}  // namespace shortrate
