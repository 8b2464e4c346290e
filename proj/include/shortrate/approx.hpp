#pragma once

// Analytical approximations of CKLS-type bond prices and their leading
// error coefficients. All functions return log-prices.

#include <cmath>

#include "shortrate/closedform.hpp"
#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/kernels.hpp"
#include "shortrate/power_sum.hpp"

namespace shortrate {

enum class ApproxOrder { base, improved };

namespace detail {

inline void require_ckls_approx(const CKLSParams& p, double r, double tau) {
    p.validate();
    require(p.beta != 0.0, "approximation formulas need beta != 0");
    require(tau >= 0.0, "maturity must be non-negative");
    require(r >= 0.0 || p.gamma == 0.0, "negative short rate for a model with r^gamma volatility");
}

/// q(r) = gamma (2 gamma - 1) sigma^2 r^{2(2 gamma - 1)} + 2 gamma r^{2 gamma - 1} (alpha + beta r).
inline double cw_q(const CKLSParams& p, double r) {
    using numerics::rpow;
    const double g = p.gamma;
    if (g == 0.0) return 0.0;
    double q = 0.0;
    const double c1 = g * (2.0 * g - 1.0) * p.sigma * p.sigma;
    if (c1 != 0.0) {
        require(r > 0.0 || 2.0 * (2.0 * g - 1.0) >= 0.0, "Choi-Wirjanto q(r) is singular at r = 0 for gamma < 1/2");
        q += c1 * rpow(r, 2.0 * (2.0 * g - 1.0));
    }
    require(r > 0.0 || 2.0 * g - 1.0 >= 0.0, "Choi-Wirjanto q(r) is singular at r = 0 for gamma < 1/2");
    q += 2.0 * g * rpow(r, 2.0 * g - 1.0) * (p.alpha + p.beta * r);
    return q;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// One-factor CKLS

/// Vasicek formula with sigma^2 replaced by the instantaneous variance sigma^2 r^{2 gamma}.
inline double vas_subst_price(const CKLSParams& p, double r, double tau) {
    detail::require_ckls_approx(p, r, tau);
    const double var = p.gamma == 0.0 ? p.sigma * p.sigma : p.sigma * p.sigma * numerics::rpow(r, 2.0 * p.gamma);
    return detail::vasicek_log_price(p.alpha, p.beta, var, r, tau);
}

/// Choi-Wirjanto approximation, accurate to O(tau^5) in the log-price.
inline double cw_price(const CKLSParams& p, double r, double tau) {
    const double base = vas_subst_price(p, r, tau);
    if (p.gamma == 0.0) return base;
    const double q = detail::cw_q(p, r);
    const double b = p.beta;
    const double s2 = p.sigma * p.sigma;
    const double B = numerics::expm1_over(b, tau);
    const double tmB = tau - B;
    const double extra = tau * s2 / (4.0 * b) * (B * B + (2.0 / b) * tmB) -
                         s2 / (8.0 * b * b) *
                             (B * B * (2.0 * b * tau - 1.0) - 2.0 * B * (2.0 * tau - 3.0 / b) + 2.0 * tau * tau -
                              6.0 * tau / b);
    return base + q * extra;
}

/// Leading error coefficient of the volatility-substitution formula:
/// c4 = -(1/24) gamma r^{2 gamma - 2} sigma^2 [2 alpha r + 2 beta r^2 + (2 gamma - 1) r^{2 gamma} sigma^2].
inline SeriesInR vas_subst_c4(const CKLSParams& p) {
    const double g = p.gamma;
    const double s2 = p.sigma * p.sigma;
    const double pre = -(1.0 / 24.0) * g * s2;
    SeriesInR c4;
    c4.add_term(pre * 2.0 * p.alpha, 2.0 * g - 1.0, 0);
    c4.add_term(pre * 2.0 * p.beta, 2.0 * g, 0);
    c4.add_term(pre * (2.0 * g - 1.0) * s2, 4.0 * g - 2.0, 0);
    return c4;
}

/// Leading tau^5 error coefficient c5(r) of the Choi-Wirjanto formula.
inline SeriesInR cw_c5(const CKLSParams& p) {
    const double g = p.gamma;
    const double a = p.alpha, b = p.beta, s2 = p.sigma * p.sigma;
    const double pre = -(1.0 / 120.0) * g * s2;
    const double base = 2.0 * (g - 2.0);
    SeriesInR c5;
    c5.add_term(pre * 2.0 * a * a * (2.0 * g - 1.0), base + 2.0, 0);
    c5.add_term(pre * 4.0 * b * b * g, base + 4.0, 0);
    c5.add_term(pre * -8.0 * s2, base + 3.0 + 2.0 * g, 0);
    c5.add_term(pre * 2.0 * b * (1.0 - 5.0 * g + 6.0 * g * g) * s2, base + 2.0 * (1.0 + g), 0);
    c5.add_term(pre * s2 * s2 * (2.0 * g - 1.0) * (2.0 * g - 1.0) * (4.0 * g - 3.0), base + 4.0 * g, 0);
    c5.add_term(pre * 2.0 * a * b * (4.0 * g - 1.0), base + 3.0, 0);
    c5.add_term(pre * 2.0 * a * (2.0 * g - 1.0) * (3.0 * g - 2.0) * s2, base + 1.0 + 2.0 * g, 0);
    return c5;
}

/// k5(r), the tau^5 coefficient of the PDE residual of the Choi-Wirjanto formula.
inline SeriesInR cw_k5(const CKLSParams& p) {
    const double g = p.gamma;
    const double a = p.alpha, b = p.beta, s2 = p.sigma * p.sigma;
    const double pre = g * s2 / 120.0;
    const double base = 2.0 * (g - 2.0);
    const double om2 = (1.0 - 2.0 * g) * (1.0 - 2.0 * g);
    SeriesInR k5;
    k5.add_term(pre * 6.0 * a * a * b * (2.0 * g - 1.0), base + 2.0, 0);
    k5.add_term(pre * 12.0 * b * b * b * g, base + 4.0, 0);
    k5.add_term(pre * -10.0 * om2 * s2 * s2, base + 1.0 + 4.0 * g, 0);
    k5.add_term(pre * 6.0 * b * b * s2 * (1.0 - 5.0 * g + 6.0 * g * g), base + 2.0 * (1.0 + g), 0);
    k5.add_term(pre * b * s2 * -10.0 * (5.0 + 2.0 * g), base + 2.0 * g + 3.0, 0);
    k5.add_term(pre * b * s2 * 3.0 * om2 * (4.0 * g - 3.0) * s2, base + 4.0 * g, 0);
    k5.add_term(pre * 2.0 * a * 3.0 * b * b * (4.0 * g - 1.0), base + 3.0, 0);
    k5.add_term(pre * 2.0 * a * 3.0 * b * (2.0 - 7.0 * g + 6.0 * g * g) * s2, base + 1.0 + 2.0 * g, 0);
    k5.add_term(pre * 2.0 * a * -5.0 * (2.0 * g - 1.0) * s2, base + 2.0 + 2.0 * g, 0);
    return k5;
}

/// c6 = (1/6) (sigma^2 r^{2 gamma} c5''/2 + (alpha + beta r) c5' - k5).
inline SeriesInR cw_c6(const CKLSParams& p) {
    const SeriesInR c5 = cw_c5(p);
    const SeriesInR d1 = c5.derivative();
    const SeriesInR d2 = d1.derivative();
    SeriesInR c6 = SeriesInR::monomial(0.5 * p.sigma * p.sigma, 2.0 * p.gamma) * d2;
    c6 += SeriesInR{{p.alpha, 0.0, 0}, {p.beta, 1.0, 0}} * d1;
    c6 -= cw_k5(p);
    return c6 * (1.0 / 6.0);
}

/// Precomputed improved Choi-Wirjanto formula for repeated evaluation.
class CWImproved {
public:
    explicit CWImproved(const CKLSParams& p) : p_(p), c5_(cw_c5(p)), c6_(cw_c6(p)) {}

    double operator()(double r, double tau) const {
        const double ap = cw_price(p_, r, tau);
        if (p_.gamma == 0.0) return ap;
        const double t5 = numerics::ipow(tau, 5);
        return ap - c5_(r) * t5 - c6_(r) * t5 * tau;
    }
    const SeriesInR& c5() const { return c5_; }
    const SeriesInR& c6() const { return c6_; }

private:
    CKLSParams p_;
    SeriesInR c5_;
    SeriesInR c6_;
};

/// ln P^{ap2} = ln P^{ap} - c5 tau^5 - c6 tau^6.
inline double cw_ap2_price(const CKLSParams& p, double r, double tau) { return CWImproved(p)(r, tau); }

// ---------------------------------------------------------------------------
// Convergence model

/// Volatility-substitution approximation of the CKLS convergence model: the
/// Vasicek-type solution with sd^2 rd^{2 gd}, se^2 re^{2 ge} and
/// rho sd rd^{gd} se re^{ge} frozen at the current state.
inline double conv_approx_price(const ConvergenceModel& m, double rd, double re, double tau) {
    using numerics::rpow;
    m.validate();
    detail::require((rd >= 0.0 || m.gamma_d == 0.0) && (re >= 0.0 || m.gamma_e == 0.0),
                    "negative rate for a factor with r^gamma volatility");
    const double vold = m.gamma_d == 0.0 ? m.sigma_d : m.sigma_d * rpow(rd, m.gamma_d);
    const double vole = m.gamma_e == 0.0 ? m.sigma_e : m.sigma_e * rpow(re, m.gamma_e);
    return detail::conv_affine(m, vold * vold, vole * vole, m.rho * vold * vole, tau).log_price(rd, re);
}

struct ConvCorrection {
    PowerSum2 c4;
    PowerSum2 k4;
    PowerSum2 c5;
};

namespace detail {

/// c4(rd, re) = -(1/24) sd^2 gd rd^{2 gd - 2} (2 a1 rd + 2 a2 rd^2 + 2 a3 rd re + (2 gd - 1) rd^{2 gd} sd^2).
inline PowerSum2 conv_c4(const ConvergenceModel& m) {
    const double g = m.gamma_d;
    const double s2 = m.sigma_d * m.sigma_d;
    const double pre = -(1.0 / 24.0) * g * s2;
    PowerSum2 c4;
    c4.add_term(pre * 2.0 * m.a1, 2.0 * g - 1.0, 0.0);
    c4.add_term(pre * 2.0 * m.a2, 2.0 * g, 0.0);
    c4.add_term(pre * (2.0 * g - 1.0) * s2, 4.0 * g - 2.0, 0.0);
    c4.add_term(pre * 2.0 * m.a3, 2.0 * g - 1.0, 1.0);
    return c4;
}

/// k4(rd, re), the tau^4 coefficient of the PDE residual of conv_approx_price.
inline PowerSum2 conv_k4(const ConvergenceModel& m) {
    const double a1 = m.a1, a2 = m.a2, a3 = m.a3, b1 = m.b1, b2 = m.b2;
    const double sd = m.sigma_d, se = m.sigma_e, gd = m.gamma_d, ge = m.gamma_e, rho = m.rho;
    // (1/48) re^-2 rd^(gd-2) sd * [ ... ]; the bracket terms are listed as
    // (coefficient, power of rd, power of re) and shifted by the prefactor powers.
    struct T {
        double c, pd, pe;
    };
    const T bracket[] = {
        {12.0 * a2 * a2 * gd * sd, 2.0 + gd, 2.0},
        {-16.0 * gd * sd * sd * sd, 1.0 + 3.0 * gd, 2.0},
        {6.0 * a3 * b1 * ge * rho * se, 2.0, 1.0 + ge},
        {6.0 * a3 * b2 * ge * rho * se, 2.0, 2.0 + ge},
        {6.0 * a3 * a3 * gd * rho * se, 1.0, 3.0 + ge},
        {-3.0 * a3 * gd * rho * sd * sd * se, 2.0 * gd, 2.0 + ge},
        {3.0 * a3 * gd * gd * rho * sd * sd * se, 2.0 * gd, 2.0 + ge},
        {6.0 * a3 * gd * ge * rho * rho * sd * se * se, 1.0 + gd, 1.0 + 2.0 * ge},
        {-3.0 * a3 * ge * rho * se * se * se, 2.0, 3.0 * ge},
        {3.0 * a3 * ge * ge * rho * se * se * se, 2.0, 3.0 * ge},
        {6.0 * a1 * gd * 2.0 * a2 * sd, 1.0 + gd, 2.0},
        {6.0 * a1 * gd * a3 * rho * se, 1.0, 2.0 + ge},
        {6.0 * a2 * gd * (2.0 * gd - 1.0) * sd * sd * sd, 3.0 * gd, 2.0},
        {6.0 * a2 * gd * a3 * 2.0 * sd, 1.0 + gd, 3.0},
        {6.0 * a2 * gd * a3 * rho * se, 2.0, 2.0 + ge},
    };
    const double pre = sd / 48.0;
    PowerSum2 k4;
    for (const auto& t : bracket) k4.add_term(pre * t.c, t.pd + gd - 2.0, t.pe - 2.0);
    return k4;
}

}  // namespace detail

/// c4, k4 and c5 for the CKLS convergence model, with
///   c5 = (L[c4] - k4)/5,
///   L = (a1 + a2 rd + a3 re) d/drd + (b1 + b2 re) d/dre + (sd^2 rd^{2gd}/2) d2/drd2
///       + (se^2 re^{2ge}/2) d2/dre2 + rho sd rd^{gd} se re^{ge} d2/drd dre.
inline ConvCorrection conv_correction_coeffs(const ConvergenceModel& m) {
    m.validate();
    ConvCorrection out;
    out.c4 = detail::conv_c4(m);
    out.k4 = detail::conv_k4(m);
    const PowerSum2 dd = out.c4.d_rd();
    const PowerSum2 de = out.c4.d_re();
    PowerSum2 L = PowerSum2{{m.a1, 0.0, 0.0}, {m.a2, 1.0, 0.0}, {m.a3, 0.0, 1.0}} * dd;
    L += PowerSum2{{m.b1, 0.0, 0.0}, {m.b2, 0.0, 1.0}} * de;
    L += PowerSum2{{0.5 * m.sigma_d * m.sigma_d, 2.0 * m.gamma_d, 0.0}} * dd.d_rd();
    L += PowerSum2{{0.5 * m.sigma_e * m.sigma_e, 0.0, 2.0 * m.gamma_e}} * de.d_re();
    L += PowerSum2{{m.rho * m.sigma_d * m.sigma_e, m.gamma_d, m.gamma_e}} * dd.d_re();
    out.c5 = (L - out.k4) * (1.0 / 5.0);
    return out;
}

struct ConvCorrectionValues {
    double c4;
    double c5;
};

inline ConvCorrectionValues conv_correction_coeffs(const ConvergenceModel& m, double rd, double re) {
    detail::require(rd > 0.0 && re > 0.0, "convergence correction coefficients need rd > 0 and re > 0");
    const auto c = conv_correction_coeffs(m);
    return {c.c4(rd, re), c.c5(rd, re)};
}

/// Precomputed improved convergence approximation for repeated evaluation.
class ConvImproved {
public:
    explicit ConvImproved(const ConvergenceModel& m) : m_(m), coeffs_(conv_correction_coeffs(m)) {}

    double operator()(double rd, double re, double tau) const {
        const double ap = conv_approx_price(m_, rd, re, tau);
        if (m_.gamma_d == 0.0) return ap;
        detail::require(rd > 0.0 && re > 0.0, "improved convergence approximation needs rd > 0 and re > 0");
        const double t4 = numerics::ipow(tau, 4);
        return ap - coeffs_.c4(rd, re) * t4 - coeffs_.c5(rd, re) * t4 * tau;
    }
    const ConvCorrection& coefficients() const { return coeffs_; }

private:
    ConvergenceModel m_;
    ConvCorrection coeffs_;
};

/// ln P^{ap2} = ln P^{ap} - c4 tau^4 - c5 tau^5.
inline double conv_ap2_price(const ConvergenceModel& m, double rd, double re, double tau) {
    return ConvImproved(m)(rd, re, tau);
}

}  // namespace shortrate
