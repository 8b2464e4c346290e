#pragma once

// Model catalogue: every short-rate family the toolkit prices or simulates,
// held as plain parameter values. All rates are decimals (0.05 == 5%).

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/numerics/kernels.hpp"

namespace shortrate {

/// Risk-neutral CKLS dynamics dr = (alpha + beta r) dt + sigma r^gamma dw.
/// gamma = 0 is Vasicek, gamma = 1/2 is CIR, alpha = 0 and gamma = 1 is Dothan
/// (with beta the drift rate mu) or geometric Brownian motion.
struct CKLSParams {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;

    void validate() const {
        detail::require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(sigma) &&
                            std::isfinite(gamma),
                        "CKLS parameters must be finite");
        detail::require(sigma >= 0.0, "CKLS sigma must be non-negative");
        detail::require(gamma >= 0.0, "CKLS gamma must be non-negative");
    }
    double sigma2() const { return sigma * sigma; }
};

/// Vasicek in the real measure with a constant market price of risk.
struct VasicekRealParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double lambda = 0.0;
};

/// CIR in the real measure with market price of risk lambda * sqrt(r).
struct CIRRealParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double lambda = 0.0;
};

/// Black-Karasinski: r = e^x with dx = kappa (theta - x) dt + sigma dw.
struct BlackKarasinskiParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;

    void validate() const {
        detail::require(kappa > 0.0, "Black-Karasinski kappa must be positive");
        detail::require(sigma > 0.0, "Black-Karasinski sigma must be positive");
        detail::require(std::isfinite(theta), "Black-Karasinski theta must be finite");
    }
};

/// Nonlinear drift a_m1/r + a_0 + a_1 r + a_2 r^2 with CKLS-type volatility.
/// Catalogued for drift evaluation and simulation only.
struct AitSahaliaDriftParams {
    double a_m1 = 0.0;
    double a_0 = 0.0;
    double a_1 = 0.0;
    double a_2 = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
};

/// Two-factor convergence model in the risk-neutral measure:
///   dr_d = (a1 + a2 r_d + a3 r_e) dt + sigma_d r_d^gamma_d dw_d
///   dr_e = (b1 + b2 r_e) dt + sigma_e r_e^gamma_e dw_e,   corr(dw_d, dw_e) = rho
struct ConvergenceModel {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double sigma_d = 0.0, sigma_e = 0.0;
    double gamma_d = 0.0, gamma_e = 0.0;
    double rho = 0.0;

    void validate() const {
        detail::require(sigma_d > 0.0 && sigma_e > 0.0, "convergence model volatilities must be positive");
        detail::require(gamma_d >= 0.0 && gamma_e >= 0.0, "convergence model gammas must be non-negative");
        detail::require(std::abs(rho) < 1.0, "convergence model correlation must lie in (-1, 1)");
    }
};

/// Corzo-Schwarz real-measure convergence parameters with constant market
/// prices of risk.
struct ConvergenceRealParams {
    double a = 0.0, b = 0.0;  // domestic: a + b (r_e - r_d)
    double c = 0.0, d = 0.0;  // European: c (d - r_e)
    double sigma_d = 0.0, sigma_e = 0.0;
    double lambda_d = 0.0, lambda_e = 0.0;
    double rho = 0.0;
    double gamma_d = 0.0, gamma_e = 0.0;
};

/// Fong-Vasicek stochastic volatility model (simulation only).
///   dr = kappa1 (theta1 - r) dt + sqrt(y) dw1,  dy = kappa2 (theta2 - y) dt + v sqrt(y) dw2
struct FongVasicekParams {
    double kappa1 = 0.0, theta1 = 0.0;
    double kappa2 = 0.0, theta2 = 0.0;
    double v = 0.0;
    double rho = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;

    void validate() const {
        detail::require(kappa1 > 0.0 && kappa2 > 0.0 && v > 0.0, "Fong-Vasicek kappa1, kappa2, v must be positive");
        detail::require(std::abs(rho) < 1.0, "Fong-Vasicek correlation must lie in (-1, 1)");
    }
};

struct CIRFactor {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double lambda = 0.0;
};

/// Short rate as a sum of independent CIR factors.
struct MultiCIRParams {
    std::vector<CIRFactor> factors;

    void validate() const {
        detail::require(!factors.empty(), "multi-factor CIR needs at least one factor");
        for (const auto& f : factors)
            detail::require(f.kappa > 0.0 && f.sigma > 0.0, "CIR factor kappa and sigma must be positive");
    }
};

struct DriftVol {
    double drift;
    double vol;
};

enum class Family { ckls, black_karasinski, ait_sahalia };

/// One-factor risk-neutral short-rate model: a tagged union over the
/// families that share the dr = mu(r) dt + sigma(r) dw form.
class ShortRateModel1F {
public:
    using Spec = std::variant<CKLSParams, BlackKarasinskiParams, AitSahaliaDriftParams>;

    ShortRateModel1F(CKLSParams p) : spec_(p) { p.validate(); }
    ShortRateModel1F(BlackKarasinskiParams p) : spec_(p) { p.validate(); }
    ShortRateModel1F(AitSahaliaDriftParams p) : spec_(p) {
        detail::require(p.sigma > 0.0 && p.gamma >= 0.0, "Ait-Sahalia sigma > 0 and gamma >= 0 required");
    }

    static ShortRateModel1F vasicek(double alpha, double beta, double sigma) {
        return CKLSParams{alpha, beta, sigma, 0.0};
    }
    static ShortRateModel1F cir(double alpha, double beta, double sigma) {
        return CKLSParams{alpha, beta, sigma, 0.5};
    }
    static ShortRateModel1F dothan(double mu, double sigma) { return CKLSParams{0.0, mu, sigma, 1.0}; }

    Family family() const { return static_cast<Family>(spec_.index()); }
    const Spec& spec() const { return spec_; }

    bool is_ckls() const { return family() == Family::ckls; }
    const CKLSParams& ckls() const { return std::get<CKLSParams>(spec_); }
    const BlackKarasinskiParams& black_karasinski() const { return std::get<BlackKarasinskiParams>(spec_); }
    const AitSahaliaDriftParams& ait_sahalia() const { return std::get<AitSahaliaDriftParams>(spec_); }

    /// True when the state must stay non-negative (any r^gamma, gamma > 0, or r = e^x).
    bool requires_positive_rate() const {
        switch (family()) {
            case Family::ckls: return ckls().gamma > 0.0;
            case Family::black_karasinski: return true;
            case Family::ait_sahalia: return true;
        }
        return true;
    }

    std::string name() const {
        switch (family()) {
            case Family::ckls: {
                const auto& p = ckls();
                if (p.gamma == 0.0) return "vasicek";
                if (p.gamma == 0.5) return "cir";
                if (p.gamma == 1.0 && p.alpha == 0.0) return "dothan";
                return "ckls";
            }
            case Family::black_karasinski: return "black_karasinski";
            case Family::ait_sahalia: return "ait_sahalia";
        }
        return "unknown";
    }

private:
    Spec spec_;
};

// ---------------------------------------------------------------------------
// Measure changes

inline CKLSParams to_risk_neutral(const VasicekRealParams& p) {
    return CKLSParams{p.kappa * p.theta - p.lambda * p.sigma, -p.kappa, p.sigma, 0.0};
}

inline CKLSParams to_risk_neutral(const CIRRealParams& p) {
    return CKLSParams{p.kappa * p.theta, -p.kappa - p.lambda * p.sigma, p.sigma, 0.5};
}

inline CKLSParams to_risk_neutral(const CKLSParams& p) { return p; }

inline CKLSParams to_risk_neutral(const CIRFactor& f) {
    return to_risk_neutral(CIRRealParams{f.kappa, f.theta, f.sigma, f.lambda});
}

inline ConvergenceModel to_risk_neutral(const ConvergenceRealParams& p) {
    ConvergenceModel m;
    m.a1 = p.a - p.lambda_d * p.sigma_d;
    m.a2 = -p.b;
    m.a3 = p.b;
    m.b1 = p.c * p.d - p.lambda_e * p.sigma_e;
    m.b2 = -p.c;
    m.sigma_d = p.sigma_d;
    m.sigma_e = p.sigma_e;
    m.gamma_d = p.gamma_d;
    m.gamma_e = p.gamma_e;
    m.rho = p.rho;
    return m;
}

// ---------------------------------------------------------------------------
// Drift and volatility

inline DriftVol drift_vol(const ShortRateModel1F& model, double r) {
    using numerics::rpow;
    detail::require(std::isfinite(r), "short rate must be finite");
    switch (model.family()) {
        case Family::ckls: {
            const auto& p = model.ckls();
            const double drift = p.alpha + p.beta * r;
            if (p.gamma == 0.0) return {drift, p.sigma};
            detail::require(r >= 0.0, "negative short rate for a model with r^gamma volatility");
            return {drift, r == 0.0 ? 0.0 : p.sigma * rpow(r, p.gamma)};
        }
        case Family::black_karasinski: {
            const auto& p = model.black_karasinski();
            detail::require(r >= 0.0, "negative short rate for Black-Karasinski");
            if (r == 0.0) return {0.0, 0.0};
            const double drift = r * (p.kappa * p.theta + 0.5 * p.sigma * p.sigma - p.kappa * std::log(r));
            return {drift, p.sigma * r};
        }
        case Family::ait_sahalia: {
            const auto& p = model.ait_sahalia();
            detail::require(r > 0.0, "Ait-Sahalia drift needs r > 0");
            const double drift = p.a_m1 / r + p.a_0 + p.a_1 * r + p.a_2 * r * r;
            return {drift, p.sigma * rpow(r, p.gamma)};
        }
    }
    throw DomainError("unknown model family");
}

// ---------------------------------------------------------------------------
// Price <-> yield

inline double yield_from_price(double price, double tau) {
    detail::require(price > 0.0, "bond price must be positive");
    detail::require(tau > 0.0, "maturity must be positive");
    return -std::log(price) / tau;
}

inline double yield_from_log_price(double log_price, double tau) {
    detail::require(tau > 0.0, "maturity must be positive");
    return -log_price / tau;
}

inline double price_from_yield(double yield, double tau) {
    detail::require(tau >= 0.0, "maturity must be non-negative");
    return std::exp(-yield * tau);
}

}  // namespace shortrate
