#pragma once

// Taylor series in tau of the bond price, P = sum c_j(r) tau^j, or of its
// logarithm, ln P = sum k_j(r) tau^j, with every coefficient held exactly as a
// SeriesInR.

#include <cmath>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/power_sum.hpp"

namespace shortrate {

enum class SeriesKind { price, log };

struct DriftVariance {
    SeriesInR drift;     // mu(r)
    SeriesInR variance;  // sigma(r)^2
};

/// Risk-neutral drift and variance of a one-factor model in the r^p (ln r)^q basis.
inline DriftVariance drift_variance_series(const ShortRateModel1F& model) {
    DriftVariance dv;
    switch (model.family()) {
        case Family::ckls: {
            const auto& p = model.ckls();
            dv.drift = SeriesInR{{p.alpha, 0.0, 0}, {p.beta, 1.0, 0}};
            dv.variance = SeriesInR::monomial(p.sigma * p.sigma, 2.0 * p.gamma);
            break;
        }
        case Family::black_karasinski: {
            // mu(r) = r (kappa theta + sigma^2/2 - kappa ln r), sigma(r) = sigma r
            const auto& p = model.black_karasinski();
            dv.drift = SeriesInR{{p.kappa * p.theta + 0.5 * p.sigma * p.sigma, 1.0, 0}, {-p.kappa, 1.0, 1}};
            dv.variance = SeriesInR::monomial(p.sigma * p.sigma, 2.0);
            break;
        }
        case Family::ait_sahalia: {
            const auto& p = model.ait_sahalia();
            dv.drift = SeriesInR{{p.a_m1, -1.0, 0}, {p.a_0, 0.0, 0}, {p.a_1, 1.0, 0}, {p.a_2, 2.0, 0}};
            dv.variance = SeriesInR::monomial(p.sigma * p.sigma, 2.0 * p.gamma);
            break;
        }
    }
    return dv;
}

/// Coefficients 0..J of the price series (kind = price) or the log-price
/// series (kind = log). Price: c_0 = 1,
///   (j+1) c_{j+1} = mu c_j' + (sigma^2/2) c_j'' - r c_j.
/// Log: k_0 = 0,
///   (j+1) k_{j+1} = (sigma^2/2) [sum_{i=0}^{j} k_i' k_{j-i}' + k_j''] + mu k_j' - r [j = 0].
inline std::vector<SeriesInR> taylor_coeffs(const ShortRateModel1F& model, int J, SeriesKind kind) {
    detail::require(J >= 0, "series order must be non-negative");
    const auto dv = drift_variance_series(model);
    const SeriesInR half_var = dv.variance * 0.5;
    const SeriesInR r = SeriesInR::monomial(1.0, 1.0);
    std::vector<SeriesInR> c;
    c.reserve(J + 1);
    c.push_back(kind == SeriesKind::price ? SeriesInR::constant(1.0) : SeriesInR{});
    std::vector<SeriesInR> d1;  // first derivatives, log kind only
    for (int j = 0; j < J; ++j) {
        const SeriesInR cj1 = c[j].derivative();
        const SeriesInR cj2 = cj1.derivative();
        SeriesInR next;
        if (kind == SeriesKind::price) {
            next = dv.drift * cj1 + half_var * cj2 - r * c[j];
        } else {
            d1.push_back(cj1);
            SeriesInR conv;
            for (int i = 0; i <= j; ++i) conv += d1[i] * d1[j - i];
            next = half_var * (conv + cj2) + dv.drift * cj1;
            if (j == 0) next -= r;
        }
        c.push_back(next * (1.0 / (j + 1)));
    }
    return c;
}

inline std::vector<SeriesInR> taylor_log_coeffs(const ShortRateModel1F& model, int J) {
    return taylor_coeffs(model, J, SeriesKind::log);
}

/// Partial sums for orders 0..J: element n is the price implied by the
/// coefficients 0..n (exponentiated for the log kind).
inline std::vector<double> taylor_partial_prices(const std::vector<SeriesInR>& coeffs, double r, double tau,
                                                 SeriesKind kind) {
    detail::require(tau >= 0.0, "maturity must be non-negative");
    std::vector<double> out;
    out.reserve(coeffs.size());
    double sum = 0.0;
    double tp = 1.0;
    for (const auto& c : coeffs) {
        sum += c(r) * tp;
        tp *= tau;
        out.push_back(kind == SeriesKind::price ? sum : std::exp(sum));
    }
    return out;
}

struct TaylorResult {
    double price;
    double stabilization;  // |P_J - P_{J-1}|
    std::vector<double> partial;  // P_0 .. P_J
};

/// Holds the coefficients of one model so several (r, tau) points reuse them.
class TaylorPricer {
public:
    TaylorPricer(const ShortRateModel1F& model, int J, SeriesKind kind = SeriesKind::log)
        : model_(model), J_(J), kind_(kind), coeffs_(taylor_coeffs(model, J, kind)) {
        detail::require(J >= 1, "series order must be at least 1");
    }

    TaylorResult operator()(double r, double tau) const {
        check_rate(r);
        TaylorResult res;
        res.partial = taylor_partial_prices(coeffs_, r, tau, kind_);
        res.price = res.partial.back();
        res.stabilization = std::abs(res.partial[J_] - res.partial[J_ - 1]);
        return res;
    }

    const std::vector<SeriesInR>& coeffs() const { return coeffs_; }
    int order() const { return J_; }
    SeriesKind kind() const { return kind_; }
    const ShortRateModel1F& model() const { return model_; }

private:
    void check_rate(double r) const {
        detail::require(r >= 0.0 || !model_.requires_positive_rate(), "negative short rate outside the model domain");
    }

    ShortRateModel1F model_;
    int J_;
    SeriesKind kind_;
    std::vector<SeriesInR> coeffs_;
};

inline TaylorResult taylor_price(const ShortRateModel1F& model, double r, double tau, int J,
                                 SeriesKind kind = SeriesKind::log) {
    return TaylorPricer(model, J, kind)(r, tau);
}

}  // namespace shortrate
