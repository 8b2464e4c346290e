#pragma once

// Exponent expansion of Arrow-Debreu prices for a state variable x with
// constant volatility, dx = mu(x) dt + sigma dw, and short rate r(x):
//
//   psi(x, t; x0) = (2 pi sigma^2 t)^{-1/2} exp[-(x - x0)^2/(2 sigma^2 t) - sum_n W_n(x; x0) t^n]
//
// Each W_n is carried as a truncated Taylor polynomial in y = x - x0. The
// recursion is derived in docs/exponent_expansion.md.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "shortrate/error.hpp"
#include "shortrate/models.hpp"
#include "shortrate/numerics/quadrature.hpp"

namespace shortrate {

/// Constant-volatility model for the state x. The drift is a polynomial
/// sum_k drift[k] x^k; the short rate is r(x) = rate_const + sum_i rate_amp[i] e^{rate_exp[i] x}.
struct TransformedModel {
    std::vector<double> drift;
    double sigma = 0.0;
    double rate_const = 0.0;
    std::vector<double> rate_amp;
    std::vector<double> rate_exp;
    /// Lower bound of r + mu'/2 + mu^2/(2 sigma^2) over the state space, or -inf
    /// when unknown. The Feynman-Kac representation of psi bounds the t-dependent
    /// part of the exponent from below by this floor times t.
    double potential_floor = -std::numeric_limits<double>::infinity();

    void validate() const {
        detail::require(sigma > 0.0, "transformed model needs sigma > 0");
        detail::require(rate_amp.size() == rate_exp.size(), "rate map amplitude/exponent size mismatch");
    }

    double rate(double x) const {
        double r = rate_const;
        for (std::size_t i = 0; i < rate_amp.size(); ++i) r += rate_amp[i] * std::exp(rate_exp[i] * x);
        return r;
    }

    double mu(double x) const {
        double v = 0.0;
        for (std::size_t k = drift.size(); k-- > 0;) v = v * x + drift[k];
        return v;
    }

    /// Noise-free path of x after time t, by RK4 on dx/dt = mu(x).
    double drift_path(double x0, double t, int steps = 32) const {
        const double h = t / steps;
        double x = x0;
        for (int i = 0; i < steps; ++i) {
            const double k1 = mu(x), k2 = mu(x + 0.5 * h * k1), k3 = mu(x + 0.5 * h * k2), k4 = mu(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return x;
    }

    /// Black-Karasinski: x = ln r, mu(x) = kappa (theta - x), r = e^x.
    static TransformedModel black_karasinski(const BlackKarasinskiParams& p) {
        p.validate();
        TransformedModel m;
        m.drift = {p.kappa * p.theta, -p.kappa};
        m.sigma = p.sigma;
        m.rate_amp = {1.0};
        m.rate_exp = {1.0};
        m.potential_floor = -0.5 * p.kappa;
        return m;
    }
};

struct ExpansionOptions {
    int taylor_terms = 160;      // Taylor coefficients kept per W_n
    double kernel_width = 10.0;  // psi is set to zero beyond kernel_width sigma sqrt(t) from the drift path
    bool clamp = true;           // apply the potential floor to sum_{n>=1} W_n t^n
};

/// Taylor coefficients in y = x - x0 of W_0..W_N for one source point x0.
class ExponentExpansion {
public:
    ExponentExpansion(const TransformedModel& model, double x0, int N, ExpansionOptions opt = {})
        : model_(model), x0_(x0), N_(N), opt_(opt) {
        model.validate();
        detail::require(N >= 0, "expansion order must be non-negative");
        detail::require(std::isfinite(x0), "x0 must be finite");
        build();
    }

    int order() const { return N_; }
    double x0() const { return x0_; }
    const std::vector<std::vector<double>>& coefficients() const { return W_; }

    /// W_n(x; x0).
    double W(int n, double x) const { return horner(W_[n], x - x0_); }

    /// sum_{n=0}^{N} W_n(x) t^n, with the floor on the t-dependent part applied.
    double exponent(double x, double t) const {
        const double y = x - x0_;
        const double w0 = horner(W_[0], y);
        double rest = 0.0;
        double tn = t;
        for (int n = 1; n <= N_; ++n, tn *= t) rest += horner(W_[n], y) * tn;
        if (opt_.clamp && std::isfinite(model_.potential_floor)) rest = std::max(rest, model_.potential_floor * t);
        return w0 + rest;
    }

    /// Arrow-Debreu price psi(x, t; x0).
    double psi(double x, double t) const {
        detail::require(t > 0.0, "Arrow-Debreu price needs t > 0");
        const double y = x - x0_;
        const double s2t = model_.sigma * model_.sigma * t;
        if (std::abs(x - center(t)) > opt_.kernel_width * std::sqrt(s2t)) return 0.0;
        return std::exp(-y * y / (2.0 * s2t) - exponent(x, t)) / std::sqrt(2.0 * std::numbers::pi * s2t);
    }

    /// Drift path of x0 at time t, cached for the last t requested.
    double center(double t) const {
        if (t != center_t_) {
            center_x_ = model_.drift_path(x0_, t);
            center_t_ = t;
        }
        return center_x_;
    }

private:
    using Poly = std::vector<double>;

    static double horner(const Poly& a, double y) {
        double v = 0.0;
        for (std::size_t k = a.size(); k-- > 0;) v = v * y + a[k];
        return v;
    }
    Poly mul(const Poly& a, const Poly& b) const {
        const int K = opt_.taylor_terms;
        Poly out(K, 0.0);
        for (int i = 0; i < K; ++i) {
            if (a[i] == 0.0) continue;
            for (int j = 0; i + j < K; ++j) out[i + j] += a[i] * b[j];
        }
        return out;
    }
    Poly der(const Poly& a) const {
        const int K = opt_.taylor_terms;
        Poly out(K, 0.0);
        for (int k = 1; k < K; ++k) out[k - 1] = a[k] * k;
        return out;
    }

    void build() {
        const int K = opt_.taylor_terms;
        detail::require(K >= 8, "too few Taylor terms");
        const double D = 0.5 * model_.sigma * model_.sigma;

        // mu(x0 + y) as a polynomial in y.
        Poly mu(K, 0.0);
        {
            const auto& c = model_.drift;
            for (std::size_t k = 0; k < c.size(); ++k) {
                // c_k (x0 + y)^k = c_k sum_m binom(k, m) x0^(k-m) y^m
                double binom = 1.0;
                for (std::size_t m = 0; m <= k && static_cast<int>(m) < K; ++m) {
                    mu[m] += c[k] * binom * std::pow(x0_, static_cast<double>(k - m));
                    binom = binom * static_cast<double>(k - m) / static_cast<double>(m + 1);
                }
            }
        }
        const Poly dmu = der(mu);
        // r(x0 + y) = rate_const + sum_i a_i e^{b_i x0} sum_k b_i^k y^k / k!
        Poly rr(K, 0.0);
        rr[0] = model_.rate_const;
        for (std::size_t i = 0; i < model_.rate_amp.size(); ++i) {
            double term = model_.rate_amp[i] * std::exp(model_.rate_exp[i] * x0_);
            for (int k = 0; k < K; ++k) {
                rr[k] += term;
                term *= model_.rate_exp[i] / (k + 1);
            }
        }

        // W_0' = -mu/sigma^2; for n >= 1, y W_n' + n W_n = -R_n with
        // R_n = [n = 1](-r - mu') + mu W'_{n-1} + D sum_{i+j=n-1} W_i' W_j' - D W''_{n-1}.
        W_.assign(N_ + 1, Poly(K, 0.0));
        std::vector<Poly> Wp(N_ + 1);
        Wp[0] = Poly(K, 0.0);
        for (int k = 0; k < K; ++k) Wp[0][k] = -mu[k] / (2.0 * D);
        for (int k = 1; k < K; ++k) W_[0][k] = Wp[0][k - 1] / k;
        for (int n = 1; n <= N_; ++n) {
            Poly R = mul(mu, Wp[n - 1]);
            const Poly d2 = der(Wp[n - 1]);
            for (int k = 0; k < K; ++k) R[k] -= D * d2[k];
            for (int i = 0; i < n; ++i) {
                const Poly pr = mul(Wp[i], Wp[n - 1 - i]);
                for (int k = 0; k < K; ++k) R[k] += D * pr[k];
            }
            if (n == 1)
                for (int k = 0; k < K; ++k) R[k] -= rr[k] + dmu[k];
            for (int k = 0; k < K; ++k) W_[n][k] = -R[k] / (k + n);
            Wp[n] = der(W_[n]);
        }
    }

    TransformedModel model_;
    double x0_;
    int N_;
    ExpansionOptions opt_;
    mutable double center_t_ = std::numeric_limits<double>::quiet_NaN();
    mutable double center_x_ = 0.0;
    std::vector<Poly> W_;
};

/// W_0..W_N evaluated at x.
inline std::vector<double> ee_coeffs(const TransformedModel& model, double x, double x0, int N,
                                     ExpansionOptions opt = {}) {
    detail::require(N <= 8, "exponent expansion is supported up to order 8");
    const ExponentExpansion ee(model, x0, N, opt);
    std::vector<double> out(N + 1);
    for (int n = 0; n <= N; ++n) out[n] = ee.W(n, x);
    return out;
}

inline double arrow_debreu(const TransformedModel& model, double x, double t, double x0, int N,
                           ExpansionOptions opt = {}) {
    return ExponentExpansion(model, x0, N, opt).psi(x, t);
}

struct BondQuadrature {
    int nodes = 400;       // Gauss-Legendre nodes over the integration window
    double width = 9.0;    // half-width of the window in units of sigma sqrt(tau)
};

/// P = integral of psi(x, tau; x0) dx over the drift path of x0 +- width sigma sqrt(tau).
inline double ee_bond_price(const TransformedModel& model, double x0, double tau, int N, ExpansionOptions opt = {},
                            BondQuadrature quad = {}) {
    detail::require(tau > 0.0, "maturity must be positive");
    detail::require(N <= 8, "exponent expansion is supported up to order 8");
    const ExponentExpansion ee(model, x0, N, opt);
    const auto rule = numerics::gauss_legendre(quad.nodes);
    const double h = quad.width * model.sigma * std::sqrt(tau);
    const double c = ee.center(tau);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * ee.psi(c + h * rule.nodes[i], tau);
    const double price = h * sum;
    if (!std::isfinite(price)) throw NumericalError("exponent expansion bond price is not finite");
    return price;
}

struct ConvolutionOptions {
    int nodes = 200;          // Gauss-Legendre nodes per slice
    double pad = 8.0;         // support padding in units of sigma sqrt(step)
    double support_tol = 1e-16;  // nodes with density below tol * max are outside the running support
};

/// Chapman-Kolmogorov chaining of short-time kernels: tau is split into slices
/// of length `step` (the last one shortened when tau/step is not integral), and
/// the deflated density is propagated slice by slice on a Gauss-Legendre grid
/// covering the running support padded by pad sigma sqrt(step).
inline double ee_bond_price_convolution(const TransformedModel& model, double x0, double tau, int N, double step,
                                        ExpansionOptions opt = {}, ConvolutionOptions conv = {}) {
    model.validate();
    detail::require(tau > 0.0, "maturity must be positive");
    detail::require(step > 0.0, "convolution step must be positive");
    detail::require(N <= 8, "exponent expansion is supported up to order 8");
    const double ratio = tau / step;
    int slices = static_cast<int>(std::ceil(ratio - 1e-12));
    if (slices < 1) slices = 1;
    std::vector<double> dts(slices, std::min(step, tau));
    dts.back() = tau - step * (slices - 1);

    const auto rule = numerics::gauss_legendre(conv.nodes);
    std::vector<double> xs{x0}, f{1.0}, wts{1.0};
    for (double dt : dts) {
        double fmax = 0.0;
        for (double v : f) fmax = std::max(fmax, std::abs(v));
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (std::abs(f[i]) > conv.support_tol * fmax) {
                lo = std::min(lo, xs[i]);
                hi = std::max(hi, xs[i]);
            }
        const double padw = conv.pad * model.sigma * std::sqrt(dt);
        lo = std::min(lo, model.drift_path(lo, dt)) - padw;
        hi = std::max(hi, model.drift_path(hi, dt)) + padw;
        std::vector<double> nx(rule.nodes.size()), nw(rule.nodes.size()), nf(rule.nodes.size(), 0.0);
        for (std::size_t k = 0; k < nx.size(); ++k) {
            nx[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[k];
            nw[k] = 0.5 * (hi - lo) * rule.weights[k];
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double mass = f[i] * wts[i];
            if (mass == 0.0) continue;
            const ExponentExpansion ee(model, xs[i], N, opt);
            for (std::size_t k = 0; k < nx.size(); ++k) nf[k] += ee.psi(nx[k], dt) * mass;
        }
        xs = std::move(nx);
        wts = std::move(nw);
        f = std::move(nf);
    }
    double price = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) price += f[i] * wts[i];
    if (!std::isfinite(price)) throw NumericalError("convolution bond price is not finite");
    return price;
}

}  // namespace shortrate
